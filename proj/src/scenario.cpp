#include "sfcalc/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <thread>

#include "sfcalc/chi.hpp"
#include "sfcalc/engines.hpp"
#include "sfcalc/frequency.hpp"
#include "sfcalc/generators.hpp"
#include "sfcalc/geometry.hpp"

namespace sfcalc {

using json = nlohmann::json;

namespace {

const std::vector<std::string> kEngines{"crossing", "phillips", "integral", "appendix", "aps"};

std::string field(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }

const json& require(const json& obj, const std::string& key, const std::string& ptr) {
  if (!obj.is_object()) throw ScenarioError(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(field(ptr, key), "missing required field");
  return *it;
}

template <typename T>
T as(const json& v, const std::string& ptr) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ScenarioError(ptr, "expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw ScenarioError(ptr, "expected an integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ScenarioError(ptr, "expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ScenarioError(ptr, "expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(ptr, e.what());
  }
}

template <typename T>
T optional_field(const json& obj, const std::string& key, const std::string& ptr, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return as<T>(*it, field(ptr, key));
}

void check(bool ok, const std::string& ptr, const std::string& what) {
  if (!ok) throw ScenarioError(ptr, what);
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

cd entry(const json& v, const std::string& ptr) {
  if (v.is_number()) return cd(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return cd(v[0].get<double>(), v[1].get<double>());
  throw ScenarioError(ptr, "matrix entry must be a number or [re, im]");
}

void parse_model(const json& doc, Scenario& sc) {
  const std::string ptr = "/model";
  const json& m = require(doc, "model", "");
  sc.model_kind = as<std::string>(require(m, "kind", ptr), field(ptr, "kind"));
  if (sc.model_kind == "blocks") {
    const json& bl = require(m, "blocks", ptr);
    check(bl.is_array() && !bl.empty(), field(ptr, "blocks"), "expected a nonempty array");
    for (std::size_t i = 0; i < bl.size(); ++i) {
      const std::string p = field(ptr, "blocks/" + std::to_string(i));
      Block b;
      b.dim = as<long>(require(bl[i], "dim", p), field(p, "dim"));
      b.weight = optional_field<double>(bl[i], "weight", p, 1.0);
      check(b.dim >= 1 && b.dim <= 256, field(p, "dim"), "dimension must lie in [1, 256]");
      check(b.weight > 0.0, field(p, "weight"), "weight must be positive");
      sc.blocks.push_back(b);
    }
  } else if (sc.model_kind == "frequency") {
    auto it = m.find("density");
    if (it != m.end() && !(it->is_string() && *it == "integer_lattice")) {
      sc.density = as<double>(*it, field(ptr, "density"));
      check(sc.density > 0.0, field(ptr, "density"), "density must be positive");
    }
    sc.cutoff = optional_field<double>(m, "cutoff", ptr, 50.0);
    check(sc.cutoff > 0.0, field(ptr, "cutoff"), "cutoff must be positive");
  } else if (sc.model_kind == "circle") {
    sc.circle_n = optional_field<int>(m, "n", ptr, 16);
    check(sc.circle_n >= 2 && sc.circle_n % 2 == 0 && sc.circle_n <= 128, field(ptr, "n"),
          "n must be an even integer in [2, 128]");
    sc.metric = optional_field<std::string>(m, "metric", ptr, "breathing");
    const auto names = CircleMetricPath::names();
    check(std::find(names.begin(), names.end(), sc.metric) != names.end(), field(ptr, "metric"),
          "unknown metric family");
    sc.circle_samples = optional_field<int>(m, "samples", ptr, 41);
    check(sc.circle_samples >= 11, field(ptr, "samples"), "need at least 11 u-samples");
  } else {
    throw ScenarioError(field(ptr, "kind"), "expected blocks, frequency or circle");
  }
}

void parse_path(const json& doc, Scenario& sc) {
  const std::string ptr = "/path";
  if (sc.model_kind == "circle") {
    sc.path_kind = "metric";
    return;
  }
  const json& p = require(doc, "path", "");
  sc.path_kind = as<std::string>(require(p, "kind", ptr), field(ptr, "kind"));
  if (sc.model_kind == "frequency") {
    check(sc.path_kind == "shifted_dirac", field(ptr, "kind"),
          "frequency models support the shifted_dirac path only");
    sc.u_start = optional_field<double>(p, "u_start", ptr, -1.0);
    sc.u_end = optional_field<double>(p, "u_end", ptr, 1.0);
    sc.steps = optional_field<int>(p, "steps", ptr, 16);
    check(sc.steps >= 1 && sc.steps <= 4096, field(ptr, "steps"), "steps must lie in [1, 4096]");
    return;
  }
  if (sc.path_kind == "samples") {
    const json& nodes = require(p, "nodes", ptr);
    const json& samples = require(p, "samples", ptr);
    check(nodes.is_array() && nodes.size() >= 2, field(ptr, "nodes"), "need at least two nodes");
    check(samples.is_array() && samples.size() == nodes.size(), field(ptr, "samples"),
          "need one sample per node");
    for (std::size_t i = 0; i < nodes.size(); ++i)
      sc.nodes.push_back(as<double>(nodes[i], field(ptr, "nodes/" + std::to_string(i))));
    check(sc.nodes.front() == 0.0 && sc.nodes.back() == 1.0, field(ptr, "nodes"),
          "nodes must start at 0 and end at 1");
    check(std::adjacent_find(sc.nodes.begin(), sc.nodes.end(), std::greater_equal<>()) == sc.nodes.end(),
          field(ptr, "nodes"), "nodes must be strictly increasing");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string sp = field(ptr, "samples/" + std::to_string(i));
      check(samples[i].is_array() && samples[i].size() == sc.blocks.size(), sp,
            "need one matrix per model block");
      std::vector<Mat<cd>> blocks;
      for (std::size_t b = 0; b < sc.blocks.size(); ++b) {
        const std::string bp = sp + "/" + std::to_string(b);
        const json& rows = samples[i][b];
        const auto n = sc.blocks[b].dim;
        check(rows.is_array() && static_cast<long>(rows.size()) == n, bp, "wrong number of rows");
        Mat<cd> mat(n, n);
        for (long r = 0; r < n; ++r) {
          const std::string rp = bp + "/" + std::to_string(r);
          check(rows[r].is_array() && static_cast<long>(rows[r].size()) == n, rp, "wrong row length");
          for (long c = 0; c < n; ++c) mat(r, c) = entry(rows[r][c], rp + "/" + std::to_string(c));
        }
        blocks.push_back(mat);
      }
      sc.samples.push_back(std::move(blocks));
    }
    const auto interp = optional_field<std::string>(p, "interpolation", ptr, "linear");
    check(interp == "linear" || interp == "cubic_hermite", field(ptr, "interpolation"),
          "expected linear or cubic_hermite");
    sc.interpolation = interp == "linear" ? Interpolation::linear : Interpolation::cubic_hermite;
  } else if (sc.path_kind == "generator") {
    sc.generator = as<std::string>(require(p, "name", ptr), field(ptr, "name"));
    const auto names = generator_names();
    check(std::find(names.begin(), names.end(), sc.generator) != names.end(), field(ptr, "name"),
          "unknown generator");
    if (sc.generator != "single_crossing") {
      const json& seed = require(p, "seed", ptr);
      check(seed.is_number_unsigned(), field(ptr, "seed"), "seed must be a nonnegative integer");
      sc.seed = seed.get<std::uint64_t>();
    }
    sc.generator_nodes = optional_field<int>(p, "nodes", ptr, 4);
    check(sc.generator_nodes >= 2 && sc.generator_nodes <= 1024, field(ptr, "nodes"),
          "nodes must lie in [2, 1024]");
  } else {
    throw ScenarioError(field(ptr, "kind"), "expected samples or generator");
  }
}

void parse_engines(const json& doc, Scenario& sc) {
  const json& e = require(doc, "engines", "");
  check(e.is_array() && !e.empty(), "/engines", "expected a nonempty array");
  for (std::size_t i = 0; i < e.size(); ++i) {
    const std::string p = "/engines/" + std::to_string(i);
    auto name = as<std::string>(e[i], p);
    check(std::find(kEngines.begin(), kEngines.end(), name) != kEngines.end(), p, "unknown engine");
    if (sc.model_kind == "frequency")
      check(name == "phillips", p, "frequency models support the phillips engine only");
    sc.engines.push_back(name);
  }

  const std::string ptr = "/engine_params";
  auto it = doc.find("engine_params");
  if (it != doc.end()) {
    const json& ep = *it;
    check(ep.is_object(), ptr, "expected an object");
    if (auto s = ep.find("s_grid"); s != ep.end()) {
      check(s->is_array() && !s->empty(), field(ptr, "s_grid"), "expected a nonempty array");
      sc.params.s_grid.clear();
      for (std::size_t i = 0; i < s->size(); ++i) {
        const double v = as<double>((*s)[i], field(ptr, "s_grid/" + std::to_string(i)));
        check(v > 0.0 && v <= 1e4, field(ptr, "s_grid/" + std::to_string(i)), "s must lie in (0, 1e4]");
        sc.params.s_grid.push_back(v);
      }
    }
    if (auto c = ep.find("chi"); c != ep.end()) {
      check(c->is_array() && !c->empty(), field(ptr, "chi"), "expected a nonempty array");
      sc.params.chi.clear();
      const auto ids = ChiProfile::ids();
      for (std::size_t i = 0; i < c->size(); ++i) {
        const std::string cp = field(ptr, "chi/" + std::to_string(i));
        auto id = as<std::string>((*c)[i], cp);
        check(id == "default" || std::find(ids.begin(), ids.end(), id) != ids.end(), cp,
              "unknown chi profile");
        sc.params.chi.push_back(id);
      }
    }
    sc.params.window = optional_field<double>(ep, "window", ptr, 1.0);
    check(sc.params.window > 0.0, field(ptr, "window"), "window must be positive");
    sc.params.phillips_depth = optional_field<int>(ep, "phillips_depth", ptr, 20);
    check(sc.params.phillips_depth >= 1 && sc.params.phillips_depth <= 40,
          field(ptr, "phillips_depth"), "depth must lie in [1, 40]");
    sc.params.appendix_rescale = optional_field<bool>(ep, "appendix_rescale", ptr, true);
    sc.params.appendix_regularize = optional_field<bool>(ep, "appendix_regularize", ptr, false);
  }
}

void parse_aps(const json& doc, Scenario& sc) {
  const std::string ptr = "/aps";
  auto it = doc.find("aps");
  if (it == doc.end()) return;
  const json& a = *it;
  check(a.is_object(), ptr, "expected an object");
  sc.aps.M = optional_field<int>(a, "M", ptr, 200);
  check(sc.aps.M >= 16 && sc.aps.M <= 20000, field(ptr, "M"), "M must lie in [16, 20000]");
  const auto scheme = optional_field<std::string>(a, "scheme", ptr, "forward-upwind");
  check(scheme == "forward-upwind" || scheme == "implicit-midpoint", field(ptr, "scheme"),
        "expected forward-upwind or implicit-midpoint");
  sc.aps.scheme = scheme == "forward-upwind" ? Scheme::forward_upwind : Scheme::implicit_midpoint;
  const auto geo = optional_field<std::string>(a, "geometry", ptr, "interval-APS");
  check(geo == "interval-APS" || geo == "cylinder", field(ptr, "geometry"),
        "expected interval-APS or cylinder");
  sc.aps.geometry = geo == "cylinder" ? ApsGeometry::cylinder : ApsGeometry::interval_aps;
  sc.aps.theta = optional_field<double>(a, "theta", ptr, 1e-7);
  check(sc.aps.theta > 0.0 && sc.aps.theta < 1e-2, field(ptr, "theta"), "theta must lie in (0, 1e-2)");
  if (auto L = a.find("L"); L != a.end() && !L->is_null()) {
    sc.aps.L = as<double>(*L, field(ptr, "L"));
    check(*sc.aps.L > 0.0, field(ptr, "L"), "L must be positive");
  }
  sc.aps.strict_flat = optional_field<bool>(a, "strict_flat", ptr, true);
  sc.aps.endpoint_regularize = optional_field<bool>(a, "endpoint_regularize", ptr, false);
}

void parse_assertions(const json& doc, Scenario& sc) {
  const std::string ptr = "/assertions";
  auto it = doc.find("assertions");
  if (it == doc.end()) return;
  const json& a = *it;
  check(a.is_object(), ptr, "expected an object");
  if (auto e = a.find("expected"); e != a.end() && !e->is_null())
    sc.assertions.expected = as<double>(*e, field(ptr, "expected"));
  sc.assertions.tolerance = optional_field<double>(a, "tolerance", ptr, 1e-6);
  check(sc.assertions.tolerance > 0.0, field(ptr, "tolerance"), "tolerance must be positive");
  sc.assertions.agreement = optional_field<bool>(a, "agreement", ptr, false);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

// Runs tasks on `threads` workers; results land in task order and the first
// failing task (in order) is rethrown.
std::vector<EngineRow> run_tasks(const std::vector<std::function<EngineRow()>>& tasks, int threads,
                                 bool timings) {
  std::vector<EngineRow> out(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        out[i] = tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
      if (timings)
        out[i].runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(line_column(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  check(doc.is_object(), "", "scenario must be a JSON object");
  const json& schema = require(doc, "schema", "");
  check(schema.is_number_integer() && schema.get<int>() == 1, "/schema", "unsupported schema version");

  Scenario sc;
  sc.name = as<std::string>(require(doc, "name", ""), "/name");
  check(std::regex_match(sc.name, std::regex("[A-Za-z0-9_.-]+")), "/name",
        "name may contain letters, digits, '_', '-' and '.' only");
  parse_model(doc, sc);
  parse_path(doc, sc);
  parse_engines(doc, sc);
  parse_aps(doc, sc);
  parse_assertions(doc, sc);

  sc.csv_name = sc.name + ".csv";
  sc.log_name = sc.name + ".log";
  if (auto o = doc.find("output"); o != doc.end()) {
    check(o->is_object(), "/output", "expected an object");
    sc.csv_name = optional_field<std::string>(*o, "csv", "/output", sc.csv_name);
    sc.log_name = optional_field<std::string>(*o, "log", "/output", sc.log_name);
    for (const auto* f : {&sc.csv_name, &sc.log_name})
      check(f->find('/') == std::string::npos && !f->empty() && *f != "." && *f != "..",
            "/output", "file names must be plain names without directories");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ScenarioError(file.string(), "cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

OperatorPath<cd> build_operator_path(const Scenario& sc, std::optional<std::uint64_t> seed) {
  if (sc.model_kind == "circle")
    return hermitian_signature_path(
        CircleMetricPath::named(sc.metric, sc.circle_n, sc.circle_samples));
  const WeightedBlockModel model(sc.blocks);
  if (sc.path_kind == "generator") return generate_path(sc.generator, seed.value_or(0), model, sc.generator_nodes);
  std::vector<BlockHermitian<cd>> samples;
  for (std::size_t i = 0; i < sc.samples.size(); ++i) {
    try {
      samples.emplace_back(model, sc.samples[i]);
    } catch (const ValidationError& e) {
      throw ScenarioError("/path/samples/" + std::to_string(i), e.what());
    }
  }
  try {
    return OperatorPath<cd>(sc.nodes, std::move(samples), sc.interpolation);
  } catch (const ValidationError& e) {
    throw ScenarioError("/path/nodes", e.what());
  }
}

EngineRow row_from(const std::string& label, std::optional<double> s, const SpectralFlowResult& r) {
  return EngineRow{label, s, r.raw, r.error_estimate(), 0.0, r.diagnostics};
}

}  // namespace

RunRecord run_scenario(const Scenario& sc, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.scenario = sc.name;
  rec.version = SFCALC_VERSION;
  if (sc.seed) rec.seed = opts.seed_override ? opts.seed_override : sc.seed;

  std::vector<std::function<EngineRow()>> tasks;

  if (sc.model_kind == "frequency") {
    const FrequencyModel model =
        sc.density > 0.0
            ? FrequencyModel([rho = sc.density](double) { return rho; }, sc.cutoff, "constant")
            : FrequencyModel::integer_lattice(sc.cutoff);
    tasks.push_back([=] {
      const auto r = sf_phillips(shifted_dirac_path(model, sc.u_start, sc.u_end, sc.steps));
      return row_from("phillips", std::nullopt, r);
    });
    const auto rep = dirac_family_scenario(sc.u_start, sc.u_end, model, sc.steps);
    rec.diagnostics["window_trace"] = rep.window_trace;
    rec.diagnostics["max_kernel_trace"] = rep.max_kernel_trace;
  } else {
    const auto path = std::make_shared<OperatorPath<cd>>(build_operator_path(sc, rec.seed));
    const auto& p = sc.params;
    for (const auto& e : sc.engines) {
      if (e == "crossing") {
        tasks.push_back([=] { return row_from("crossing", {}, sf_crossing(*path, p.window)); });
      } else if (e == "phillips") {
        tasks.push_back(
            [=] { return row_from("phillips", {}, sf_phillips(*path, p.phillips_depth)); });
      } else if (e == "integral") {
        for (double s : p.s_grid)
          tasks.push_back([=] { return row_from("integral", s, sf_integral(*path, s)); });
      } else if (e == "appendix") {
        for (const auto& id : p.chi) {
          const auto chi = ChiProfile::by_id(id);
          tasks.push_back([=] {
            AppendixOptions ao{p.appendix_rescale, p.appendix_regularize};
            return row_from("appendix:" + chi.id, {}, sf_appendix(*path, chi, ao));
          });
        }
      } else if (e == "aps") {
        const auto a = sc.aps;
        tasks.push_back([=] {
          SuspensionProblem<cd> prob{*path};
          prob.grid = a.M;
          prob.scheme = a.scheme;
          prob.geometry = a.geometry;
          prob.extension = a.L;
          prob.theta = a.theta;
          prob.endpoint_regularize = a.endpoint_regularize;
          prob.require_flat = a.strict_flat;
          const auto r = aps_index_report(prob);
          return EngineRow{"aps_index", std::nullopt, r.index, 0.0, 0.0,
                           {{"sigma_max", r.sigma_max},
                            {"threshold", r.threshold},
                            {"largest_below", r.largest_below},
                            {"smallest_above", r.smallest_above}}};
        });
      }
    }
  }

  rec.rows = run_tasks(tasks, opts.threads, opts.timings);
  for (const auto& r : rec.rows)
    if (r.engine == "aps_index") rec.aps_index = r.value;

  const auto n = static_cast<Eigen::Index>(rec.rows.size());
  rec.agreement = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rec.rows[i];
    rec.labels.push_back(r.s ? r.engine + "@s=" + fmt(*r.s) : r.engine);
    for (const auto& [k, v] : r.diagnostics) rec.diagnostics[rec.labels.back() + "." + k] = v;
    for (Eigen::Index j = 0; j < i; ++j) {
      rec.agreement(i, j) = r.value - rec.rows[j].value;
      rec.agreement(j, i) = -rec.agreement(i, j);
    }
  }

  const double tol = sc.assertions.tolerance * opts.tolerance_scale;
  if (sc.assertions.expected)
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(std::abs(rec.rows[i].value - *sc.assertions.expected) <= tol))
        rec.failures.push_back(rec.labels[i] + " = " + fmt(rec.rows[i].value) + ", expected " +
                               fmt(*sc.assertions.expected));
  if (sc.assertions.agreement && n > 0) {
    const double worst = rec.agreement.cwiseAbs().maxCoeff();
    if (!(worst <= tol)) rec.failures.push_back("engines disagree by " + fmt(worst));
  }
  if (n > 0) rec.diagnostics["max_disagreement"] = rec.agreement.cwiseAbs().maxCoeff();
  rec.passed = rec.failures.empty();
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::string csv_header() { return "scenario,engine,parameter_s,value,error_estimate,runtime_ms,seed\n"; }

std::string to_csv(const RunRecord& rec, bool timings) {
  std::string out = csv_header();
  for (const auto& r : rec.rows) {
    out += rec.scenario + "," + r.engine + "," + (r.s ? fmt(*r.s) : "") + "," + fmt(r.value) + "," +
           fmt(r.error_estimate) + "," + (timings ? fmt(r.runtime_ms) : "0") + "," +
           (rec.seed ? std::to_string(*rec.seed) : "") + "\n";
  }
  return out;
}

std::string to_log(const RunRecord& rec) {
  std::ostringstream o;
  o << "scenario " << rec.scenario << "\n";
  o << "sfcalc " << rec.version << "\n";
  o << "seed " << (rec.seed ? std::to_string(*rec.seed) : "none") << "\n";
  for (std::size_t i = 0; i < rec.rows.size(); ++i)
    o << "  " << rec.labels[i] << " = " << fmt(rec.rows[i].value)
      << " (error estimate " << fmt(rec.rows[i].error_estimate) << ")\n";
  for (const auto& [k, v] : rec.diagnostics) o << "  " << k << " = " << fmt(v) << "\n";
  o << "wall clock " << fmt(rec.wall_ms) << " ms\n";
  if (rec.passed) {
    o << "result PASS\n";
  } else {
    o << "result FAIL\n";
    for (const auto& f : rec.failures) o << "  " << f << "\n";
  }
  return o.str();
}

void write_artifacts(const RunRecord& rec, const Scenario& sc, const std::filesystem::path& dir,
                     bool timings) {
  std::filesystem::create_directories(dir);
  auto put = [](const std::filesystem::path& f, const std::string& text) {
    std::ofstream out(f, std::ios::binary);
    if (!out) throw Error("cannot write " + f.string());
    out << text;
  };
  put(dir / sc.csv_name, to_csv(rec, timings));
  put(dir / sc.log_name, to_log(rec));
}

std::vector<std::filesystem::path> bundled_scenarios() {
  std::vector<std::filesystem::path> out;
  const std::filesystem::path dir = SFCALC_SCENARIO_DIR;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.path().extension() == ".json" && name.find(".schema.") == std::string::npos)
      out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* s = std::getenv("SFCALC_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0' || s[0] == '-') throw ScenarioError("SFCALC_SEED", "expected an unsigned integer");
  return v;
}

}  // namespace sfcalc
