#pragma once

// Seeded random models and paths used by the verification suites and the
// scenario runner. All generators draw from std::mt19937_64 so a seed fixes
// the output on every platform with the same standard library.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sfcalc/path.hpp"
#include "sfcalc/tracemodel.hpp"

namespace sfcalc {

using Rng = std::mt19937_64;

/// (X + X^*)/2 with independent standard normal real and imaginary parts.
Mat<cd> random_hermitian(Rng& rng, Eigen::Index n, double scale = 1.0);
Mat<cd> random_unitary(Rng& rng, Eigen::Index n);

/// 1 to max_blocks blocks of dimension 1..max_dim, weights from {1/2, 1, 3/2, 2}.
WeightedBlockModel random_model(Rng& rng, int max_blocks, Eigen::Index max_dim);

/// 1 to max_blocks blocks whose dimensions sum to at most max_total.
WeightedBlockModel random_small_model(Rng& rng, int max_blocks, Eigen::Index max_total);

BlockHermitian<cd> random_block_hermitian(Rng& rng, const WeightedBlockModel& m, double scale = 1.0);

/// Random element whose eigenvalues all have modulus at least `gap`.
BlockHermitian<cd> random_invertible(Rng& rng, const WeightedBlockModel& m, double gap = 0.1,
                                     double scale = 1.0);

/// Piecewise linear path through `nodes` uniformly spaced random samples,
/// endpoints invertible with the given gap.
OperatorPath<cd> random_path(Rng& rng, const WeightedBlockModel& m, int nodes = 4, double gap = 0.1);

/// As random_path, but constant on [0, 0.1] and [0.9, 1].
OperatorPath<cd> random_flat_path(Rng& rng, const WeightedBlockModel& m, int interior = 3,
                                  double gap = 0.1);

/// B_0 = V diag(+-1) V^* with `minus[b]` eigenvalues -1 in block b, then
/// u -> B_0 + 2u P_0^- (P_0^- = (1 - B_0)/2), held constant near both ends.
/// Its spectral flow is tr(P_0^-).
OperatorPath<cd> involution_path(Rng& rng, const WeightedBlockModel& m,
                                 const std::vector<Eigen::Index>& minus);

/// Scalar path u -> 2u - 1 on a one-dimensional model.
OperatorPath<cd> single_crossing_path(bool flat = false);

struct PerturbationPair {
  BlockHermitian<cd> D;
  OperatorPath<cd> K;  // u -> u K_1
};

/// D with eigenvalues spread over [-spread, spread] and a compact-size
/// perturbation K_1 with D + K_1 invertible.
PerturbationPair random_perturbation_pair(Rng& rng, Eigen::Index n, double spread = 8.0);

/// Smooth data for the half-line problem: f(x) = (1 - x/T)(a + b sin 2x) with
/// random a, b on the nodes of [0, T]; D_0 random invertible.
struct HalflineData {
  BlockHermitian<cd> D0;
  double T = 4.0;
  std::function<Mat<cd>(int intervals)> f;
};
HalflineData random_halfline_data(Rng& rng, Eigen::Index n, double T = 4.0);

/// Named generator registry used by scenario files.
OperatorPath<cd> generate_path(const std::string& name, std::uint64_t seed,
                               const WeightedBlockModel& m, int nodes);
std::vector<std::string> generator_names();

}  // namespace sfcalc
