#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eulerperf/core_stats.hpp"
#include "eulerperf/decomposition.hpp"
#include "eulerperf/marginals.hpp"

namespace eulerperf {

struct OptimizerConfig {
    std::size_t max_iterations = 10000;
    double tolerance = 1e-9;  // stop once a sweep improves the ratio by less
    std::size_t restarts = 16;
    std::uint64_t seed = 0;
    double grid_step = 0.005;

    void validate() const;
};

struct OptimizationResult {
    std::vector<double> weights;
    double ratio = 0.0;
    std::size_t iterations = 0;
    std::size_t restarts_used = 0;
    bool converged = false;
    DecompositionReport decomposition;
};

// Euclidean projection onto {w : w_i >= 0, sum w_i = 1}.
std::vector<double> project_to_simplex(std::span<const double> v);

/// Maximizes the ratio over the long-only simplex.
///
/// Restart 0 starts at equal weights, the others at seeded random simplex
/// points. Smooth kinds take projected gradient ascent steps using the
/// quotient rule on the marginal sensitivities; every restart finishes with a
/// pairwise mass-transfer pattern search, which is the whole search for the
/// drawdown kinds. Deterministic for a fixed seed.
OptimizationResult maximize_ratio(const RatioKind& kind, const AssetPanel& panel,
                                  const OptimizerConfig& config = {});
// Moment mode needs a correlation matrix, as only Sharpe can be re-evaluated
// away from the stated weights.
OptimizationResult maximize_ratio(const RatioKind& kind, const MomentSpec& spec,
                                  const OptimizerConfig& config = {});

// Exhaustive scan of the simplex lattice with spacing grid_step (1/grid_step
// must be an integer). n <= 4. Ties go to the lexicographically smallest
// weight vector.
OptimizationResult grid_oracle(const RatioKind& kind, const AssetPanel& panel,
                               double grid_step = 0.005);
OptimizationResult grid_oracle(const RatioKind& kind, const MomentSpec& spec,
                               double grid_step = 0.005);

inline constexpr std::size_t kGridOracleMaxAssets = 4;

}  // namespace eulerperf
