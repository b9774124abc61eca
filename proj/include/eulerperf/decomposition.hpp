#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eulerperf/core_stats.hpp"
#include "eulerperf/marginals.hpp"

namespace eulerperf {

// Row flag texts.
inline constexpr const char* kFlagNonPositiveAssetRisk = "nonpositive asset risk measure";
inline constexpr const char* kFlagNonPositiveMarginal = "nonpositive marginal sensitivity";
inline constexpr const char* kFlagZeroMarginal = "zero marginal sensitivity";

/// One asset's share of the portfolio ratio:
///   contribution = risk_weight * diversification * asset_ratio
struct DecompositionRow {
    std::string asset_id;
    double weight = 0.0;
    double asset_numerator = 0.0;       // R_i
    double asset_denominator = 0.0;     // f(i)
    double marginal_sensitivity = 0.0;  // df/dw_i
    double asset_ratio = 0.0;           // PR(i) = R_i / f(i)
    double diversification = 0.0;       // D_i = f(i) / (df/dw_i)
    double component_ratio = 0.0;       // D_i PR(i)
    double risk_weight = 0.0;           // theta_i = w_i (df/dw_i) / f(p)
    double contribution = 0.0;
    double relative_contribution = 0.0;
    std::vector<std::string> flags;
};

struct DecompositionReport {
    RatioKind kind;
    std::vector<DecompositionRow> rows;
    double portfolio_ratio = 0.0;
    double portfolio_numerator = 0.0;
    double portfolio_denominator = 0.0;
    double reconstruction_residual = 0.0;
    double risk_weight_sum = 0.0;
    std::vector<std::string> warnings;
};

// Annualized excess return of each asset; for the Information ratio the
// active return over the benchmark.
std::vector<double> asset_numerators(const RatioKind& kind, const AssetPanel& panel);
std::vector<double> asset_numerators(const RatioKind& kind, const MomentSpec& spec);

// Throws DegenerateError("degenerate risk measure") when the denominator is
// not positive.
double ratio_value(const RatioKind& kind, const AssetPanel& panel, std::span<const double> w);
double ratio_value(const RatioKind& kind, const MomentSpec& spec, std::span<const double> w);

DecompositionReport decompose(const RatioKind& kind, const AssetPanel& panel,
                              std::span<const double> w);
DecompositionReport decompose(const RatioKind& kind, const MomentSpec& spec,
                              std::span<const double> w);

// Builds the report from precomputed pieces. Shared by both input modes.
DecompositionReport assemble_report(const RatioKind& kind, const std::vector<std::string>& ids,
                                    std::span<const double> w,
                                    std::span<const double> numerators,
                                    const MarginalSensitivity& marginals);

struct CandidateStats {
    double asset_ratio = 0.0;
    double diversification = 0.0;
    // The candidate's risk weight in the combined portfolio, when known.
    std::optional<double> risk_weight;

    // Sharpe ingredients: D = 1 / rho_{i,p}.
    static CandidateStats sharpe(double asset_sharpe, double corr_with_portfolio);
};

struct InclusionVerdict {
    bool include = false;
    double threshold = 0.0;  // PR(p) / D_i
    double margin = 0.0;     // PR(i) - threshold
};

// Adding the candidate raises the ratio iff PR(i) >= PR(p) / D_i.
InclusionVerdict inclusion_test(const CandidateStats& candidate, double portfolio_ratio);
InclusionVerdict inclusion_test(const DecompositionReport& report, std::size_t row);

}  // namespace eulerperf
