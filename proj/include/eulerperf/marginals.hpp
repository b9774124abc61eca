#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eulerperf/core_stats.hpp"

namespace eulerperf {

enum class Ratio { Sharpe, Sortino, Information, Treynor, Recovery, Calmar, Sterling };

std::string_view to_string(Ratio ratio);
std::optional<Ratio> parse_ratio(std::string_view name);
std::string_view to_string(Convention convention);
std::optional<Convention> parse_convention(std::string_view name);

/// Which performance ratio to analyse and the drawdown conventions it uses.
struct RatioKind {
    Ratio ratio = Ratio::Sharpe;
    // Calmar look-back in periods; defaults to three years of periods.
    std::optional<std::size_t> window;
    Convention mdd_convention = Convention::Arithmetic;

    bool is_drawdown() const noexcept {
        return ratio == Ratio::Recovery || ratio == Ratio::Calmar || ratio == Ratio::Sterling;
    }
    // Denominator positively homogeneous of degree 1 in the weights, so that
    // sum_i w_i df/dw_i reconstructs it exactly.
    bool degree_one() const noexcept {
        if (ratio == Ratio::Information) return false;
        return !is_drawdown() || mdd_convention == Convention::Arithmetic;
    }
    std::size_t calmar_window(int period_length) const {
        return window.value_or(3 * static_cast<std::size_t>(period_length));
    }
};

/// df/dw_i for each asset, together with f at the portfolio and f for each
/// asset held alone.
struct MarginalSensitivity {
    std::vector<double> per_asset;
    double denominator_value = 0.0;
    std::vector<double> per_asset_denominator;
    // |sum_i w_i per_asset_i - denominator_value|
    double euler_residual = 0.0;
    bool degree_one = true;
    std::vector<std::string> warnings;
};

// Thrown when a degree-1 marginal vector fails to reconstruct its
// denominator; always indicates a defect, never bad input.
class EulerCheckError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline constexpr double kEulerRelativeTolerance = 1e-10;

std::vector<double> volatility_marginal(const AssetPanel& panel, std::span<const double> w);
// Uses the correlation matrix when present, otherwise the stated correlations
// with the portfolio.
std::vector<double> volatility_marginal(const MomentSpec& spec, std::span<const double> w);

// E[r_p r_i 1{r_p < 0}] / TSD_p on excess returns, annualized.
std::vector<double> tsd_marginal(const AssetPanel& panel, std::span<const double> w);

std::vector<double> beta_marginal(const AssetPanel& panel);

struct TrackingMarginal {
    std::vector<double> per_asset;        // Cov(r_i, r_p - r_b) / sigma_{p-b}
    std::vector<double> asset_tracking;   // sigma_{i-b}
    double tracking_error = 0.0;          // sigma_{p-b}
};
TrackingMarginal tracking_marginal(const AssetPanel& panel, std::span<const double> w);

struct DrawdownGradient {
    std::vector<double> gradient;
    DrawdownStats stats;
    bool no_drawdown = false;
};

// Subgradient of the portfolio maximum drawdown at the argmin pair chosen by
// the lexicographic tie-break. Window counts trailing periods.
DrawdownGradient mdd_gradient(const AssetPanel& panel, std::span<const double> w,
                              Convention convention,
                              std::optional<std::size_t> window = std::nullopt);

struct AnnualDrawdownGradient {
    std::vector<double> gradient;
    AnnualDrawdown ald;
    bool no_drawdown = false;
};

AnnualDrawdownGradient ald_gradient(const AssetPanel& panel, std::span<const double> w,
                                    Convention convention = Convention::Arithmetic);

// The ratio's denominator f evaluated directly at w.
double risk_measure(const RatioKind& kind, const AssetPanel& panel, std::span<const double> w);

// f for each asset held alone.
std::vector<double> asset_risk_measures(const RatioKind& kind, const AssetPanel& panel);

MarginalSensitivity marginal_sensitivity(const RatioKind& kind, const AssetPanel& panel,
                                         std::span<const double> w);

// Sharpe is computed from volatilities and correlations; every other kind
// requires supplied per-asset risk measures and marginals, which pass through
// after the Euler identity has been checked against any supplied portfolio
// value.
MarginalSensitivity marginal_sensitivity(const RatioKind& kind, const MomentSpec& spec,
                                         std::span<const double> w);

}  // namespace eulerperf
