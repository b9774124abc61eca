#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eulerperf {

using Series = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;

// How cumulative performance is formed from per-period returns.
//  Arithmetic: cr^t = sum of returns, portfolios are constant-mix.
//  Geometric:  cr^t = prod(1 + r) - 1, portfolios are buy-and-hold.
enum class Convention { Arithmetic, Geometric };

enum class ReturnBasis { Raw, Excess };

/// Per-asset return panel, T periods by n assets, stored column-wise.
///
/// Excess returns (return minus the per-period risk-free rate) are derived at
/// construction; every ratio in the library is computed from them.
class AssetPanel {
public:
    AssetPanel(std::vector<std::string> asset_ids, std::vector<Series> returns,
               int period_length, std::optional<Series> benchmark = std::nullopt,
               std::optional<Series> market = std::nullopt, double risk_free = 0.0);

    // Time-varying per-period risk-free rate (length T; empty means zero).
    AssetPanel(std::vector<std::string> asset_ids, std::vector<Series> returns,
               int period_length, std::optional<Series> benchmark,
               std::optional<Series> market, Series risk_free);

    std::size_t num_assets() const noexcept { return returns_.size(); }
    std::size_t num_periods() const noexcept { return returns_.front().size(); }
    int period_length() const noexcept { return period_length_; }

    const std::vector<std::string>& asset_ids() const noexcept { return asset_ids_; }
    std::size_t index_of(const std::string& id) const;

    std::span<const double> returns(std::size_t asset) const { return returns_.at(asset); }
    std::span<const double> excess_returns(std::size_t asset) const {
        return excess_.at(asset);
    }
    std::span<const double> series(std::size_t asset, ReturnBasis basis) const {
        return basis == ReturnBasis::Raw ? returns(asset) : excess_returns(asset);
    }

    const std::optional<Series>& benchmark() const noexcept { return benchmark_; }
    const std::optional<Series>& market() const noexcept { return market_; }
    std::span<const double> risk_free() const noexcept { return risk_free_; }

private:
    void validate() const;

    std::vector<std::string> asset_ids_;
    std::vector<Series> returns_;
    std::vector<Series> excess_;
    int period_length_;
    std::optional<Series> benchmark_;
    std::optional<Series> market_;
    Series risk_free_;
};

/// Portfolio weights that have been checked against the simplex.
class Weights {
public:
    // Throws InputError unless sum(values) == 1 within `tolerance`, and, when
    // long_only is set, every entry lies in [0, 1].
    static Weights on_simplex(std::vector<double> values, bool long_only = true,
                              double tolerance = 1e-12);
    static Weights equal(std::size_t n);

    std::span<const double> values() const noexcept { return w_; }
    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }

private:
    explicit Weights(std::vector<double> w) : w_(std::move(w)) {}
    std::vector<double> w_;
};

/// Summary moments for analysis without raw return series.
///
/// Units are opaque but must be consistent across fields. The optional
/// per-asset risk measures and marginal sensitivities let a caller supply a
/// precomputed drawdown (or any other) ledger directly.
struct MomentSpec {
    std::vector<std::string> asset_ids;
    std::vector<double> expected_return;
    std::vector<double> volatility;
    std::optional<std::vector<double>> corr_with_portfolio;
    std::optional<Matrix> corr_matrix;
    double risk_free = 0.0;

    std::optional<std::vector<double>> asset_denominator;
    std::optional<std::vector<double>> marginal_sensitivity;
    std::optional<double> portfolio_denominator;

    std::size_t size() const noexcept { return expected_return.size(); }
    bool has_correlation() const noexcept {
        return corr_with_portfolio.has_value() || corr_matrix.has_value();
    }
    bool has_supplied_marginals() const noexcept {
        return asset_denominator.has_value() && marginal_sensitivity.has_value();
    }

    // Structural checks: matching lengths, positive volatilities, a valid
    // correlation matrix. Throws ValidationError listing every problem.
    void validate() const;
};

struct DrawdownStats {
    double mdd = 0.0;
    std::size_t peak_index = 0;    // j*
    std::size_t trough_index = 0;  // k*
    Convention convention = Convention::Arithmetic;
};

struct AnnualDrawdown {
    double ald = 0.0;
    std::vector<DrawdownStats> blocks;
};

double mean(std::span<const double> x);
// Unbiased (T - 1) sample covariance.
double sample_covariance(std::span<const double> a, std::span<const double> b);

// Length T + 1 path with element 0 equal to 0.
Series cumulative_returns(std::span<const double> series, Convention convention);

// Drawdown levels: cumulative return (arithmetic) or wealth 1 + cr (geometric).
Series drawdown_levels(std::span<const double> series, Convention convention);

// Arithmetic: sum_i w_i r_i,t. Geometric: per-period returns of the
// buy-and-hold path sum_i w_i (1 + cr_i^t) - 1.
Series portfolio_series(const AssetPanel& panel, std::span<const double> w,
                        Convention convention, ReturnBasis basis = ReturnBasis::Raw);

// Portfolio drawdown levels, linear in w under both conventions.
Series portfolio_levels(const AssetPanel& panel, std::span<const double> w,
                        Convention convention, ReturnBasis basis = ReturnBasis::Excess);

double volatility(std::span<const double> series, int period_length);

Matrix sample_covariance_matrix(const AssetPanel& panel,
                                ReturnBasis basis = ReturnBasis::Excess);
Matrix covariance_from_correlation(const Matrix& corr, std::span<const double> vols);

// Cov(r_i, r_p) / (sigma_i sigma_p) from a covariance matrix.
double correlation_with_portfolio(const Matrix& covariance, std::span<const double> w,
                                  std::size_t asset);

// Root mean square shortfall below `target`, divisor T, scaled by
// sqrt(period_length).
double target_semideviation(std::span<const double> series, int period_length,
                            double target = 0.0);

double beta(std::span<const double> series, std::span<const double> market);

DrawdownStats max_drawdown(std::span<const double> series, Convention convention,
                           std::optional<std::size_t> window = std::nullopt);

// Drawdown over the level sub-path [lo, hi]; indices in the result refer to
// the full path.
DrawdownStats max_drawdown_on_levels(std::span<const double> levels, Convention convention,
                                     std::size_t lo, std::size_t hi);

// Level-path index ranges [lo, hi] of the year blocks used by the annual
// average drawdown. A trailing partial year counts when it spans at least
// half a year.
std::vector<std::pair<std::size_t, std::size_t>> annual_blocks(std::size_t periods,
                                                               int period_length);

AnnualDrawdown average_annual_drawdown(std::span<const double> series, int period_length,
                                       Convention convention = Convention::Arithmetic);
AnnualDrawdown average_annual_drawdown_on_levels(std::span<const double> levels,
                                                 int period_length, Convention convention);

}  // namespace eulerperf
