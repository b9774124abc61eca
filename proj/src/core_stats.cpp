#include "eulerperf/core_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "eulerperf/errors.hpp"

namespace eulerperf {

namespace {

void check_series(std::span<const double> s, const std::string& name, std::size_t length) {
    if (s.size() != length) {
        throw InputError(name + ": expected " + std::to_string(length) + " periods, got " +
                         std::to_string(s.size()));
    }
    for (std::size_t t = 0; t < s.size(); ++t) {
        if (!std::isfinite(s[t]) || s[t] <= -1.0) {
            std::ostringstream msg;
            msg << name << ": return at period " << t << " is " << s[t]
                << " (must be finite and > -1)";
            throw InputError(msg.str());
        }
    }
}

// Drawdown between a peak level and a later level. Positive magnitude.
inline double drawdown_value(double peak, double later, Convention convention) {
    if (convention == Convention::Arithmetic) return peak - later;
    return -(later / peak - 1.0);
}

}  // namespace

AssetPanel::AssetPanel(std::vector<std::string> asset_ids, std::vector<Series> returns,
                       int period_length, std::optional<Series> benchmark,
                       std::optional<Series> market, double risk_free)
    : AssetPanel(std::move(asset_ids), std::move(returns), period_length,
                 std::move(benchmark), std::move(market), Series{}) {
    if (!std::isfinite(risk_free)) throw InputError("risk-free rate must be finite");
    risk_free_.assign(num_periods(), risk_free);
    for (std::size_t i = 0; i < num_assets(); ++i) {
        for (std::size_t t = 0; t < num_periods(); ++t) excess_[i][t] = returns_[i][t] - risk_free;
    }
}

AssetPanel::AssetPanel(std::vector<std::string> asset_ids, std::vector<Series> returns,
                       int period_length, std::optional<Series> benchmark,
                       std::optional<Series> market, Series risk_free)
    : asset_ids_(std::move(asset_ids)),
      returns_(std::move(returns)),
      period_length_(period_length),
      benchmark_(std::move(benchmark)),
      market_(std::move(market)),
      risk_free_(std::move(risk_free)) {
    validate();
    const std::size_t T = num_periods();
    // An empty risk-free series means a zero rate.
    if (risk_free_.empty()) risk_free_.assign(T, 0.0);
    if (risk_free_.size() != T) {
        throw InputError("risk-free series: expected " + std::to_string(T) + " periods");
    }
    for (double rf : risk_free_) {
        if (!std::isfinite(rf)) throw InputError("risk-free series must be finite");
    }
    excess_ = returns_;
    for (auto& column : excess_) {
        for (std::size_t t = 0; t < T; ++t) column[t] -= risk_free_[t];
    }
}

void AssetPanel::validate() const {
    if (returns_.empty()) throw InputError("panel needs at least one asset");
    if (asset_ids_.size() != returns_.size()) {
        throw InputError("panel has " + std::to_string(returns_.size()) + " return columns but " +
                         std::to_string(asset_ids_.size()) + " asset ids");
    }
    std::set<std::string> seen;
    for (const auto& id : asset_ids_) {
        if (!seen.insert(id).second) throw InputError("duplicate asset id '" + id + "'");
    }
    if (period_length_ <= 0) throw InputError("period_length must be positive");
    const std::size_t T = returns_.front().size();
    if (T < 2) throw InputError("panel needs at least 2 periods");
    for (std::size_t i = 0; i < returns_.size(); ++i) {
        check_series(returns_[i], "asset '" + asset_ids_[i] + "'", T);
    }
    if (benchmark_) check_series(*benchmark_, "benchmark", T);
    if (market_) check_series(*market_, "market", T);
}

std::size_t AssetPanel::index_of(const std::string& id) const {
    auto it = std::find(asset_ids_.begin(), asset_ids_.end(), id);
    if (it == asset_ids_.end()) throw InputError("unknown asset id '" + id + "'");
    return static_cast<std::size_t>(it - asset_ids_.begin());
}

Weights Weights::on_simplex(std::vector<double> values, bool long_only, double tolerance) {
    if (values.empty()) throw InputError("weights: empty vector");
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError("weights: non-finite entry");
        if (long_only && (v < 0.0 || v > 1.0)) {
            throw InputError("weights: long-only entry outside [0, 1]");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "weights: sum is " << sum << ", expected 1";
        throw InputError(msg.str());
    }
    return Weights(std::move(values));
}

Weights Weights::equal(std::size_t n) {
    if (n == 0) throw InputError("weights: empty vector");
    return Weights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void MomentSpec::validate() const {
    std::vector<std::string> issues;
    const std::size_t n = expected_return.size();
    if (n == 0) issues.emplace_back("assets: at least one asset required");
    if (!asset_ids.empty() && asset_ids.size() != n) {
        issues.emplace_back("asset_ids: length mismatch");
    }
    auto check_length = [&](const std::vector<double>& v, const char* name) {
        if (v.size() != n) issues.emplace_back(std::string(name) + ": length mismatch");
    };
    if (!volatility.empty()) {
        check_length(volatility, "volatility");
        for (double s : volatility) {
            if (!(s > 0.0) || !std::isfinite(s)) {
                issues.emplace_back("volatility: entries must be positive");
                break;
            }
        }
    }
    for (double r : expected_return) {
        if (!std::isfinite(r)) {
            issues.emplace_back("expected_return: entries must be finite");
            break;
        }
    }
    if (!std::isfinite(risk_free)) issues.emplace_back("risk_free: must be finite");
    if (corr_with_portfolio) {
        check_length(*corr_with_portfolio, "corr_with_portfolio");
        for (double c : *corr_with_portfolio) {
            if (!(c >= -1.0 && c <= 1.0)) {
                issues.emplace_back("corr_with_portfolio: entries must lie in [-1, 1]");
                break;
            }
        }
    }
    if (corr_matrix) {
        const Matrix& c = *corr_matrix;
        bool shape_ok = c.size() == n;
        for (const auto& row : c) shape_ok = shape_ok && row.size() == n;
        if (!shape_ok) {
            issues.emplace_back("corr_matrix: must be n x n");
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (c[i][i] != 1.0) issues.emplace_back("corr_matrix: diagonal must be 1");
                for (std::size_t j = 0; j < n; ++j) {
                    if (!(c[i][j] >= -1.0 && c[i][j] <= 1.0)) {
                        issues.emplace_back("corr_matrix: entries must lie in [-1, 1]");
                    } else if (c[i][j] != c[j][i]) {
                        issues.emplace_back("corr_matrix: must be symmetric");
                    }
                }
            }
        }
        if (volatility.empty()) issues.emplace_back("volatility: required with corr_matrix");
    }
    if (corr_with_portfolio && volatility.empty()) {
        issues.emplace_back("volatility: required with corr_with_portfolio");
    }
    if (asset_denominator.has_value() != marginal_sensitivity.has_value()) {
        issues.emplace_back(
            "asset risk measures and marginal sensitivities must be supplied together");
    }
    if (asset_denominator) check_length(*asset_denominator, "asset risk measure");
    if (marginal_sensitivity) check_length(*marginal_sensitivity, "marginal_sensitivity");
    if (!has_correlation() && !has_supplied_marginals()) {
        issues.emplace_back(
            "correlation: one of corr_with_portfolio or corr_matrix is required "
            "(or supplied risk measures with marginal sensitivities)");
    }
    // de-duplicate repeated matrix messages
    std::sort(issues.begin(), issues.end());
    issues.erase(std::unique(issues.begin(), issues.end()), issues.end());
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

double mean(std::span<const double> x) {
    if (x.empty()) throw InputError("empty series");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_covariance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("covariance: series length mismatch");
    if (a.size() < 2) throw InputError("covariance: need at least 2 periods");
    // Shifted by the first observation so a constant series gives exactly 0.
    const std::size_t T = a.size();
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        sa += a[t] - a[0];
        sb += b[t] - b[0];
    }
    const double ma = sa / static_cast<double>(T);
    const double mb = sb / static_cast<double>(T);
    double acc = 0.0;
    for (std::size_t t = 0; t < T; ++t) acc += (a[t] - a[0] - ma) * (b[t] - b[0] - mb);
    return acc / static_cast<double>(T - 1);
}

Series drawdown_levels(std::span<const double> series, Convention convention) {
    if (series.empty()) throw InputError("empty series");
    Series levels(series.size() + 1);
    if (convention == Convention::Arithmetic) {
        levels[0] = 0.0;
        for (std::size_t t = 0; t < series.size(); ++t) levels[t + 1] = levels[t] + series[t];
    } else {
        levels[0] = 1.0;
        for (std::size_t t = 0; t < series.size(); ++t) {
            levels[t + 1] = levels[t] * (1.0 + series[t]);
        }
    }
    return levels;
}

Series cumulative_returns(std::span<const double> series, Convention convention) {
    Series path = drawdown_levels(series, convention);
    if (convention == Convention::Geometric) {
        for (double& v : path) v -= 1.0;
    }
    return path;
}

Series portfolio_levels(const AssetPanel& panel, std::span<const double> w,
                        Convention convention, ReturnBasis basis) {
    if (w.size() != panel.num_assets()) throw InputError("weights: dimension mismatch");
    Series levels(panel.num_periods() + 1, 0.0);
    for (std::size_t i = 0; i < panel.num_assets(); ++i) {
        const Series asset = drawdown_levels(panel.series(i, basis), convention);
        for (std::size_t t = 0; t < levels.size(); ++t) levels[t] += w[i] * asset[t];
    }
    return levels;
}

Series portfolio_series(const AssetPanel& panel, std::span<const double> w,
                        Convention convention, ReturnBasis basis) {
    if (w.size() != panel.num_assets()) throw InputError("weights: dimension mismatch");
    const std::size_t T = panel.num_periods();
    Series out(T, 0.0);
    if (convention == Convention::Arithmetic) {
        for (std::size_t i = 0; i < panel.num_assets(); ++i) {
            const auto r = panel.series(i, basis);
            for (std::size_t t = 0; t < T; ++t) out[t] += w[i] * r[t];
        }
        return out;
    }
    const Series value = portfolio_levels(panel, w, convention, basis);
    for (std::size_t t = 0; t < T; ++t) out[t] = value[t + 1] / value[t] - 1.0;
    return out;
}

double volatility(std::span<const double> series, int period_length) {
    if (series.size() < 2) throw InputError("volatility: need at least 2 periods");
    const double var = sample_covariance(series, series);
    return std::sqrt(std::max(var, 0.0) * static_cast<double>(period_length));
}

Matrix sample_covariance_matrix(const AssetPanel& panel, ReturnBasis basis) {
    const std::size_t n = panel.num_assets();
    Matrix cov(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            cov[i][j] = cov[j][i] = sample_covariance(panel.series(i, basis), panel.series(j, basis));
        }
    }
    return cov;
}

Matrix covariance_from_correlation(const Matrix& corr, std::span<const double> vols) {
    const std::size_t n = vols.size();
    if (corr.size() != n) throw InputError("correlation matrix: dimension mismatch");
    Matrix cov(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (corr[i].size() != n) throw InputError("correlation matrix: dimension mismatch");
        for (std::size_t j = 0; j < n; ++j) cov[i][j] = corr[i][j] * vols[i] * vols[j];
    }
    return cov;
}

double correlation_with_portfolio(const Matrix& covariance, std::span<const double> w,
                                  std::size_t asset) {
    const std::size_t n = w.size();
    if (covariance.size() != n || asset >= n) {
        throw InputError("correlation_with_portfolio: dimension mismatch");
    }
    double cov_ip = 0.0;
    double var_p = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cov_ip += covariance[asset][j] * w[j];
        double row = 0.0;
        for (std::size_t k = 0; k < n; ++k) row += covariance[j][k] * w[k];
        var_p += w[j] * row;
    }
    if (!(var_p > 0.0)) throw DegenerateError("zero portfolio variance");
    const double var_i = covariance[asset][asset];
    if (!(var_i > 0.0)) throw DegenerateError("zero asset variance");
    return cov_ip / (std::sqrt(var_i) * std::sqrt(var_p));
}

double target_semideviation(std::span<const double> series, int period_length, double target) {
    if (series.size() < 2) throw InputError("target semideviation: need at least 2 periods");
    double acc = 0.0;
    for (double r : series) {
        const double shortfall = std::min(r - target, 0.0);
        acc += shortfall * shortfall;
    }
    return std::sqrt(acc / static_cast<double>(series.size()) *
                     static_cast<double>(period_length));
}

double beta(std::span<const double> series, std::span<const double> market) {
    if (market.empty()) throw InputError("beta: missing market series");
    if (series.size() != market.size()) throw InputError("beta: series length mismatch");
    const double var_m = sample_covariance(market, market);
    if (!(var_m > 0.0)) throw DegenerateError("beta: zero market variance");
    return sample_covariance(series, market) / var_m;
}

DrawdownStats max_drawdown_on_levels(std::span<const double> levels, Convention convention,
                                     std::size_t lo, std::size_t hi) {
    if (levels.empty()) throw InputError("empty series");
    if (lo > hi || hi >= levels.size()) throw InputError("drawdown: invalid index range");
    if (convention == Convention::Geometric) {
        for (std::size_t t = lo; t <= hi; ++t) {
            if (!(levels[t] > 0.0)) throw InputError("drawdown: wealth path must stay positive");
        }
    }

    // Largest drawdown: for each trough candidate the running peak is the
    // best partner, since the drawdown is monotone in the peak level.
    double peak = levels[lo];
    double best = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        peak = std::max(peak, levels[k]);
        best = std::max(best, drawdown_value(peak, levels[k], convention));
    }

    // Lexicographically smallest (j, k) attaining it: for each j the largest
    // drawdown uses the suffix minimum, so the first j whose suffix pairing
    // reaches `best` is j*, then k* is the first trough that does.
    std::vector<double> suffix_min(hi - lo + 1);
    suffix_min.back() = levels[hi];
    for (std::size_t t = hi; t-- > lo;) {
        suffix_min[t - lo] = std::min(levels[t], suffix_min[t - lo + 1]);
    }
    DrawdownStats out;
    out.mdd = best;
    out.convention = convention;
    for (std::size_t j = lo; j <= hi; ++j) {
        if (drawdown_value(levels[j], suffix_min[j - lo], convention) == best) {
            out.peak_index = j;
            for (std::size_t k = j; k <= hi; ++k) {
                if (drawdown_value(levels[j], levels[k], convention) == best) {
                    out.trough_index = k;
                    return out;
                }
            }
        }
    }
    throw std::logic_error("drawdown argmin not found");
}

DrawdownStats max_drawdown(std::span<const double> series, Convention convention,
                           std::optional<std::size_t> window) {
    const Series levels = drawdown_levels(series, convention);
    const std::size_t T = series.size();
    std::size_t lo = 0;
    if (window) {
        if (*window == 0 || *window > T) {
            throw InputError("drawdown window must lie in [1, " + std::to_string(T) + "]");
        }
        lo = T - *window;
    }
    return max_drawdown_on_levels(levels, convention, lo, T);
}

std::vector<std::pair<std::size_t, std::size_t>> annual_blocks(std::size_t periods,
                                                               int period_length) {
    if (period_length <= 0) throw InputError("period_length must be positive");
    const auto year = static_cast<std::size_t>(period_length);
    if (periods < year) {
        throw InputError("annual drawdown: series shorter than one year (" +
                         std::to_string(periods) + " < " + std::to_string(year) + " periods)");
    }
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::size_t start = 0;
    for (; start + year <= periods; start += year) blocks.emplace_back(start, start + year);
    const std::size_t rest = periods - start;
    if (rest > 0 && 2 * rest >= year) blocks.emplace_back(start, periods);
    return blocks;
}

AnnualDrawdown average_annual_drawdown_on_levels(std::span<const double> levels,
                                                 int period_length, Convention convention) {
    if (levels.size() < 2) throw InputError("empty series");
    AnnualDrawdown out;
    for (const auto& [lo, hi] : annual_blocks(levels.size() - 1, period_length)) {
        out.blocks.push_back(max_drawdown_on_levels(levels, convention, lo, hi));
        out.ald += out.blocks.back().mdd;
    }
    out.ald /= static_cast<double>(out.blocks.size());
    return out;
}

AnnualDrawdown average_annual_drawdown(std::span<const double> series, int period_length,
                                       Convention convention) {
    return average_annual_drawdown_on_levels(drawdown_levels(series, convention),
                                             period_length, convention);
}

}  // namespace eulerperf
