#include "eulerperf/marginals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "eulerperf/errors.hpp"

namespace eulerperf {

namespace {

void check_weights(std::size_t n, std::span<const double> w) {
    if (w.size() != n) {
        throw InputError("weights: expected " + std::to_string(n) + " entries, got " +
                         std::to_string(w.size()));
    }
}

Series excess_portfolio(const AssetPanel& panel, std::span<const double> w) {
    return portfolio_series(panel, w, Convention::Arithmetic, ReturnBasis::Excess);
}

const Series& require_market(const AssetPanel& panel) {
    if (!panel.market()) throw InputError("Treynor ratio requires a market series");
    return *panel.market();
}

// Benchmark shifted by the risk-free rate so that it lines up with excess
// asset returns; r_p - r_b is unchanged on the simplex.
Series excess_benchmark(const AssetPanel& panel) {
    if (!panel.benchmark()) throw InputError("Information ratio requires a benchmark series");
    Series b = *panel.benchmark();
    const auto rf = panel.risk_free();
    for (std::size_t t = 0; t < b.size(); ++t) b[t] -= rf[t];
    return b;
}

Series active_series(std::span<const double> x, std::span<const double> b) {
    Series a(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) a[t] = x[t] - b[t];
    return a;
}

std::size_t drawdown_start(const RatioKind& kind, const AssetPanel& panel) {
    if (kind.ratio != Ratio::Calmar) return 0;
    const std::size_t window = kind.calmar_window(panel.period_length());
    const std::size_t T = panel.num_periods();
    if (window == 0 || window > T) {
        throw InputError("Calmar ratio needs at least " + std::to_string(window) +
                         " periods, panel has " + std::to_string(T));
    }
    return T - window;
}

std::vector<Series> asset_levels(const AssetPanel& panel, Convention convention) {
    std::vector<Series> out;
    out.reserve(panel.num_assets());
    for (std::size_t i = 0; i < panel.num_assets(); ++i) {
        out.push_back(drawdown_levels(panel.excess_returns(i), convention));
    }
    return out;
}

Series combine_levels(const std::vector<Series>& levels, std::span<const double> w) {
    Series out(levels.front().size(), 0.0);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += w[i] * levels[i][t];
    }
    return out;
}

// Gradient of the drawdown between levels j and k with respect to each weight.
void accumulate_pair_gradient(const std::vector<Series>& levels, const Series& portfolio,
                              const DrawdownStats& stats, double scale,
                              std::vector<double>& out) {
    const std::size_t j = stats.peak_index;
    const std::size_t k = stats.trough_index;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        double g;
        if (stats.convention == Convention::Arithmetic) {
            g = levels[i][j] - levels[i][k];
        } else {
            // -d/dw_i (V_k / V_j - 1) with V = sum_i w_i (1 + cr_i)
            const double vj = portfolio[j];
            const double vk = portfolio[k];
            g = levels[i][j] * vk / (vj * vj) - levels[i][k] / vj;
        }
        out[i] += scale * g;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

std::string_view to_string(Ratio ratio) {
    switch (ratio) {
        case Ratio::Sharpe: return "sharpe";
        case Ratio::Sortino: return "sortino";
        case Ratio::Information: return "information";
        case Ratio::Treynor: return "treynor";
        case Ratio::Recovery: return "recovery";
        case Ratio::Calmar: return "calmar";
        case Ratio::Sterling: return "sterling";
    }
    return "unknown";
}

std::optional<Ratio> parse_ratio(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Ratio r : {Ratio::Sharpe, Ratio::Sortino, Ratio::Information, Ratio::Treynor,
                    Ratio::Recovery, Ratio::Calmar, Ratio::Sterling}) {
        if (lower == to_string(r)) return r;
    }
    return std::nullopt;
}

std::string_view to_string(Convention convention) {
    return convention == Convention::Arithmetic ? "arithmetic" : "geometric";
}

std::optional<Convention> parse_convention(std::string_view name) {
    if (name == "arithmetic") return Convention::Arithmetic;
    if (name == "geometric") return Convention::Geometric;
    return std::nullopt;
}

std::vector<double> volatility_marginal(const AssetPanel& panel, std::span<const double> w) {
    check_weights(panel.num_assets(), w);
    const Series xp = excess_portfolio(panel, w);
    const int P = panel.period_length();
    const double sigma_p = volatility(xp, P);
    if (!(sigma_p > 0.0)) throw DegenerateError("zero portfolio volatility");
    std::vector<double> out(panel.num_assets());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = sample_covariance(panel.excess_returns(i), xp) * P / sigma_p;
    }
    return out;
}

std::vector<double> volatility_marginal(const MomentSpec& spec, std::span<const double> w) {
    check_weights(spec.size(), w);
    if (spec.volatility.size() != spec.size()) {
        throw InputError("volatility marginal needs per-asset volatilities");
    }
    std::vector<double> out(spec.size());
    if (spec.corr_matrix) {
        const Matrix cov = covariance_from_correlation(*spec.corr_matrix, spec.volatility);
        std::vector<double> cw(spec.size(), 0.0);
        for (std::size_t i = 0; i < spec.size(); ++i) cw[i] = dot(cov[i], w);
        const double var_p = dot(w, cw);
        if (!(var_p > 0.0)) throw DegenerateError("zero portfolio volatility");
        const double sigma_p = std::sqrt(var_p);
        for (std::size_t i = 0; i < spec.size(); ++i) out[i] = cw[i] / sigma_p;
        return out;
    }
    if (!spec.corr_with_portfolio) {
        throw InputError("volatility marginal needs corr_with_portfolio or corr_matrix");
    }
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out[i] = (*spec.corr_with_portfolio)[i] * spec.volatility[i];
    }
    if (!(dot(w, out) > 0.0)) throw DegenerateError("zero portfolio volatility");
    return out;
}

std::vector<double> tsd_marginal(const AssetPanel& panel, std::span<const double> w) {
    check_weights(panel.num_assets(), w);
    const Series xp = excess_portfolio(panel, w);
    const int P = panel.period_length();
    const double tsd_p = target_semideviation(xp, P);
    if (!(tsd_p > 0.0)) throw DegenerateError("zero downside deviation");
    const double scale = static_cast<double>(P) / static_cast<double>(xp.size()) / tsd_p;
    std::vector<double> out(panel.num_assets(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto xi = panel.excess_returns(i);
        double acc = 0.0;
        for (std::size_t t = 0; t < xp.size(); ++t) acc += std::min(xp[t], 0.0) * xi[t];
        out[i] = acc * scale;
    }
    return out;
}

std::vector<double> beta_marginal(const AssetPanel& panel) {
    const Series& market = require_market(panel);
    std::vector<double> out(panel.num_assets());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = beta(panel.excess_returns(i), market);
    return out;
}

TrackingMarginal tracking_marginal(const AssetPanel& panel, std::span<const double> w) {
    check_weights(panel.num_assets(), w);
    const Series b = excess_benchmark(panel);
    const int P = panel.period_length();
    const Series active = active_series(excess_portfolio(panel, w), b);
    TrackingMarginal out;
    out.tracking_error = volatility(active, P);
    if (!(out.tracking_error > 0.0)) throw DegenerateError("zero tracking error");
    out.per_asset.resize(panel.num_assets());
    out.asset_tracking.resize(panel.num_assets());
    for (std::size_t i = 0; i < panel.num_assets(); ++i) {
        const auto xi = panel.excess_returns(i);
        out.per_asset[i] = sample_covariance(xi, active) * P / out.tracking_error;
        out.asset_tracking[i] = volatility(active_series(xi, b), P);
    }
    return out;
}

DrawdownGradient mdd_gradient(const AssetPanel& panel, std::span<const double> w,
                              Convention convention, std::optional<std::size_t> window) {
    check_weights(panel.num_assets(), w);
    const std::size_t T = panel.num_periods();
    std::size_t lo = 0;
    if (window) {
        if (*window == 0 || *window > T) {
            throw InputError("drawdown window must lie in [1, " + std::to_string(T) + "]");
        }
        lo = T - *window;
    }
    const auto levels = asset_levels(panel, convention);
    const Series portfolio = combine_levels(levels, w);
    DrawdownGradient out;
    out.stats = max_drawdown_on_levels(portfolio, convention, lo, T);
    out.gradient.assign(panel.num_assets(), 0.0);
    if (out.stats.mdd == 0.0) {
        out.no_drawdown = true;
        return out;
    }
    accumulate_pair_gradient(levels, portfolio, out.stats, 1.0, out.gradient);
    return out;
}

AnnualDrawdownGradient ald_gradient(const AssetPanel& panel, std::span<const double> w,
                                    Convention convention) {
    check_weights(panel.num_assets(), w);
    const auto levels = asset_levels(panel, convention);
    const Series portfolio = combine_levels(levels, w);
    AnnualDrawdownGradient out;
    out.ald = average_annual_drawdown_on_levels(portfolio, panel.period_length(), convention);
    out.gradient.assign(panel.num_assets(), 0.0);
    const double scale = 1.0 / static_cast<double>(out.ald.blocks.size());
    for (const auto& block : out.ald.blocks) {
        // a flat block contributes nothing
        if (block.mdd == 0.0) continue;
        accumulate_pair_gradient(levels, portfolio, block, scale, out.gradient);
    }
    out.no_drawdown = out.ald.ald == 0.0;
    return out;
}

double risk_measure(const RatioKind& kind, const AssetPanel& panel, std::span<const double> w) {
    check_weights(panel.num_assets(), w);
    const int P = panel.period_length();
    switch (kind.ratio) {
        case Ratio::Sharpe: return volatility(excess_portfolio(panel, w), P);
        case Ratio::Sortino: return target_semideviation(excess_portfolio(panel, w), P);
        case Ratio::Information:
            return volatility(active_series(excess_portfolio(panel, w), excess_benchmark(panel)),
                              P);
        case Ratio::Treynor: return beta(excess_portfolio(panel, w), require_market(panel));
        case Ratio::Recovery:
        case Ratio::Calmar: {
            const std::size_t lo = drawdown_start(kind, panel);
            const Series levels =
                portfolio_levels(panel, w, kind.mdd_convention, ReturnBasis::Excess);
            return max_drawdown_on_levels(levels, kind.mdd_convention, lo, panel.num_periods())
                .mdd;
        }
        case Ratio::Sterling: {
            const Series levels =
                portfolio_levels(panel, w, kind.mdd_convention, ReturnBasis::Excess);
            return average_annual_drawdown_on_levels(levels, P, kind.mdd_convention).ald;
        }
    }
    throw InputError("unknown ratio kind");
}

std::vector<double> asset_risk_measures(const RatioKind& kind, const AssetPanel& panel) {
    std::vector<double> out(panel.num_assets());
    std::vector<double> unit(panel.num_assets(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        unit[i] = 1.0;
        out[i] = risk_measure(kind, panel, unit);
        unit[i] = 0.0;
    }
    return out;
}

MarginalSensitivity marginal_sensitivity(const RatioKind& kind, const AssetPanel& panel,
                                         std::span<const double> w) {
    check_weights(panel.num_assets(), w);
    MarginalSensitivity out;
    out.degree_one = kind.degree_one();
    switch (kind.ratio) {
        case Ratio::Sharpe:
            out.per_asset = volatility_marginal(panel, w);
            out.denominator_value = volatility(excess_portfolio(panel, w), panel.period_length());
            break;
        case Ratio::Sortino:
            out.per_asset = tsd_marginal(panel, w);
            out.denominator_value =
                target_semideviation(excess_portfolio(panel, w), panel.period_length());
            break;
        case Ratio::Information: {
            auto tracking = tracking_marginal(panel, w);
            out.per_asset = std::move(tracking.per_asset);
            out.denominator_value = tracking.tracking_error;
            out.per_asset_denominator = std::move(tracking.asset_tracking);
            break;
        }
        case Ratio::Treynor:
            out.per_asset = beta_marginal(panel);
            out.denominator_value = beta(excess_portfolio(panel, w), require_market(panel));
            break;
        case Ratio::Recovery:
        case Ratio::Calmar: {
            std::optional<std::size_t> window;
            if (kind.ratio == Ratio::Calmar) {
                window = panel.num_periods() - drawdown_start(kind, panel);
            }
            auto grad = mdd_gradient(panel, w, kind.mdd_convention, window);
            out.per_asset = std::move(grad.gradient);
            out.denominator_value = grad.stats.mdd;
            if (grad.no_drawdown) out.warnings.emplace_back("no drawdown");
            break;
        }
        case Ratio::Sterling: {
            auto grad = ald_gradient(panel, w, kind.mdd_convention);
            out.per_asset = std::move(grad.gradient);
            out.denominator_value = grad.ald.ald;
            if (grad.no_drawdown) out.warnings.emplace_back("no drawdown");
            break;
        }
    }
    if (out.per_asset_denominator.empty()) out.per_asset_denominator = asset_risk_measures(kind, panel);

    out.euler_residual = std::abs(dot(w, out.per_asset) - out.denominator_value);
    double magnitude = std::abs(out.denominator_value);
    for (std::size_t i = 0; i < w.size(); ++i) {
        magnitude = std::max(magnitude, std::abs(w[i] * out.per_asset[i]));
    }
    if (out.degree_one && out.euler_residual > kEulerRelativeTolerance * magnitude) {
        std::ostringstream msg;
        msg.precision(17);
        msg << to_string(kind.ratio) << ": weighted marginals sum to "
            << dot(w, out.per_asset) << " but the denominator is " << out.denominator_value;
        throw EulerCheckError(msg.str());
    }
    return out;
}

MarginalSensitivity marginal_sensitivity(const RatioKind& kind, const MomentSpec& spec,
                                         std::span<const double> w) {
    check_weights(spec.size(), w);
    MarginalSensitivity out;
    out.degree_one = kind.degree_one();
    if (kind.ratio == Ratio::Sharpe && spec.has_correlation()) {
        out.per_asset = volatility_marginal(spec, w);
        out.per_asset_denominator = spec.volatility;
        out.denominator_value = dot(w, out.per_asset);
        out.euler_residual = 0.0;
        if (spec.corr_matrix) {
            const Matrix cov = covariance_from_correlation(*spec.corr_matrix, spec.volatility);
            double var_p = 0.0;
            for (std::size_t i = 0; i < spec.size(); ++i) var_p += w[i] * dot(cov[i], w);
            out.denominator_value = std::sqrt(var_p);
            out.euler_residual = std::abs(dot(w, out.per_asset) - out.denominator_value);
            if (out.euler_residual > kEulerRelativeTolerance * out.denominator_value) {
                throw EulerCheckError("sharpe: volatility marginals do not reconstruct sigma_p");
            }
        }
        return out;
    }
    if (!spec.has_supplied_marginals()) {
        throw InputError(std::string(to_string(kind.ratio)) +
                         " ratio in moment mode requires per-asset risk measures and "
                         "marginal sensitivities");
    }
    out.per_asset = *spec.marginal_sensitivity;
    out.per_asset_denominator = *spec.asset_denominator;
    out.denominator_value = dot(w, out.per_asset);
    out.euler_residual = 0.0;
    if (spec.portfolio_denominator) {
        const double supplied = *spec.portfolio_denominator;
        const double gap = std::abs(out.denominator_value - supplied);
        if (gap > 1e-4 * std::abs(supplied)) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "supplied marginals reconstruct a portfolio risk of " << out.denominator_value
                << " but the stated portfolio value is " << supplied;
            out.warnings.push_back(msg.str());
        }
    }
    return out;
}

}  // namespace eulerperf
