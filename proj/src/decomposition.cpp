#include "eulerperf/decomposition.hpp"

#include <cmath>
#include <limits>

#include "eulerperf/errors.hpp"

namespace eulerperf {

namespace {

double weighted_sum(std::span<const double> w, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * v[i];
    return acc;
}

void check_weights(std::size_t n, std::span<const double> w) {
    if (w.size() != n) {
        throw InputError("weights: expected " + std::to_string(n) + " entries, got " +
                         std::to_string(w.size()));
    }
}

std::vector<std::string> ids_or_default(const std::vector<std::string>& ids, std::size_t n) {
    if (ids.size() == n) return ids;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("asset" + std::to_string(i + 1));
    return out;
}

double positive_or_throw(double denominator) {
    if (!(denominator > 0.0) || !std::isfinite(denominator)) {
        throw DegenerateError("degenerate risk measure");
    }
    return denominator;
}

}  // namespace

std::vector<double> asset_numerators(const RatioKind& kind, const AssetPanel& panel) {
    const double P = panel.period_length();
    std::vector<double> out(panel.num_assets());
    if (kind.ratio == Ratio::Information) {
        if (!panel.benchmark()) throw InputError("Information ratio requires a benchmark series");
        const Series& b = *panel.benchmark();
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto r = panel.returns(i);
            double acc = 0.0;
            for (std::size_t t = 0; t < r.size(); ++t) acc += r[t] - b[t];
            out[i] = acc / static_cast<double>(r.size()) * P;
        }
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mean(panel.excess_returns(i)) * P;
    return out;
}

std::vector<double> asset_numerators(const RatioKind& /*kind*/, const MomentSpec& spec) {
    std::vector<double> out(spec.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.expected_return[i] - spec.risk_free;
    return out;
}

double ratio_value(const RatioKind& kind, const AssetPanel& panel, std::span<const double> w) {
    check_weights(panel.num_assets(), w);
    const double f = positive_or_throw(risk_measure(kind, panel, w));
    return weighted_sum(w, asset_numerators(kind, panel)) / f;
}

double ratio_value(const RatioKind& kind, const MomentSpec& spec, std::span<const double> w) {
    check_weights(spec.size(), w);
    const double f = positive_or_throw(marginal_sensitivity(kind, spec, w).denominator_value);
    return weighted_sum(w, asset_numerators(kind, spec)) / f;
}

DecompositionReport assemble_report(const RatioKind& kind, const std::vector<std::string>& ids,
                                    std::span<const double> w,
                                    std::span<const double> numerators,
                                    const MarginalSensitivity& marginals) {
    const std::size_t n = w.size();
    DecompositionReport report;
    report.kind = kind;
    report.warnings = marginals.warnings;
    report.portfolio_denominator = positive_or_throw(marginals.denominator_value);
    report.portfolio_numerator = weighted_sum(w, numerators);
    report.portfolio_ratio = report.portfolio_numerator / report.portfolio_denominator;

    const double f_p = report.portfolio_denominator;
    const auto names = ids_or_default(ids, n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        DecompositionRow row;
        row.asset_id = names[i];
        row.weight = w[i];
        row.asset_numerator = numerators[i];
        row.asset_denominator = marginals.per_asset_denominator[i];
        row.marginal_sensitivity = marginals.per_asset[i];
        row.risk_weight = w[i] * row.marginal_sensitivity / f_p;

        const bool risk_ok = row.asset_denominator > 0.0;
        const bool marginal_ok = row.marginal_sensitivity > 0.0;
        row.asset_ratio = risk_ok ? row.asset_numerator / row.asset_denominator
                                  : std::numeric_limits<double>::quiet_NaN();
        if (!risk_ok) row.flags.emplace_back(kFlagNonPositiveAssetRisk);
        if (row.marginal_sensitivity == 0.0) {
            row.flags.emplace_back(kFlagZeroMarginal);
        } else if (!marginal_ok) {
            row.flags.emplace_back(kFlagNonPositiveMarginal);
        }

        if (risk_ok && marginal_ok) {
            row.diversification = row.asset_denominator / row.marginal_sensitivity;
            row.component_ratio = row.diversification * row.asset_ratio;
            row.contribution = row.risk_weight * row.component_ratio;
        } else {
            // D_i has no meaning here; fall back to w_i R_i / f(p), which
            // never divides by f(i) and keeps the total exact.
            row.diversification = row.marginal_sensitivity == 0.0 && risk_ok
                                      ? std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::quiet_NaN();
            row.component_ratio = std::numeric_limits<double>::quiet_NaN();
            row.contribution = w[i] * row.asset_numerator / f_p;
        }
        total += row.contribution;
        report.risk_weight_sum += row.risk_weight;
        report.rows.push_back(std::move(row));
    }
    for (auto& row : report.rows) {
        row.relative_contribution = row.contribution / report.portfolio_ratio;
    }
    report.reconstruction_residual = std::abs(total - report.portfolio_ratio);
    return report;
}

DecompositionReport decompose(const RatioKind& kind, const AssetPanel& panel,
                              std::span<const double> w) {
    check_weights(panel.num_assets(), w);
    const MarginalSensitivity marginals = marginal_sensitivity(kind, panel, w);
    const auto numerators = asset_numerators(kind, panel);
    return assemble_report(kind, panel.asset_ids(), w, numerators, marginals);
}

DecompositionReport decompose(const RatioKind& kind, const MomentSpec& spec,
                              std::span<const double> w) {
    check_weights(spec.size(), w);
    const MarginalSensitivity marginals = marginal_sensitivity(kind, spec, w);
    const auto numerators = asset_numerators(kind, spec);
    return assemble_report(kind, spec.asset_ids, w, numerators, marginals);
}

CandidateStats CandidateStats::sharpe(double asset_sharpe, double corr_with_portfolio) {
    CandidateStats out;
    out.asset_ratio = asset_sharpe;
    out.diversification = 1.0 / corr_with_portfolio;
    return out;
}

InclusionVerdict inclusion_test(const CandidateStats& candidate, double portfolio_ratio) {
    const double d = candidate.diversification;
    if (!(d > 0.0) || std::isnan(d)) {
        throw InputError("inclusion test needs a positive diversification factor");
    }
    InclusionVerdict out;
    out.threshold = portfolio_ratio / d;
    out.margin = candidate.asset_ratio - out.threshold;
    // A candidate that is the whole portfolio: the limit theta -> 1 keeps it
    // whenever its component ratio is positive.
    if (candidate.risk_weight && std::abs(*candidate.risk_weight - 1.0) <= 1e-12) {
        out.include = d * candidate.asset_ratio > 0.0;
        return out;
    }
    out.include = candidate.asset_ratio >= out.threshold;
    return out;
}

InclusionVerdict inclusion_test(const DecompositionReport& report, std::size_t row) {
    const DecompositionRow& r = report.rows.at(row);
    if (!(r.diversification > 0.0) || !std::isfinite(r.diversification)) {
        throw InputError("inclusion test: asset '" + r.asset_id +
                         "' has no finite positive diversification factor");
    }
    CandidateStats candidate;
    candidate.asset_ratio = r.asset_ratio;
    candidate.diversification = r.diversification;
    candidate.risk_weight = r.risk_weight;
    return inclusion_test(candidate, report.portfolio_ratio);
}

}  // namespace eulerperf
