#include "eulerperf/report.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "eulerperf/errors.hpp"

namespace eulerperf {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kLabelWidth = 24;
constexpr int kCellWidth = 11;

std::string fixed(double value, int decimals) {
    if (!std::isfinite(value)) return std::isinf(value) && value > 0 ? "inf" : "n/a";
    std::ostringstream out;
    out << std::fixed << std::setprecision(decimals) << value;
    return out.str();
}

std::string ratio_text(double value) { return fixed(value, 4); }
std::string pct_number(double value) { return fixed(100.0 * value, 2); }
std::string pct_text(double value) {
    const std::string number = pct_number(value);
    return std::isfinite(value) ? number + "%" : number;
}

ojson number(double value) {
    if (!std::isfinite(value)) return nullptr;
    return value;
}

double read_number(const ojson& value) {
    if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return value.get<double>();
}

std::string ratio_title(const RatioKind& kind) {
    std::string name(to_string(kind.ratio));
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    return name;
}

ojson kind_to_json(const RatioKind& kind) {
    ojson out;
    out["ratio"] = std::string(to_string(kind.ratio));
    out["window"] = kind.window ? ojson(*kind.window) : ojson(nullptr);
    out["mdd_convention"] = std::string(to_string(kind.mdd_convention));
    return out;
}

RatioKind kind_from_json(const ojson& j) {
    RatioKind kind;
    const auto ratio = parse_ratio(j.at("ratio").get<std::string>());
    if (!ratio) throw InputError("report: unknown ratio kind");
    kind.ratio = *ratio;
    if (!j.at("window").is_null()) kind.window = j.at("window").get<std::size_t>();
    const auto conv = parse_convention(j.at("mdd_convention").get<std::string>());
    if (!conv) throw InputError("report: unknown drawdown convention");
    kind.mdd_convention = *conv;
    return kind;
}

ojson report_json(const DecompositionReport& report) {
    ojson out;
    out["kind"] = kind_to_json(report.kind);
    out["portfolio_ratio"] = number(report.portfolio_ratio);
    out["portfolio_numerator"] = number(report.portfolio_numerator);
    out["portfolio_denominator"] = number(report.portfolio_denominator);
    out["reconstruction_residual"] = number(report.reconstruction_residual);
    out["risk_weight_sum"] = number(report.risk_weight_sum);
    out["warnings"] = report.warnings;
    ojson rows = ojson::array();
    for (const auto& r : report.rows) {
        ojson row;
        row["asset_id"] = r.asset_id;
        row["weight"] = number(r.weight);
        row["asset_numerator"] = number(r.asset_numerator);
        row["asset_denominator"] = number(r.asset_denominator);
        row["marginal_sensitivity"] = number(r.marginal_sensitivity);
        row["asset_ratio"] = number(r.asset_ratio);
        row["diversification"] = number(r.diversification);
        row["component_ratio"] = number(r.component_ratio);
        row["risk_weight"] = number(r.risk_weight);
        row["contribution"] = number(r.contribution);
        row["relative_contribution"] = number(r.relative_contribution);
        row["flags"] = r.flags;
        rows.push_back(std::move(row));
    }
    out["rows"] = std::move(rows);
    return out;
}

DecompositionReport report_from(const ojson& j) {
    DecompositionReport report;
    report.kind = kind_from_json(j.at("kind"));
    report.portfolio_ratio = read_number(j.at("portfolio_ratio"));
    report.portfolio_numerator = read_number(j.at("portfolio_numerator"));
    report.portfolio_denominator = read_number(j.at("portfolio_denominator"));
    report.reconstruction_residual = read_number(j.at("reconstruction_residual"));
    report.risk_weight_sum = read_number(j.at("risk_weight_sum"));
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
        DecompositionRow row;
        row.asset_id = r.at("asset_id").get<std::string>();
        row.weight = read_number(r.at("weight"));
        row.asset_numerator = read_number(r.at("asset_numerator"));
        row.asset_denominator = read_number(r.at("asset_denominator"));
        row.marginal_sensitivity = read_number(r.at("marginal_sensitivity"));
        row.asset_ratio = read_number(r.at("asset_ratio"));
        row.diversification = read_number(r.at("diversification"));
        row.component_ratio = read_number(r.at("component_ratio"));
        row.risk_weight = read_number(r.at("risk_weight"));
        row.contribution = read_number(r.at("contribution"));
        row.relative_contribution = read_number(r.at("relative_contribution"));
        row.flags = r.at("flags").get<std::vector<std::string>>();
        report.rows.push_back(std::move(row));
    }
    return report;
}

double total_contribution(const DecompositionReport& report) {
    double total = 0.0;
    for (const auto& r : report.rows) total += r.contribution;
    return total;
}

double total_weight(const DecompositionReport& report) {
    double total = 0.0;
    for (const auto& r : report.rows) total += r.weight;
    return total;
}

double total_relative(const DecompositionReport& report) {
    double total = 0.0;
    for (const auto& r : report.rows) total += r.relative_contribution;
    return total;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

std::string denominator_text(const RatioKind& kind, double value) {
    // beta is not a percentage
    return kind.ratio == Ratio::Treynor ? ratio_text(value) : pct_text(value);
}

std::string report_table(const DecompositionReport& report) {
    std::ostringstream out;
    const auto& rows = report.rows;
    out << ratio_title(report.kind) << " ratio decomposition";
    if (report.kind.is_drawdown()) {
        out << " (" << to_string(report.kind.mdd_convention) << " drawdowns";
        if (report.kind.window) out << ", window " << *report.kind.window;
        out << ")";
    }
    out << "\n\n";
    out << std::left << std::setw(kLabelWidth) << "Portfolio return" << pct_text(report.portfolio_numerator)
        << "\n";
    out << std::setw(kLabelWidth) << "Portfolio risk"
        << denominator_text(report.kind, report.portfolio_denominator) << "\n";
    out << std::setw(kLabelWidth) << "Portfolio ratio" << ratio_text(report.portfolio_ratio)
        << "\n\n";

    auto line = [&](const std::string& label, auto cell, const std::string& total) {
        out << std::left << std::setw(kLabelWidth) << label << std::right;
        for (const auto& r : rows) out << std::setw(kCellWidth) << cell(r);
        out << std::setw(kCellWidth) << total << "\n";
    };
    line("Asset", [](const DecompositionRow& r) { return r.asset_id; }, "Total");
    line("Weight", [](const DecompositionRow& r) { return pct_text(r.weight); },
         pct_text(total_weight(report)));
    line("Asset Ratio", [](const DecompositionRow& r) { return ratio_text(r.asset_ratio); }, "");
    line("Diversification",
         [](const DecompositionRow& r) { return ratio_text(r.diversification); }, "");
    line("Component Ratio",
         [](const DecompositionRow& r) { return ratio_text(r.component_ratio); }, "");
    line("Risk Weight", [](const DecompositionRow& r) { return pct_text(r.risk_weight); },
         pct_text(report.risk_weight_sum));
    line("Contribution", [](const DecompositionRow& r) { return ratio_text(r.contribution); },
         ratio_text(total_contribution(report)));
    line("Relative Contribution",
         [](const DecompositionRow& r) { return pct_text(r.relative_contribution); },
         pct_text(total_relative(report)));

    for (const auto& r : rows) {
        for (const auto& flag : r.flags) out << "note: " << r.asset_id << ": " << flag << "\n";
    }
    for (const auto& w : report.warnings) out << "warning: " << w << "\n";
    return out.str();
}

std::string report_csv(const DecompositionReport& report) {
    std::ostringstream out;
    out << "asset_id,weight_pct,asset_ratio,diversification,component_ratio,risk_weight_pct,"
           "contribution,relative_contribution_pct,flags\n";
    for (const auto& r : report.rows) {
        out << r.asset_id << ',' << pct_number(r.weight) << ',' << ratio_text(r.asset_ratio) << ','
            << ratio_text(r.diversification) << ',' << ratio_text(r.component_ratio) << ','
            << pct_number(r.risk_weight) << ',' << ratio_text(r.contribution) << ','
            << pct_number(r.relative_contribution) << ',' << join(r.flags, ";") << '\n';
    }
    out << "TOTAL," << pct_number(total_weight(report)) << ",,,," << pct_number(report.risk_weight_sum)
        << ',' << ratio_text(total_contribution(report)) << ','
        << pct_number(total_relative(report)) << ',' << join(report.warnings, ";") << '\n';
    return out.str();
}

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view name) {
    if (name == "table") return OutputFormat::Table;
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    return std::nullopt;
}

std::string report_to_json(const DecompositionReport& report) {
    return report_json(report).dump(2) + "\n";
}

DecompositionReport report_from_json(const std::string& text) {
    try {
        return report_from(ojson::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("report: ") + e.what());
    }
}

std::string render_report(const DecompositionReport& report, OutputFormat format) {
    switch (format) {
        case OutputFormat::Table: return report_table(report);
        case OutputFormat::Csv: return report_csv(report);
        case OutputFormat::Json: return report_to_json(report);
    }
    return {};
}

std::string render_optimization(const OptimizationResult& result, OutputFormat format) {
    if (format == OutputFormat::Json) {
        ojson out;
        out["weights"] = result.weights;
        out["ratio"] = number(result.ratio);
        out["iterations"] = result.iterations;
        out["restarts_used"] = result.restarts_used;
        out["converged"] = result.converged;
        out["decomposition"] = report_json(result.decomposition);
        return out.dump(2) + "\n";
    }
    if (format == OutputFormat::Csv) return report_csv(result.decomposition);
    std::ostringstream out;
    out << "Optimal " << ratio_title(result.decomposition.kind) << " ratio "
        << ratio_text(result.ratio) << " (" << result.iterations << " iterations, "
        << result.restarts_used << " restarts, " << (result.converged ? "converged" : "not converged")
        << ")\n\n"
        << report_table(result.decomposition);
    return out.str();
}

std::string render_value(const RatioSummary& summary, OutputFormat format) {
    switch (format) {
        case OutputFormat::Json: {
            ojson out;
            out["kind"] = kind_to_json(summary.kind);
            out["portfolio_ratio"] = number(summary.portfolio_ratio);
            out["portfolio_numerator"] = number(summary.portfolio_numerator);
            out["portfolio_denominator"] = number(summary.portfolio_denominator);
            out["warnings"] = summary.warnings;
            return out.dump(2) + "\n";
        }
        case OutputFormat::Csv: {
            std::ostringstream out;
            out << "ratio,portfolio_ratio,portfolio_numerator_pct,portfolio_denominator\n"
                << to_string(summary.kind.ratio) << ',' << ratio_text(summary.portfolio_ratio) << ','
                << pct_number(summary.portfolio_numerator) << ','
                << ratio_text(summary.portfolio_denominator) << '\n';
            return out.str();
        }
        case OutputFormat::Table: {
            std::ostringstream out;
            out << std::left << std::setw(kLabelWidth) << "Portfolio return"
                << pct_text(summary.portfolio_numerator) << "\n"
                << std::setw(kLabelWidth) << "Portfolio risk"
                << denominator_text(summary.kind, summary.portfolio_denominator) << "\n"
                << std::setw(kLabelWidth) << (ratio_title(summary.kind) + " ratio")
                << ratio_text(summary.portfolio_ratio) << "\n";
            for (const auto& w : summary.warnings) out << "warning: " << w << "\n";
            return out.str();
        }
    }
    return {};
}

std::string render_inclusion(const RatioKind& kind, double portfolio_ratio,
                             const std::vector<InclusionRow>& rows, OutputFormat format) {
    if (format == OutputFormat::Json) {
        ojson out;
        out["kind"] = kind_to_json(kind);
        out["portfolio_ratio"] = number(portfolio_ratio);
        ojson list = ojson::array();
        for (const auto& r : rows) {
            ojson row;
            row["asset_id"] = r.asset_id;
            row["asset_ratio"] = number(r.asset_ratio);
            row["diversification"] = number(r.diversification);
            if (r.verdict) {
                row["threshold"] = number(r.verdict->threshold);
                row["margin"] = number(r.verdict->margin);
                row["include"] = r.verdict->include;
            } else {
                row["threshold"] = nullptr;
                row["margin"] = nullptr;
                row["include"] = nullptr;
            }
            list.push_back(std::move(row));
        }
        out["candidates"] = std::move(list);
        return out.dump(2) + "\n";
    }
    std::ostringstream out;
    if (format == OutputFormat::Csv) {
        out << "asset_id,asset_ratio,diversification,threshold,margin,include\n";
        for (const auto& r : rows) {
            out << r.asset_id << ',' << ratio_text(r.asset_ratio) << ','
                << ratio_text(r.diversification) << ',';
            if (r.verdict) {
                out << ratio_text(r.verdict->threshold) << ',' << ratio_text(r.verdict->margin) << ','
                    << (r.verdict->include ? "true" : "false") << '\n';
            } else {
                out << ",,undefined\n";
            }
        }
        return out.str();
    }
    out << ratio_title(kind) << " ratio of the portfolio: " << ratio_text(portfolio_ratio) << "\n\n"
        << std::left << std::setw(kLabelWidth / 2) << "Asset" << std::right
        << std::setw(kCellWidth) << "Ratio" << std::setw(kCellWidth) << "Divers."
        << std::setw(kCellWidth) << "Threshold" << std::setw(kCellWidth) << "Margin"
        << std::setw(kCellWidth) << "Include" << "\n";
    for (const auto& r : rows) {
        out << std::left << std::setw(kLabelWidth / 2) << r.asset_id << std::right
            << std::setw(kCellWidth) << ratio_text(r.asset_ratio) << std::setw(kCellWidth)
            << ratio_text(r.diversification);
        if (r.verdict) {
            out << std::setw(kCellWidth) << ratio_text(r.verdict->threshold)
                << std::setw(kCellWidth) << ratio_text(r.verdict->margin)
                << std::setw(kCellWidth) << (r.verdict->include ? "yes" : "no") << "\n";
        } else {
            out << std::setw(kCellWidth * 3) << "undefined" << "\n";
        }
    }
    return out.str();
}

}  // namespace eulerperf
