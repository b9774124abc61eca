#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eulerperf/decomposition.hpp"
#include "eulerperf/optimizer.hpp"

namespace eulerperf {

enum class OutputFormat { Table, Csv, Json };

std::optional<OutputFormat> parse_format(std::string_view name);

// Ratios print with 4 decimals and percentages with 2 in table and csv
// output; json keeps full precision, with non-finite values as null.
std::string render_report(const DecompositionReport& report, OutputFormat format);
std::string render_optimization(const OptimizationResult& result, OutputFormat format);

struct RatioSummary {
    RatioKind kind;
    double portfolio_ratio = 0.0;
    double portfolio_numerator = 0.0;
    double portfolio_denominator = 0.0;
    std::vector<std::string> warnings;
};
std::string render_value(const RatioSummary& summary, OutputFormat format);

struct InclusionRow {
    std::string asset_id;
    double asset_ratio = 0.0;
    double diversification = 0.0;
    std::optional<InclusionVerdict> verdict;  // empty when D_i is undefined
};
std::string render_inclusion(const RatioKind& kind, double portfolio_ratio,
                             const std::vector<InclusionRow>& rows, OutputFormat format);

// JSON round trip for decomposition reports.
std::string report_to_json(const DecompositionReport& report);
DecompositionReport report_from_json(const std::string& text);

}  // namespace eulerperf
