#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "eulerperf/core_stats.hpp"
#include "eulerperf/marginals.hpp"

namespace eulerperf {

// Reserved CSV columns.
inline constexpr const char* kBenchmarkColumn = "__benchmark__";
inline constexpr const char* kMarketColumn = "__market__";
inline constexpr const char* kRiskFreeColumn = "__riskfree__";

struct PanelOptions {
    int period_length = 12;
    // Per-period rate applied when the file has no __riskfree__ column.
    std::optional<double> risk_free;
};

/// Reads `date,<asset_id>,...` return panels. Dates are ISO-8601 calendar
/// dates in strictly increasing order; cells are decimal returns. Errors carry
/// the 1-based file row and column.
AssetPanel parse_panel_csv(std::istream& in, const PanelOptions& options = {});
AssetPanel load_panel(const std::filesystem::path& path, const PanelOptions& options = {});

struct MomentDocument {
    MomentSpec spec;
    std::optional<std::vector<double>> weights;
    std::vector<std::string> warnings;
};

// Tolerance on |sum(weights) - 1| for weights read from files, whose
// percentages are usually rounded; accepted weights are rescaled to sum to 1.
inline constexpr double kFileWeightTolerance = 1e-3;

/// Parses a moment document and checks it has what `kind` needs. Throws
/// ValidationError listing every missing or malformed field.
MomentDocument parse_moments_json(const std::string& text, const RatioKind& kind);
MomentDocument load_moments(const std::filesystem::path& path, const RatioKind& kind);

// Same tolerance and rescaling as file weights.
std::vector<double> checked_weights(std::vector<double> weights, std::size_t n,
                                    std::vector<std::string>* warnings = nullptr);

}  // namespace eulerperf
