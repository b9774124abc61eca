// Command-line front end: value | decompose | include | optimize.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eulerperf/core_stats.hpp"
#include "eulerperf/decomposition.hpp"
#include "eulerperf/errors.hpp"
#include "eulerperf/io.hpp"
#include "eulerperf/marginals.hpp"
#include "eulerperf/optimizer.hpp"
#include "eulerperf/report.hpp"

namespace {

using namespace eulerperf;

enum class InputMode { Series, Moments, Report };

struct RunRequest {
    std::string command;
    std::string kind_name = "sharpe";
    std::string input_path;
    std::string mode_name = "series";
    std::vector<double> weights;
    std::string format_name = "table";
    std::optional<std::size_t> window;
    std::string convention_name = "arithmetic";
    std::uint64_t seed = 0;
    std::optional<double> risk_free;
    int periods_per_year = 12;
    std::vector<std::string> candidates;
    bool oracle = false;
    OptimizerConfig config;
};

struct Failure {
    int code;
    std::string category;
    std::string message;
};

constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitInternal = 4;

void emit_error(const Failure& f) {
    nlohmann::ordered_json line;
    line["error"] = f.category;
    line["message"] = f.message;
    std::cerr << line.dump() << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RatioKind make_kind(const RunRequest& req) {
    RatioKind kind;
    const auto ratio = parse_ratio(req.kind_name);
    if (!ratio) throw InputError("unknown ratio kind '" + req.kind_name + "'");
    kind.ratio = *ratio;
    const auto conv = parse_convention(req.convention_name);
    if (!conv) throw InputError("unknown drawdown convention '" + req.convention_name + "'");
    kind.mdd_convention = *conv;
    kind.window = req.window;
    return kind;
}

InputMode make_mode(const RunRequest& req) {
    if (req.mode_name == "series") return InputMode::Series;
    if (req.mode_name == "moments") return InputMode::Moments;
    if (req.mode_name == "report") return InputMode::Report;
    throw InputError("unknown input mode '" + req.mode_name + "'");
}

std::vector<double> series_weights(const RunRequest& req, const AssetPanel& panel,
                                   std::vector<std::string>& warnings) {
    if (req.weights.empty()) return std::vector<double>(panel.num_assets(), 1.0 / panel.num_assets());
    return checked_weights(req.weights, panel.num_assets(), &warnings);
}

std::vector<double> moment_weights(const RunRequest& req, MomentDocument& doc) {
    if (!req.weights.empty()) return checked_weights(req.weights, doc.spec.size(), &doc.warnings);
    if (doc.weights) return *doc.weights;
    throw ValidationError({"weights: required in moments mode (file or --weights)"});
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
    to.insert(to.end(), from.begin(), from.end());
}

// Decomposition for value, decompose and include.
DecompositionReport build_report(const RunRequest& req, const RatioKind& kind, InputMode mode) {
    if (mode == InputMode::Report) {
        if (req.command != "decompose") throw InputError("report input is only read by decompose");
        return report_from_json(read_file(req.input_path));
    }
    if (mode == InputMode::Moments) {
        MomentDocument doc = load_moments(req.input_path, kind);
        if (req.risk_free) doc.spec.risk_free = *req.risk_free;
        const auto w = moment_weights(req, doc);
        DecompositionReport report = decompose(kind, doc.spec, w);
        std::vector<std::string> warnings = doc.warnings;
        append(warnings, report.warnings);
        report.warnings = std::move(warnings);
        return report;
    }
    PanelOptions options;
    options.period_length = req.periods_per_year;
    options.risk_free = req.risk_free;
    const AssetPanel panel = load_panel(req.input_path, options);
    std::vector<std::string> warnings;
    const auto w = series_weights(req, panel, warnings);
    DecompositionReport report = decompose(kind, panel, w);
    append(warnings, report.warnings);
    report.warnings = std::move(warnings);
    return report;
}

std::string run_include(const RunRequest& req, const DecompositionReport& report,
                        OutputFormat format) {
    std::vector<InclusionRow> rows;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& r = report.rows[i];
        if (!req.candidates.empty() &&
            std::find(req.candidates.begin(), req.candidates.end(), r.asset_id) ==
                req.candidates.end()) {
            continue;
        }
        InclusionRow row{r.asset_id, r.asset_ratio, r.diversification, std::nullopt};
        try {
            row.verdict = inclusion_test(report, i);
        } catch (const InputError&) {
        }
        rows.push_back(std::move(row));
    }
    for (const auto& id : req.candidates) {
        const bool found = std::any_of(rows.begin(), rows.end(),
                                       [&](const InclusionRow& r) { return r.asset_id == id; });
        if (!found) throw InputError("unknown candidate '" + id + "'");
    }
    return render_inclusion(report.kind, report.portfolio_ratio, rows, format);
}

std::string run_optimize(const RunRequest& req, const RatioKind& kind, InputMode mode,
                         OutputFormat format) {
    OptimizerConfig config = req.config;
    config.seed = req.seed;
    config.validate();
    OptimizationResult result;
    std::vector<std::string> warnings;
    if (mode == InputMode::Moments) {
        MomentDocument doc = load_moments(req.input_path, kind);
        if (req.risk_free) doc.spec.risk_free = *req.risk_free;
        warnings = doc.warnings;
        result = req.oracle ? grid_oracle(kind, doc.spec, config.grid_step)
                            : maximize_ratio(kind, doc.spec, config);
    } else if (mode == InputMode::Series) {
        PanelOptions options;
        options.period_length = req.periods_per_year;
        options.risk_free = req.risk_free;
        const AssetPanel panel = load_panel(req.input_path, options);
        result = req.oracle ? grid_oracle(kind, panel, config.grid_step)
                            : maximize_ratio(kind, panel, config);
    } else {
        throw InputError("report input is only read by decompose");
    }
    append(warnings, result.decomposition.warnings);
    result.decomposition.warnings = std::move(warnings);
    return render_optimization(result, format);
}

std::string run(const RunRequest& req) {
    const RatioKind kind = make_kind(req);
    const InputMode mode = make_mode(req);
    const auto format = parse_format(req.format_name);
    if (!format) throw InputError("unknown output format '" + req.format_name + "'");

    if (req.command == "optimize") return run_optimize(req, kind, mode, *format);

    const DecompositionReport report = build_report(req, kind, mode);
    if (req.command == "decompose") return render_report(report, *format);
    if (req.command == "include") return run_include(req, report, *format);
    RatioSummary summary{report.kind, report.portfolio_ratio, report.portfolio_numerator,
                         report.portfolio_denominator, report.warnings};
    return render_value(summary, *format);
}

void add_common(CLI::App& cmd, RunRequest& req) {
    cmd.add_option("--kind", req.kind_name,
                   "sharpe, sortino, information, treynor, recovery, calmar or sterling")
        ->capture_default_str();
    cmd.add_option("--input", req.input_path, "Return panel (csv) or moment document (json)")
        ->required();
    cmd.add_option("--mode", req.mode_name, "series, moments or report")->capture_default_str();
    cmd.add_option("--format", req.format_name, "table, csv or json")->capture_default_str();
    cmd.add_option("--window", req.window, "Calmar look-back in periods");
    cmd.add_option("--mdd-convention", req.convention_name, "arithmetic or geometric")
        ->capture_default_str();
    cmd.add_option("--risk-free", req.risk_free,
                   "Risk-free rate: per period in series mode, annual in moments mode");
    cmd.add_option("--periods-per-year", req.periods_per_year, "Return periods per year")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler decomposition of portfolio performance ratios"};
    app.require_subcommand(1);
    RunRequest req;

    const std::pair<const char*, const char*> commands[] = {
        {"value", "Portfolio ratio, numerator and denominator"},
        {"decompose", "Per-asset decomposition of the ratio"},
        {"include", "Whether each asset raises the ratio"},
        {"optimize", "Maximize the ratio over long-only weights"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(*cmd, req);
        cmd->callback([&req, name = std::string(name)] { req.command = name; });
        if (std::string(name) != "optimize") {
            cmd->add_option("--weights", req.weights, "Comma-separated weights w1,w2,...")
                ->delimiter(',');
        }
        if (std::string(name) == "include") {
            cmd->add_option("--candidate", req.candidates, "Asset id to test (repeatable)");
        }
        if (std::string(name) == "optimize") {
            cmd->add_option("--seed", req.seed, "Seed for random restarts")->capture_default_str();
            cmd->add_option("--restarts", req.config.restarts)->capture_default_str();
            cmd->add_option("--max-iterations", req.config.max_iterations)->capture_default_str();
            cmd->add_option("--tolerance", req.config.tolerance)->capture_default_str();
            cmd->add_option("--grid-step", req.config.grid_step)->capture_default_str();
            cmd->add_flag("--oracle", req.oracle, "Exhaustive grid search instead (n <= 4)");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error({kExitInput, "usage", e.what()});
        return kExitInput;
    }

    Failure failure{0, "", ""};
    try {
        std::cout << run(req);
        return 0;
    } catch (const ParseError& e) {
        failure = {kExitInput, "parse", e.what()};
    } catch (const ValidationError& e) {
        failure = {kExitInput, "validation", e.what()};
    } catch (const InputError& e) {
        failure = {kExitInput, "input", e.what()};
    } catch (const DegenerateError& e) {
        failure = {kExitDegenerate, "degenerate", e.what()};
    } catch (const std::exception& e) {
        failure = {kExitInternal, "internal", e.what()};
    }
    emit_error(failure);
    return failure.code;
}
