#include "eulerperf/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eulerperf/errors.hpp"

namespace eulerperf {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    const std::chrono::year_month_day date{std::chrono::year{std::stoi(s.substr(0, 4))},
                                           std::chrono::month{static_cast<unsigned>(
                                               std::stoi(s.substr(5, 2)))},
                                           std::chrono::day{static_cast<unsigned>(
                                               std::stoi(s.substr(8, 2)))}};
    return date.ok();
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t column) {
    if (cell.empty()) throw ParseError(row, column, "missing value");
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError(row, column, "non-numeric value '" + cell + "'");
    }
    return value;
}

}  // namespace

AssetPanel parse_panel_csv(std::istream& in, const PanelOptions& options) {
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++row;
        if (!trim(line).empty()) header = split_row(line);
    }
    if (header.empty()) throw ParseError(1, 1, "empty file");
    if (header.front() != "date") throw ParseError(row, 1, "first column must be 'date'");
    const std::size_t header_row = row;

    std::vector<std::string> ids;
    std::vector<std::size_t> asset_columns;
    std::optional<std::size_t> benchmark_col, market_col, riskfree_col;
    std::set<std::string> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name.empty()) throw ParseError(header_row, c + 1, "empty column name");
        if (!seen.insert(name).second) {
            throw ParseError(header_row, c + 1, "duplicate column '" + name + "'");
        }
        if (name == kBenchmarkColumn) {
            benchmark_col = c;
        } else if (name == kMarketColumn) {
            market_col = c;
        } else if (name == kRiskFreeColumn) {
            riskfree_col = c;
        } else if (name.size() >= 4 && name.starts_with("__") && name.ends_with("__")) {
            throw ParseError(header_row, c + 1, "unknown reserved column '" + name + "'");
        } else {
            ids.push_back(name);
            asset_columns.push_back(c);
        }
    }
    if (ids.empty()) throw ParseError(header_row, 2, "no asset columns");

    std::vector<Series> columns(header.size());
    std::string previous_date;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        if (cells.size() != header.size()) {
            throw ParseError(row, std::min(cells.size(), header.size()) + 1,
                             "expected " + std::to_string(header.size()) + " cells, found " +
                                 std::to_string(cells.size()));
        }
        if (!valid_iso_date(cells[0])) {
            throw ParseError(row, 1, "invalid ISO-8601 date '" + cells[0] + "'");
        }
        if (!previous_date.empty() && cells[0] <= previous_date) {
            throw ParseError(row, 1, "date '" + cells[0] + "' does not increase");
        }
        previous_date = cells[0];
        for (std::size_t c = 1; c < cells.size(); ++c) {
            columns[c].push_back(parse_cell(cells[c], row, c + 1));
        }
    }

    std::vector<Series> returns;
    for (std::size_t c : asset_columns) returns.push_back(std::move(columns[c]));
    std::optional<Series> benchmark, market;
    if (benchmark_col) benchmark = std::move(columns[*benchmark_col]);
    if (market_col) market = std::move(columns[*market_col]);
    if (riskfree_col) {
        if (options.risk_free) {
            throw InputError("risk-free rate given both as a column and as an option");
        }
        return AssetPanel(std::move(ids), std::move(returns), options.period_length,
                          std::move(benchmark), std::move(market),
                          std::move(columns[*riskfree_col]));
    }
    return AssetPanel(std::move(ids), std::move(returns), options.period_length,
                      std::move(benchmark), std::move(market), options.risk_free.value_or(0.0));
}

AssetPanel load_panel(const std::filesystem::path& path, const PanelOptions& options) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return parse_panel_csv(in, options);
}

std::vector<double> checked_weights(std::vector<double> weights, std::size_t n,
                                    std::vector<std::string>* warnings) {
    if (weights.size() != n) {
        throw ValidationError({"weights: expected " + std::to_string(n) + " entries, got " +
                               std::to_string(weights.size())});
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) throw ValidationError({"weights: entries must be finite"});
        sum += w;
    }
    if (std::abs(sum - 1.0) > kFileWeightTolerance) {
        std::ostringstream msg;
        msg << "weights: sum is " << sum << ", expected 1";
        throw ValidationError({msg.str()});
    }
    if (sum != 1.0) {
        for (double& w : weights) w /= sum;
        if (warnings && std::abs(sum - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg.precision(10);
            msg << "weights rescaled from sum " << sum;
            warnings->push_back(msg.str());
        }
    }
    return weights;
}

MomentDocument parse_moments_json(const std::string& text, const RatioKind& kind) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError({std::string("invalid JSON: ") + e.what()});
    }
    std::vector<std::string> issues;
    MomentDocument out;
    MomentSpec& spec = out.spec;

    auto read_number = [&](const json& obj, const char* key, const std::string& where)
        -> std::optional<double> {
        if (!obj.contains(key)) return std::nullopt;
        if (!obj[key].is_number()) {
            issues.push_back(where + "." + key + ": must be a number");
            return std::nullopt;
        }
        return obj[key].get<double>();
    };

    if (!doc.is_object()) throw ValidationError({"document: must be a JSON object"});
    if (!doc.contains("assets") || !doc["assets"].is_array() || doc["assets"].empty()) {
        throw ValidationError({"assets: required non-empty array"});
    }
    const json& assets = doc["assets"];
    const std::size_t n = assets.size();
    const bool sharpe_from_moments = kind.ratio == Ratio::Sharpe;
    const bool has_matrix = doc.contains("corr_matrix");

    std::vector<double> corr, risk, marginal;
    std::size_t corr_count = 0, risk_count = 0, marginal_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const json& a = assets[i];
        const std::string where = "assets[" + std::to_string(i) + "]";
        if (!a.is_object()) {
            issues.push_back(where + ": must be an object");
            continue;
        }
        if (a.contains("id") && a["id"].is_string()) {
            spec.asset_ids.push_back(a["id"].get<std::string>());
        } else {
            issues.push_back(where + ".id: required string");
        }
        const auto mu = read_number(a, "expected_return", where);
        if (!mu && !a.contains("expected_return")) issues.push_back(where + ".expected_return: required");
        spec.expected_return.push_back(mu.value_or(0.0));

        const auto vol = read_number(a, "volatility", where);
        if (vol) spec.volatility.push_back(*vol);
        else if (sharpe_from_moments && !a.contains("volatility")) {
            issues.push_back(where + ".volatility: required for the Sharpe ratio");
        }

        const auto rho = read_number(a, "corr_with_portfolio", where);
        corr.push_back(rho.value_or(0.0));
        corr_count += rho.has_value();
        if (sharpe_from_moments && !has_matrix && !a.contains("corr_with_portfolio")) {
            issues.push_back(where +
                             ".corr_with_portfolio: required for the Sharpe ratio without a "
                             "corr_matrix");
        }

        auto f = read_number(a, "mdd", where);
        if (!f) f = read_number(a, "risk_measure", where);
        risk.push_back(f.value_or(0.0));
        risk_count += f.has_value();
        const auto s = read_number(a, "marginal_sensitivity", where);
        marginal.push_back(s.value_or(0.0));
        marginal_count += s.has_value();
        if (!sharpe_from_moments) {
            if (!a.contains("mdd") && !a.contains("risk_measure")) {
                issues.push_back(where + ".mdd: required for the " +
                                 std::string(to_string(kind.ratio)) + " ratio");
            }
            if (!a.contains("marginal_sensitivity")) {
                issues.push_back(where + ".marginal_sensitivity: required for the " +
                                 std::string(to_string(kind.ratio)) + " ratio");
            }
        }
    }
    if (corr_count == n) spec.corr_with_portfolio = corr;
    else if (corr_count > 0) issues.emplace_back("corr_with_portfolio: given for some assets only");
    if (risk_count == n && marginal_count == n) {
        spec.asset_denominator = risk;
        spec.marginal_sensitivity = marginal;
    } else if (risk_count > 0 || marginal_count > 0) {
        if (sharpe_from_moments) {
            issues.emplace_back("mdd/marginal_sensitivity: given for some assets only");
        }
    }
    if (!spec.volatility.empty() && spec.volatility.size() != n) {
        issues.emplace_back("volatility: given for some assets only");
    }

    if (has_matrix) {
        const json& m = doc["corr_matrix"];
        Matrix corr_matrix;
        bool ok = m.is_array();
        if (ok) {
            for (const auto& row : m) {
                if (!row.is_array()) { ok = false; break; }
                std::vector<double> values;
                for (const auto& v : row) {
                    if (!v.is_number()) { ok = false; break; }
                    values.push_back(v.get<double>());
                }
                corr_matrix.push_back(std::move(values));
            }
        }
        if (ok) spec.corr_matrix = std::move(corr_matrix);
        else issues.emplace_back("corr_matrix: must be an array of numeric rows");
    }
    if (const auto rf = read_number(doc, "risk_free", "document")) spec.risk_free = *rf;
    if (const auto pd = read_number(doc, "portfolio_denominator", "document")) {
        spec.portfolio_denominator = *pd;
    }

    if (doc.contains("weights")) {
        if (!doc["weights"].is_array()) {
            issues.emplace_back("weights: must be an array of numbers");
        } else {
            std::vector<double> w;
            for (const auto& v : doc["weights"]) {
                if (!v.is_number()) {
                    issues.emplace_back("weights: must be an array of numbers");
                    break;
                }
                w.push_back(v.get<double>());
            }
            if (w.size() == doc["weights"].size()) {
                try {
                    out.weights = checked_weights(std::move(w), n, &out.warnings);
                } catch (const ValidationError& e) {
                    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
                }
            }
        }
    }

    if (issues.empty()) {
        try {
            spec.validate();
        } catch (const ValidationError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return out;
}

MomentDocument load_moments(const std::filesystem::path& path, const RatioKind& kind) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_moments_json(text.str(), kind);
}

}  // namespace eulerperf
