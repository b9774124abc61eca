#include "eulerperf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>

#include "eulerperf/errors.hpp"

namespace eulerperf {

namespace {

constexpr double kMinPatternStep = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// The ratio and (for smooth kinds) its gradient as functions of the weights.
struct Objective {
    std::size_t n = 0;
    bool smooth = false;
    std::function<double(std::span<const double>)> value;
    std::function<bool(std::span<const double>, std::vector<double>&)> gradient;
    std::function<DecompositionReport(std::span<const double>)> decompose;
};

bool is_smooth(const RatioKind& kind) { return !kind.is_drawdown(); }

// d/dw_i (R_p / f) = (R_i f - R_p df/dw_i) / f^2
void quotient_gradient(std::span<const double> w, std::span<const double> numerators,
                       const MarginalSensitivity& ms, std::vector<double>& out) {
    const double f = ms.denominator_value;
    double rp = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) rp += w[i] * numerators[i];
    out.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = (numerators[i] * f - rp * ms.per_asset[i]) / (f * f);
    }
}

template <typename Input>
Objective make_objective(const RatioKind& kind, const Input& input, std::size_t n) {
    Objective obj;
    obj.n = n;
    obj.smooth = is_smooth(kind);
    auto numerators = std::make_shared<std::vector<double>>(asset_numerators(kind, input));
    obj.value = [&kind, &input](std::span<const double> w) {
        try {
            const double r = ratio_value(kind, input, w);
            return std::isfinite(r) ? r : kNegInf;
        } catch (const DegenerateError&) {
            return kNegInf;
        } catch (const EulerCheckError&) {
            return kNegInf;
        }
    };
    obj.gradient = [&kind, &input, numerators](std::span<const double> w,
                                               std::vector<double>& out) {
        try {
            const MarginalSensitivity ms = marginal_sensitivity(kind, input, w);
            if (!(ms.denominator_value > 0.0)) return false;
            quotient_gradient(w, *numerators, ms, out);
            return std::all_of(out.begin(), out.end(), [](double g) { return std::isfinite(g); });
        } catch (const DegenerateError&) {
            return false;
        } catch (const EulerCheckError&) {
            return false;
        }
    };
    obj.decompose = [&kind, &input](std::span<const double> w) {
        return eulerperf::decompose(kind, input, w);
    };
    return obj;
}

bool lexicographically_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct LocalResult {
    std::vector<double> weights;
    double ratio = kNegInf;
    std::size_t iterations = 0;
    bool converged = false;
};

void normalize(std::vector<double>& w) {
    double sum = 0.0;
    for (double& v : w) {
        v = std::max(v, 0.0);
        sum += v;
    }
    for (double& v : w) v /= sum;
}

// Projected gradient ascent with backtracking; stops when an accepted step
// gains less than the tolerance.
void gradient_phase(const Objective& obj, const OptimizerConfig& config, LocalResult& state) {
    std::vector<double> grad;
    std::vector<double> trial(obj.n);
    double step = 0.1;
    while (state.iterations < config.max_iterations) {
        if (!obj.gradient(state.weights, grad)) return;
        double scale = 0.0;
        for (double g : grad) scale = std::max(scale, std::abs(g));
        if (!(scale > 0.0)) return;

        bool accepted = false;
        double gain = 0.0;
        for (; step >= 1e-16; step *= 0.5) {
            for (std::size_t i = 0; i < obj.n; ++i) {
                trial[i] = state.weights[i] + step * grad[i] / scale;
            }
            std::vector<double> candidate = project_to_simplex(trial);
            double predicted = 0.0;
            for (std::size_t i = 0; i < obj.n; ++i) {
                predicted += grad[i] * (candidate[i] - state.weights[i]);
            }
            const double value = obj.value(candidate);
            if (value > state.ratio && value - state.ratio >= 1e-4 * predicted) {
                gain = value - state.ratio;
                state.weights = std::move(candidate);
                state.ratio = value;
                accepted = true;
                break;
            }
        }
        ++state.iterations;
        if (!accepted) return;
        step = std::min(1.0, step * 2.0);
        if (gain < config.tolerance * std::max(1.0, std::abs(state.ratio))) return;
    }
}

// Direct search over the simplex: move `delta` of weight from asset i to
// asset j whenever that raises the ratio, halving delta after a sweep without
// progress.
void pattern_phase(const Objective& obj, const OptimizerConfig& config, double delta,
                   LocalResult& state) {
    std::vector<double> candidate;
    while (delta >= kMinPatternStep) {
        if (state.iterations >= config.max_iterations) return;
        ++state.iterations;
        bool improved = false;
        for (std::size_t i = 0; i < obj.n; ++i) {
            for (std::size_t j = 0; j < obj.n; ++j) {
                if (i == j || state.weights[i] <= 0.0) continue;
                const double amount = std::min(delta, state.weights[i]);
                candidate = state.weights;
                candidate[i] = amount == state.weights[i] ? 0.0 : candidate[i] - amount;
                candidate[j] += amount;
                const double value = obj.value(candidate);
                if (value > state.ratio) {
                    state.weights.swap(candidate);
                    state.ratio = value;
                    improved = true;
                }
            }
        }
        if (!improved) delta *= 0.5;
    }
    state.converged = true;
}

LocalResult local_search(const Objective& obj, const OptimizerConfig& config,
                         std::vector<double> start) {
    LocalResult state;
    state.weights = std::move(start);
    state.ratio = obj.value(state.weights);
    if (obj.smooth) gradient_phase(obj, config, state);
    pattern_phase(obj, config, obj.smooth ? 1e-3 : 0.1, state);
    normalize(state.weights);
    state.ratio = obj.value(state.weights);
    return state;
}

std::vector<double> random_simplex_point(std::size_t n, std::uint64_t seed, std::size_t restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::exponential_distribution<double> exponential(1.0);
    std::vector<double> w(n);
    for (double& v : w) v = exponential(rng);
    normalize(w);
    return w;
}

OptimizationResult run_multistart(const Objective& obj, const OptimizerConfig& config) {
    config.validate();
    OptimizationResult result;
    if (obj.n == 0) throw InputError("optimizer needs at least one asset");
    if (obj.n == 1) {
        result.weights = {1.0};
        result.ratio = obj.value(result.weights);
        if (!std::isfinite(result.ratio)) throw DegenerateError("no feasible optimum");
        result.converged = true;
        result.restarts_used = 1;
        result.decomposition = obj.decompose(result.weights);
        return result;
    }

    LocalResult best;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        std::vector<double> start =
            r == 0 ? std::vector<double>(obj.n, 1.0 / static_cast<double>(obj.n))
                   : random_simplex_point(obj.n, config.seed, r);
        LocalResult local = local_search(obj, config, std::move(start));
        ++result.restarts_used;
        if (!std::isfinite(local.ratio)) continue;
        if (local.ratio > best.ratio ||
            (local.ratio == best.ratio && lexicographically_less(local.weights, best.weights))) {
            best = std::move(local);
        }
    }
    if (!std::isfinite(best.ratio)) throw DegenerateError("no feasible optimum");
    result.weights = std::move(best.weights);
    result.ratio = best.ratio;
    result.iterations = best.iterations;
    result.converged = best.converged;
    result.decomposition = obj.decompose(result.weights);
    return result;
}

void scan_lattice(const Objective& obj, long total, std::vector<long>& counts,
                  std::size_t position, long remaining, std::vector<double>& w,
                  OptimizationResult& best, bool& found) {
    if (position + 1 == counts.size()) {
        counts[position] = remaining;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            w[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
        }
        ++best.iterations;
        const double value = obj.value(w);
        // lexicographic enumeration: the first of equal values wins
        if (std::isfinite(value) && (!found || value > best.ratio)) {
            best.ratio = value;
            best.weights = w;
            found = true;
        }
        return;
    }
    for (long k = 0; k <= remaining; ++k) {
        counts[position] = k;
        scan_lattice(obj, total, counts, position + 1, remaining - k, w, best, found);
    }
}

OptimizationResult run_grid(const Objective& obj, double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 0.5)) {
        throw InputError("grid_step must lie in (0, 0.5]");
    }
    if (obj.n > kGridOracleMaxAssets) {
        throw InputError("grid oracle supports at most " + std::to_string(kGridOracleMaxAssets) +
                         " assets");
    }
    if (obj.n == 0) throw InputError("grid oracle needs at least one asset");
    const long total = std::lround(1.0 / grid_step);
    if (std::abs(static_cast<double>(total) * grid_step - 1.0) > 1e-9) {
        throw InputError("grid_step must divide 1");
    }
    OptimizationResult best;
    std::vector<long> counts(obj.n, 0);
    std::vector<double> w(obj.n, 0.0);
    bool found = false;
    scan_lattice(obj, total, counts, 0, total, w, best, found);
    if (!found) throw DegenerateError("no feasible optimum");
    best.converged = true;
    best.decomposition = obj.decompose(best.weights);
    return best;
}

Objective moment_objective(const RatioKind& kind, const MomentSpec& spec) {
    spec.validate();
    if (kind.ratio != Ratio::Sharpe || !spec.corr_matrix) {
        throw InputError(
            "moment-mode optimization needs the Sharpe ratio and a correlation matrix");
    }
    return make_objective(kind, spec, spec.size());
}

}  // namespace

void OptimizerConfig::validate() const {
    if (max_iterations == 0) throw InputError("max_iterations must be positive");
    if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
    if (restarts == 0) throw InputError("restarts must be positive");
    if (!(grid_step > 0.0 && grid_step <= 0.5)) throw InputError("grid_step must lie in (0, 0.5]");
}

std::vector<double> project_to_simplex(std::span<const double> v) {
    // sort-based projection: find tau with sum max(v_i - tau, 0) = 1
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0) tau = candidate;
    }
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
    return out;
}

OptimizationResult maximize_ratio(const RatioKind& kind, const AssetPanel& panel,
                                  const OptimizerConfig& config) {
    return run_multistart(make_objective(kind, panel, panel.num_assets()), config);
}

OptimizationResult maximize_ratio(const RatioKind& kind, const MomentSpec& spec,
                                  const OptimizerConfig& config) {
    return run_multistart(moment_objective(kind, spec), config);
}

OptimizationResult grid_oracle(const RatioKind& kind, const AssetPanel& panel, double grid_step) {
    return run_grid(make_objective(kind, panel, panel.num_assets()), grid_step);
}

OptimizationResult grid_oracle(const RatioKind& kind, const MomentSpec& spec, double grid_step) {
    return run_grid(moment_objective(kind, spec), grid_step);
}

}  // namespace eulerperf
