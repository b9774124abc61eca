#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "eulerperf/errors.hpp"
#include "eulerperf/optimizer.hpp"
#include "test_support.hpp"

using namespace eulerperf;

namespace {

RatioKind kind_of(Ratio r) {
    RatioKind k;
    k.ratio = r;
    return k;
}

MomentSpec tangency_spec() {
    MomentSpec spec;
    spec.asset_ids = {"low", "high"};
    spec.expected_return = {0.02, 0.04};
    spec.volatility = {0.05, 0.05};
    spec.corr_matrix = Matrix{{1.0, 0.0}, {0.0, 1.0}};
    return spec;
}

}  // namespace

TEST(ProjectToSimplex, KnownProjections) {
    const auto a = project_to_simplex(std::vector<double>{0.5, 0.5});
    EXPECT_DOUBLE_EQ(a[0], 0.5);
    const auto b = project_to_simplex(std::vector<double>{2.0, 0.0, -1.0});
    EXPECT_DOUBLE_EQ(b[0], 1.0);
    EXPECT_DOUBLE_EQ(b[1], 0.0);
    const auto c = project_to_simplex(std::vector<double>{0.6, 0.6});
    EXPECT_DOUBLE_EQ(c[0], 0.5);
}

TEST(OptimizerConfig, Validation) {
    OptimizerConfig c;
    EXPECT_NO_THROW(c.validate());
    c.tolerance = 0.0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.grid_step = 0.75;
    EXPECT_THROW(c.validate(), InputError);
}

TEST(MaximizeRatio, SingleAsset) {
    MomentSpec spec;
    spec.asset_ids = {"x"};
    spec.expected_return = {0.03};
    spec.volatility = {0.1};
    spec.corr_matrix = Matrix{{1.0}};
    const auto result = maximize_ratio(kind_of(Ratio::Sharpe), spec);
    ASSERT_EQ(result.weights.size(), 1u);
    EXPECT_EQ(result.weights[0], 1.0);
    EXPECT_NEAR(result.ratio, 0.3, 1e-15);
    const auto grid = grid_oracle(kind_of(Ratio::Sharpe), spec);
    EXPECT_EQ(grid.weights[0], 1.0);
}

TEST(MaximizeRatio, TwoAssetTangency) {
    const auto result = maximize_ratio(kind_of(Ratio::Sharpe), tangency_spec());
    EXPECT_NEAR(result.weights[0], 1.0 / 3.0, 1e-4);
    EXPECT_NEAR(result.weights[1], 2.0 / 3.0, 1e-4);
    EXPECT_TRUE(result.converged);
    const auto grid = grid_oracle(kind_of(Ratio::Sharpe), tangency_spec(), 0.005);
    EXPECT_NEAR(grid.weights[0], 1.0 / 3.0, 0.005);
}

TEST(MaximizeRatio, BeatsGridOracle) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const MomentSpec spec = testsupport::random_sharpe_spec(rng, 3);
        const auto opt = maximize_ratio(kind_of(Ratio::Sharpe), spec);
        const auto grid = grid_oracle(kind_of(Ratio::Sharpe), spec, 0.005);
        EXPECT_GE(opt.ratio, grid.ratio - 1e-12);
        double best_single = -1e300;
        for (std::size_t i = 0; i < 3; ++i) {
            best_single = std::max(best_single, spec.expected_return[i] / spec.volatility[i]);
        }
        EXPECT_GE(opt.ratio, best_single - 1e-12);
        double total = 0.0;
        for (double w : opt.weights) {
            EXPECT_GE(w, 0.0);
            total += w;
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
    }
}

TEST(MaximizeRatio, PermutationInvariant) {
    std::mt19937_64 rng(8);
    const MomentSpec spec = testsupport::random_sharpe_spec(rng, 3);
    const std::vector<std::size_t> perm{1, 2, 0};
    MomentSpec permuted;
    permuted.corr_matrix = Matrix(3, std::vector<double>(3));
    for (std::size_t a = 0; a < 3; ++a) {
        permuted.asset_ids.push_back(spec.asset_ids[perm[a]]);
        permuted.expected_return.push_back(spec.expected_return[perm[a]]);
        permuted.volatility.push_back(spec.volatility[perm[a]]);
        for (std::size_t b = 0; b < 3; ++b) {
            (*permuted.corr_matrix)[a][b] = (*spec.corr_matrix)[perm[a]][perm[b]];
        }
    }
    const auto x = maximize_ratio(kind_of(Ratio::Sharpe), spec);
    const auto y = maximize_ratio(kind_of(Ratio::Sharpe), permuted);
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(y.weights[a], x.weights[perm[a]], 1e-8);
}

TEST(MaximizeRatio, DrawdownRunsAreReproducible) {
    const AssetPanel panel = testsupport::random_panel(5, {3, 60});
    OptimizerConfig config;
    config.restarts = 4;
    config.seed = 42;
    const auto a = maximize_ratio(kind_of(Ratio::Recovery), panel, config);
    const auto b = maximize_ratio(kind_of(Ratio::Recovery), panel, config);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.ratio, b.ratio);
    const auto grid = grid_oracle(kind_of(Ratio::Recovery), panel, 0.01);
    EXPECT_GE(a.ratio, grid.ratio - 1e-2 * std::abs(grid.ratio));
}

TEST(MaximizeRatio, SmoothSeriesKinds) {
    const AssetPanel panel = testsupport::random_panel(6, {3, 60});
    OptimizerConfig config;
    config.restarts = 4;
    for (Ratio r : {Ratio::Sharpe, Ratio::Sortino, Ratio::Treynor, Ratio::Information}) {
        const auto opt = maximize_ratio(kind_of(r), panel, config);
        const auto grid = grid_oracle(kind_of(r), panel, 0.01);
        EXPECT_GE(opt.ratio, grid.ratio - 1e-12) << to_string(r);
    }
}

TEST(MaximizeRatio, AddingAPassingCandidateDoesNotHurt) {
    std::mt19937_64 rng(21);
    int checked = 0;
    for (int trial = 0; trial < 20 && checked < 5; ++trial) {
        const MomentSpec full = testsupport::random_sharpe_spec(rng, 3);
        MomentSpec two;
        two.asset_ids = {full.asset_ids[0], full.asset_ids[1]};
        two.expected_return = {full.expected_return[0], full.expected_return[1]};
        two.volatility = {full.volatility[0], full.volatility[1]};
        two.corr_matrix = Matrix{{1.0, (*full.corr_matrix)[0][1]}, {(*full.corr_matrix)[1][0], 1.0}};
        const auto incumbent = maximize_ratio(kind_of(Ratio::Sharpe), two);
        std::vector<double> w{incumbent.weights[0], incumbent.weights[1], 0.0};
        const auto report = decompose(kind_of(Ratio::Sharpe), full, w);
        const Matrix cov = covariance_from_correlation(*full.corr_matrix, full.volatility);
        const double rho = correlation_with_portfolio(cov, w, 2);
        if (!(rho > 0.0)) continue;
        const auto verdict = inclusion_test(
            CandidateStats::sharpe(full.expected_return[2] / full.volatility[2], rho),
            report.portfolio_ratio);
        if (!verdict.include) continue;
        const auto expanded = maximize_ratio(kind_of(Ratio::Sharpe), full);
        EXPECT_GE(expanded.ratio, incumbent.ratio - 1e-9);
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(GridOracle, DominantAsset) {
    MomentSpec spec;
    spec.asset_ids = {"weak", "strong"};
    spec.expected_return = {0.02, 0.05};
    spec.volatility = {0.10, 0.08};
    spec.corr_matrix = Matrix{{1.0, 1.0}, {1.0, 1.0}};
    const auto grid = grid_oracle(kind_of(Ratio::Sharpe), spec, 0.01);
    EXPECT_EQ(grid.weights[0], 0.0);
    EXPECT_EQ(grid.weights[1], 1.0);
}

TEST(GridOracle, Guards) {
    std::mt19937_64 rng(1);
    const MomentSpec five = testsupport::random_sharpe_spec(rng, 5);
    EXPECT_THROW(grid_oracle(kind_of(Ratio::Sharpe), five), InputError);
    const MomentSpec three = testsupport::random_sharpe_spec(rng, 3);
    EXPECT_THROW(grid_oracle(kind_of(Ratio::Sharpe), three, 0.003), InputError);
}

TEST(MaximizeRatio, MomentModeNeedsCorrelationMatrix) {
    MomentSpec spec = testsupport::sharpe_table_spec();
    EXPECT_THROW(maximize_ratio(kind_of(Ratio::Sharpe), spec), InputError);
}
