#include "predcons/doi.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

using namespace predcons;

namespace {

double relative_error(double estimate, double exact) { return std::abs(estimate - exact) / exact; }

double mean_over_sup(std::span<const double> v)
{
    double sup = 0.0;
    for (double x : v) sup = std::max(sup, std::abs(x));
    return std::abs(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size())) / sup;
}

} // namespace

TEST(DoiConfig, Validation)
{
    EXPECT_THROW((DoiConfig{5, 10, 0}).validate(), Error);
    EXPECT_THROW((DoiConfig{5, 0, 0}).validate(), Error);
    EXPECT_NO_THROW((DoiConfig{10, 10, 0}).validate());
    const auto g = make_chain(9);
    const auto cfg = default_doi_config(g, 40, 3);
    EXPECT_EQ(cfg.normalize_every, 8u);
    EXPECT_EQ(cfg.iterations, 40u);
    EXPECT_EQ(default_doi_config(make_complete(4), 5, 0).normalize_every, 1u);
}

TEST(EstimateLambda2, RggTwoNIterations)
{
    std::vector<double> errors;
    for (Seed s = 0; s < 10; ++s) {
        const auto w = metropolis_hastings(make_rgg(200, derive_seed(77, s)));
        const double exact = symmetric_eigenvalues(w).lambda2();
        errors.push_back(relative_error(estimate_lambda2(w, DoiConfig{400, 10, derive_seed(99, s)}).estimate, exact));
    }
    std::sort(errors.begin(), errors.end());
    EXPECT_LE(errors.back(), 5e-3);
    EXPECT_LE(errors[errors.size() / 2], 1e-3);
}

TEST(EstimateLambda2, ChainQuadraticIterations)
{
    const auto w = metropolis_hastings(make_chain(50));
    const double exact = symmetric_eigenvalues(w).lambda2();
    for (Seed s = 0; s < 5; ++s) {
        EXPECT_LE(relative_error(estimate_lambda2(w, DoiConfig{2500, 10, s}).estimate, exact), 1e-3);
        EXPECT_LE(relative_error(estimate_lambda2(w, default_doi_config(w.graph(), 2500, s)).estimate, exact), 1e-3);
    }
}

TEST(EstimateLambda2, AveragingMatrixGivesZero)
{
    const auto g = std::make_shared<const Graph>(make_complete(6));
    const auto j = WeightMatrix::from_dense(g, Eigen::MatrixXd::Constant(6, 6, 1.0 / 6.0));
    EXPECT_EQ(estimate_lambda2(j, DoiConfig{10, 1, 4}).estimate, 0.0);
}

TEST(EstimateLambda2, PrecisionLossWithLongWindow)
{
    const auto g = std::make_shared<const Graph>(make_complete(6));
    const auto j = WeightMatrix::from_dense(g, Eigen::MatrixXd::Constant(6, 6, 1.0 / 6.0));
    try {
        (void)estimate_lambda2(j, DoiConfig{10, 5, 4});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::precision_loss);
    }
}

TEST(EstimateLambda2, IteratesStayZeroMean)
{
    // Rounding puts a consensus component of order eps into every W
    // application; normalisation then amplifies it by lambda2^-k relative to
    // the lambda2 mode. Zero mean holds while that product stays small.
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (Seed s = 0; s < 5; ++s) {
        const auto w = metropolis_hastings(make_rgg(100, s));
        const double l2 = symmetric_eigenvalues(w).lambda2();
        std::size_t calls = 0;
        (void)estimate_lambda2(w, DoiConfig{300, 7, s}, [&](std::size_t k, std::span<const double> v) {
            EXPECT_EQ(k, calls++);
            const double growth = eps * std::pow(l2, -static_cast<double>(k));
            const double m = mean_over_sup(v);
            EXPECT_LE(m, 100.0 * growth) << "k=" << k;
            if (growth <= 1e-12) {
                EXPECT_LE(m, 1e-10) << "k=" << k;
            }
        });
        EXPECT_EQ(calls, 301u);
    }
    const auto chain = metropolis_hastings(make_chain(50));
    (void)estimate_lambda2(chain, DoiConfig{2500, 10, 3},
                           [](std::size_t, std::span<const double> v) { EXPECT_LE(mean_over_sup(v), 1e-10); });
}

TEST(EstimateLambda2, BracketAndConvergence)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (const auto& w : {metropolis_hastings(make_chain(30)), metropolis_hastings(make_grid(6)),
                          metropolis_hastings(make_rgg(60, 2))}) {
        const auto spectrum = symmetric_eigenvalues(w);
        const double exact = spectrum.lambda2();
        const double next = std::max(std::abs(spectrum.values[2]), std::abs(spectrum.smallest()));
        // Longest run that keeps the rounding-fed consensus component below 1e-8.
        const auto k_max = static_cast<std::size_t>(std::log(1e-8 / eps) / -std::log(exact));
        double prev_err = 1.0;
        for (std::size_t k : {std::max<std::size_t>(10, k_max / 16), k_max / 4, k_max}) {
            const double est = estimate_lambda2(w, DoiConfig{k, 10, 5}).estimate;
            EXPECT_LE(est, 1.0);
            const double err = relative_error(est, exact);
            EXPECT_LE(err, prev_err + 1e-12);
            prev_err = err;
        }
        // Power-method rate; small eigengaps cannot converge inside the window.
        EXPECT_LE(prev_err, std::max(1e-6, std::pow(next / exact, static_cast<double>(k_max) / 4.0))) << w.size();
    }
}

TEST(EstimateLambda2, LongRunsDriftToConsensusMode)
{
    // Far past the zero-mean regime the iterate is the rounding-fed constant
    // vector and the ratio is 1.
    const auto w = metropolis_hastings(make_rgg(100, 5));
    EXPECT_NEAR(estimate_lambda2(w, DoiConfig{2000, 10, 1}).estimate, 1.0, 1e-12);
}

TEST(EstimateLambda2, Deterministic)
{
    const auto w = metropolis_hastings(make_rgg(80, 2));
    const DoiConfig cfg{160, 10, 42};
    EXPECT_EQ(estimate_lambda2(w, cfg).estimate, estimate_lambda2(w, cfg).estimate);
    EXPECT_NE(estimate_lambda2(w, cfg).estimate, estimate_lambda2(w, DoiConfig{160, 10, 43}).estimate);
}

TEST(EstimateLambda2, CostAccounting)
{
    const auto w = metropolis_hastings(make_chain(12));
    const std::size_t d = 11;
    for (auto [k, l] : {std::pair<std::size_t, std::size_t>{40, 10}, {45, 10}, {12, 1}, {11, 11}}) {
        const auto cost = estimate_lambda2(w, DoiConfig{k, l, 0}).cost;
        const std::size_t runs = k / l + (k % l != 0 ? 1 : 0) + 1;
        EXPECT_EQ(cost.consensus_rounds, k + 2);
        EXPECT_EQ(cost.max_consensus_runs, runs);
        EXPECT_EQ(cost.max_consensus_rounds, runs * d);
        EXPECT_EQ(cost.total_rounds(), k + 2 + runs * d);
    }
}

TEST(EndToEnd, LargeKRecoversOptimalAlpha)
{
    const auto th = asymptotic_theta(0.5);
    for (const auto& w : {metropolis_hastings(make_chain(50)), metropolis_hastings(make_chain(80))}) {
        const double exact = symmetric_eigenvalues(w).lambda2();
        const auto r = end_to_end_alpha(w, th, DoiConfig{10000, 10, 6});
        EXPECT_FALSE(r.clamped);
        EXPECT_NEAR(r.op.alpha(), optimal_alpha(exact, th), 1e-6);
        EXPECT_EQ(r.lambda2_estimate, r.op.lambda2());
        EXPECT_EQ(r.cost.consensus_rounds, 10002u);
    }
}

TEST(EndToEnd, ClampsEstimate)
{
    const auto g = std::make_shared<const Graph>(make_complete(6));
    const auto j = WeightMatrix::from_dense(g, Eigen::MatrixXd::Constant(6, 6, 1.0 / 6.0));
    const auto r = end_to_end_alpha(j, least_squares_theta(), DoiConfig{4, 1, 0});
    EXPECT_EQ(r.lambda2_estimate, 0.0);
    EXPECT_FALSE(r.clamped);
    EXPECT_EQ(r.op.alpha(), 0.0);
}

TEST(EndToEnd, RadiusSensitivityIsOneSided)
{
    const auto w = metropolis_hastings(make_rgg(200, 31));
    const auto th = asymptotic_theta(0.5);
    const double exact = symmetric_eigenvalues(w).lambda2();
    const double best = AcceleratedOperator::with_optimal_alpha(w, th).deviation_radius();
    const auto over = AcceleratedOperator::with_lambda2(w, th, exact * (1.0 + 1e-3));
    EXPECT_LE(over.deviation_radius() / best, 1.01);
    // Underestimates put alpha below alpha*, where the lambda2 cost rises like
    // the square root of alpha* - alpha.
    const auto under = AcceleratedOperator::with_lambda2(w, th, exact * (1.0 - 1e-3));
    EXPECT_GT(under.deviation_radius() / best, 1.01);
    EXPECT_NEAR(under.deviation_radius(), cost_J(under.alpha(), exact, th), 1e-12);
    EXPECT_LE(under.deviation_radius() / best, 1.06);
}
