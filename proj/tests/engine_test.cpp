#include "predcons/engine.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace predcons;

namespace {

std::shared_ptr<const Graph> shared(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

WeightMatrix pair_average()
{
    return WeightMatrix::from_dense(shared(make_chain(2)), Eigen::MatrixXd::Constant(2, 2, 0.5));
}

// Least-squares slope of y against t over [from, to).
double fitted_slope(const std::vector<double>& y, std::size_t from, std::size_t to)
{
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double n = static_cast<double>(to - from);
    for (std::size_t t = from; t < to; ++t) {
        const double tt = static_cast<double>(t);
        st += tt;
        sy += y[t];
        stt += tt * tt;
        sty += tt * y[t];
    }
    return (n * sty - st * sy) / (n * stt - st * st);
}

std::vector<double> logs(const std::vector<double>& v)
{
    std::vector<double> out;
    for (double x : v) out.push_back(std::log(x));
    return out;
}

} // namespace

TEST(InitSlope, ChainValues)
{
    const auto x = init_slope(make_chain(4), false);
    EXPECT_EQ(x, (StateVector{0.25, 0.5, 0.75, 1.0}));
    const auto y = init_slope(make_chain(4));
    EXPECT_NEAR(variance(y), 1.0, 1e-12);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_GT(y[i], y[i - 1]);
}

TEST(InitSlope, GridAndRgg)
{
    const auto x = init_slope(make_grid(3), false);
    EXPECT_DOUBLE_EQ(x[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(x[8], 2.0);
    EXPECT_DOUBLE_EQ(x[1], x[3]);
    const auto g = make_rgg(50, 9);
    const auto r = init_slope(g, false);
    for (NodeId i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(r[i], (*g.positions())[i].x + (*g.positions())[i].y);
    EXPECT_NEAR(variance(init_slope(g)), 1.0, 1e-12);
    EXPECT_THROW((void)init_slope(Graph::from_edges(2, std::vector<Edge>{{0, 1}}, Topology::custom)), Error);
}

TEST(InitSpike, Values)
{
    const auto g = make_chain(4);
    EXPECT_EQ(init_spike(g, 2, false), (StateVector{0.0, 0.0, 1.0, 0.0}));
    EXPECT_DOUBLE_EQ(mean(init_spike(g, 2, false)), 0.25);
    EXPECT_NEAR(variance(init_spike(g, 0)), 1.0, 1e-12);
    try {
        (void)init_spike(g, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_node);
    }
}

TEST(InitSpike, DifferentNodesSameLimit)
{
    const auto w = metropolis_hastings(make_chain(6));
    auto a = init_spike(w.graph(), 0);
    auto b = init_spike(w.graph(), 3);
    EXPECT_NE(step_memoryless(w, a), step_memoryless(w, b));
    for (int t = 0; t < 2000; ++t) {
        a = step_memoryless(w, a);
        b = step_memoryless(w, b);
    }
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(StepMemoryless, Examples)
{
    const auto w = metropolis_hastings(make_chain(3));
    EXPECT_EQ(step_memoryless(w, StateVector(3, 1.0)), StateVector(3, 1.0));
    const auto y = step_memoryless(pair_average(), StateVector{0.0, 2.0});
    EXPECT_DOUBLE_EQ(y[0], 1.0);
    EXPECT_DOUBLE_EQ(y[1], 1.0);
    const auto z = step_memoryless(w, StateVector{1.0, 0.0, 0.0});
    EXPECT_NEAR(z[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(z[1], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(z[2], 0.0, 1e-15);
    EXPECT_THROW((void)step_memoryless(w, StateVector(2, 0.0)), Error);
}

TEST(StepMemoryless, MatchesDenseProductAndConservesAverage)
{
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Seed s = 0; s < 5; ++s) {
        const auto w = metropolis_hastings(make_rgg(60, s));
        StateVector x(60);
        for (double& v : x) v = u(gen);
        for (int t = 0; t < 50; ++t) {
            const auto y = step_memoryless(w, x);
            const Eigen::VectorXd dense = w.dense() * Eigen::Map<const Eigen::VectorXd>(x.data(), 60);
            for (std::size_t i = 0; i < 60; ++i) EXPECT_NEAR(y[i], dense(static_cast<Eigen::Index>(i)), 1e-14);
            EXPECT_NEAR(mean(y), mean(x), 1e-12);
            x = y;
        }
    }
}

TEST(StepAccelerated, AlphaZeroIsMemoryless)
{
    const auto w = metropolis_hastings(make_grid(4));
    const auto op = AcceleratedOperator::with_alpha(w, least_squares_theta(), 0.0);
    auto states = make_states(init_slope(w.graph()));
    StateVector x = init_slope(w.graph());
    for (int t = 0; t < 20; ++t) {
        states = step_accelerated(op, states);
        x = step_memoryless(w, x);
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(states[i].current, x[i]);
    }
}

TEST(StepAccelerated, ConsensusFixedPoint)
{
    const auto w = metropolis_hastings(make_chain(5));
    const auto op = AcceleratedOperator::with_optimal_alpha(w, least_squares_theta());
    const auto next = step_accelerated(op, make_states(StateVector(5, 1.0)));
    for (const auto& s : next) {
        EXPECT_NEAR(s.current, 1.0, 1e-15);
        EXPECT_EQ(s.previous, 1.0);
    }
}

TEST(StepAccelerated, MatchesAssembledBlockMatrix)
{
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<WeightMatrix> ws{metropolis_hastings(make_chain(3)), max_degree(make_chain(3)),
                                 metropolis_hastings(make_rgg(9, 2))};
    for (const auto& w : ws) {
        for (int k = 0; k < 10; ++k) {
            const double t2 = u(gen);
            const double t3 = 1.0 + u(gen);
            const PredictorParams th(1.0 - t2 - t3, t2, t3);
            const double alpha = 0.95 * u(gen) * th.alpha_limit();
            const auto op = AcceleratedOperator::with_alpha_unchecked(w, th, alpha);
            const auto n = static_cast<Eigen::Index>(w.size());
            const Eigen::MatrixXd phi = oracle::assemble_phi(w.dense(), th, alpha);
            std::vector<NodeState> states(w.size());
            Eigen::VectorXd big(2 * n);
            for (Eigen::Index i = 0; i < n; ++i) {
                states[static_cast<std::size_t>(i)] = {2.0 * u(gen) - 1.0, 2.0 * u(gen) - 1.0};
                big(i) = states[static_cast<std::size_t>(i)].current;
                big(n + i) = states[static_cast<std::size_t>(i)].previous;
            }
            for (int t = 0; t < 100; ++t) {
                states = step_accelerated(op, states);
                big = phi * big;
                const double scale = std::max(1.0, big.cwiseAbs().maxCoeff());
                for (Eigen::Index i = 0; i < n; ++i) {
                    ASSERT_NEAR(states[static_cast<std::size_t>(i)].current, big(i), 1e-12 * scale) << t;
                    ASSERT_NEAR(states[static_cast<std::size_t>(i)].previous, big(n + i), 1e-12 * scale);
                }
            }
        }
    }
}

TEST(MaxConsensus, Examples)
{
    const auto g = make_chain(5);
    const auto c = max_consensus(g, StateVector(5, 3.0));
    EXPECT_EQ(c.rounds, 0u);
    EXPECT_EQ(c.values, StateVector(5, 3.0));
    const auto s = max_consensus(g, StateVector{1.0, 0.0, 0.0, 0.0, 0.0});
    EXPECT_EQ(s.rounds, 4u);
    EXPECT_EQ(s.values, StateVector(5, 1.0));
    EXPECT_EQ(max_consensus_rounds(g, StateVector{1.0, 0.0, 0.0, 0.0, 0.0}, 2),
              (StateVector{1.0, 1.0, 1.0, 0.0, 0.0}));
}

TEST(MaxConsensus, RandomVectorsReachTrueMaxWithinDiameter)
{
    std::mt19937 gen(4);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (Seed s = 0; s < 10; ++s) {
        const auto g = make_rgg(80, s);
        StateVector x(80);
        for (double& v : x) v = u(gen);
        const double top = *std::max_element(x.begin(), x.end());
        const auto r = max_consensus(g, x);
        EXPECT_EQ(r.values, StateVector(80, top));
        EXPECT_LE(r.rounds, diameter(g));
        EXPECT_EQ(max_consensus_rounds(g, x, diameter(g)), StateVector(80, top));
    }
}

TEST(RunToAccuracy, PairAverageConvergesInOneStep)
{
    for (double eps : {1e-1, 1e-5, 1e-12}) {
        const auto tr = run_to_accuracy(pair_average(), StateVector{-3.0, 7.0}, eps, 5);
        ASSERT_TRUE(tr.converged_at);
        EXPECT_EQ(*tr.converged_at, 1u);
        EXPECT_EQ(tr.iterations_run, 5u);
        EXPECT_EQ(tr.mse_linear.size(), 6u);
        EXPECT_DOUBLE_EQ(tr.initial_average, 2.0);
    }
}

TEST(RunToAccuracy, ChainMatchesSpectralPrediction)
{
    const auto w = metropolis_hastings(make_chain(50));
    const double rho = oracle::chain_mh_eigenvalues(50)[1];
    const double eps = 1e-5;
    const auto predicted = std::log(eps) / std::log(rho);
    const auto tr = run_to_accuracy(w, init_slope(w.graph()), eps, 12000, InitModel::slope);
    ASSERT_TRUE(tr.converged_at);
    EXPECT_NEAR(static_cast<double>(*tr.converged_at) / predicted, 1.0, 0.1);
    EXPECT_EQ(tr.init_model, InitModel::slope);
}

TEST(RunToAccuracy, NotConvergedIsNotAnError)
{
    const auto w = metropolis_hastings(make_chain(50));
    const auto tr = run_to_accuracy(w, init_slope(w.graph()), 1e-5, 100);
    EXPECT_FALSE(tr.converged_at);
    EXPECT_EQ(tr.mse_db.size(), 101u);
}

TEST(RunToAccuracy, ArgumentErrors)
{
    const auto w = metropolis_hastings(make_chain(4));
    const StateVector x{1.0, 2.0, 3.0, 4.0};
    EXPECT_THROW((void)run_to_accuracy(w, x, 0.0, 10), Error);
    EXPECT_THROW((void)run_to_accuracy(w, x, 1.0, 10), Error);
    EXPECT_THROW((void)run_to_accuracy(w, StateVector(4, 2.0), 0.1, 10), Error);
}

TEST(RunToAccuracy, MemorylessDecayRate)
{
    for (std::size_t n : {10u, 20u}) {
        const auto w = metropolis_hastings(make_chain(n));
        const double rho = oracle::chain_mh_eigenvalues(n)[1];
        const auto tr = run_to_accuracy(w, init_spike(w.graph(), 0), 0.5, 40 * n);
        const double slope = fitted_slope(logs(tr.mse_linear), 20 * n, 40 * n);
        EXPECT_NEAR(slope / (2.0 * std::log(rho)), 1.0, 0.05) << n;
    }
}

TEST(RunToAccuracy, AcceleratedDecayRateAndLimit)
{
    const auto w = metropolis_hastings(make_chain(16));
    const auto th = least_squares_theta();
    const auto op = AcceleratedOperator::with_alpha(w, th, 0.5 * AcceleratedOperator::with_optimal_alpha(w, th).alpha());
    const double rho = op.deviation_radius();
    const auto x0 = init_slope(w.graph());
    const auto tr = run_to_accuracy(op, x0, 1e-9, 1200);
    const double slope = fitted_slope(logs(tr.mse_linear), 300, 900);
    EXPECT_NEAR(slope / (2.0 * std::log(rho)), 1.0, 0.05);
    ASSERT_TRUE(tr.converged_at);
    EXPECT_LE(tr.mse_linear.back(), 1e-18 * tr.mse_linear.front());
}

TEST(RunToAccuracy, AcceleratedReachesTrueAverage)
{
    const auto w = metropolis_hastings(make_rgg(40, 3));
    const auto op = AcceleratedOperator::with_optimal_alpha(w, asymptotic_theta(0.5));
    const auto x0 = init_slope(w.graph());
    auto states = make_states(x0);
    for (int t = 0; t < 2000; ++t) states = step_accelerated(op, states);
    const double avg = mean(x0);
    const double spread = std::sqrt(variance(x0));
    for (const auto& s : states) EXPECT_NEAR(s.current, avg, 1e-9 * spread);
}

TEST(RunToAccuracy, AcceleratedBeatsMemorylessOnRgg)
{
    const auto w = metropolis_hastings(make_rgg(200, 17));
    const auto op = AcceleratedOperator::with_optimal_alpha(w, asymptotic_theta(0.5));
    const auto x0 = init_slope(w.graph());
    const auto slow = run_to_accuracy(w, x0, 1e-5, default_max_iters_memoryless(200), InitModel::slope);
    const auto fast = run_to_accuracy(op, x0, 1e-5, default_max_iters_accelerated(200), InitModel::slope);
    ASSERT_TRUE(slow.converged_at);
    ASSERT_TRUE(fast.converged_at);
    EXPECT_LT(*fast.converged_at, *slow.converged_at);
}

TEST(TraceCsv, Format)
{
    const auto tr = run_to_accuracy(pair_average(), StateVector{0.0, 2.0}, 0.1, 1);
    std::ostringstream os;
    write_trace_csv(os, tr);
    EXPECT_EQ(os.str().substr(0, 22), "iter,mse_linear,mse_db");
    EXPECT_NE(os.str().find("\n0,1,0\n"), std::string::npos);
}
