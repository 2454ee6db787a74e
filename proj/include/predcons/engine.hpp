#ifndef PREDCONS_ENGINE_HPP
#define PREDCONS_ENGINE_HPP

// Synchronous node-level simulation. Every update reads a node's own value
// and the values of its graph neighbours only.

#include "predcons/accel.hpp"
#include "predcons/error.hpp"
#include "predcons/graph.hpp"
#include "predcons/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace predcons {

using StateVector = std::vector<double>;

/// x_i(t) and x_i(t-1). At t = 0 both hold x_i(0).
struct NodeState {
    double current = 0.0;
    double previous = 0.0;

    friend bool operator==(const NodeState&, const NodeState&) = default;
};

enum class InitModel { slope, spike, custom };

inline std::string to_string(InitModel m)
{
    switch (m) {
    case InitModel::slope: return "slope";
    case InitModel::spike: return "spike";
    case InitModel::custom: return "custom";
    }
    return "custom";
}

inline double mean(std::span<const double> x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Population variance (1/N normalisation), which equals the MSE at t = 0.
inline double variance(std::span<const double> x)
{
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size());
}

/// Scales x so that its variance is 1. Constant vectors are left alone.
inline void normalize_variance(StateVector& x)
{
    const double var = variance(x);
    if (!(var > 0.0)) return;
    const double scale = 1.0 / std::sqrt(var);
    for (double& v : x) v *= scale;
}

/// Chain: x_i = i/N (1-based). Grid: ((row + 1) + (col + 1)) / side.
/// RGG: sum of the node's coordinates. Variance-normalised.
inline StateVector init_slope(const Graph& g, bool normalize = true)
{
    const std::size_t n = g.size();
    StateVector x(n);
    switch (g.kind()) {
    case Topology::chain:
        for (NodeId i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1) / static_cast<double>(n);
        break;
    case Topology::grid: {
        const std::size_t side = g.grid_side();
        for (NodeId i = 0; i < n; ++i)
            x[i] = static_cast<double>(i / side + 1 + i % side + 1) / static_cast<double>(side);
        break;
    }
    case Topology::rgg:
    case Topology::custom:
        if (!g.positions())
            throw Error(ErrorCode::contract_violation, "slope init needs node positions");
        for (NodeId i = 0; i < n; ++i) x[i] = (*g.positions())[i].x + (*g.positions())[i].y;
        break;
    }
    if (normalize) normalize_variance(x);
    return x;
}

/// One at `node`, zero elsewhere, variance-normalised.
inline StateVector init_spike(const Graph& g, NodeId node, bool normalize = true)
{
    if (node >= g.size()) throw Error(ErrorCode::invalid_node, "spike node out of range");
    StateVector x(g.size(), 0.0);
    x[node] = 1.0;
    if (normalize) normalize_variance(x);
    return x;
}

/// Node-local averaging x^W = W_ii x_i + sum_j W_ij x_j over the values
/// received from neighbours.
inline double local_average(const LocalRow& row, double own, std::span<const double> received)
{
    double acc = row.self_weight * own;
    for (std::size_t k = 0; k < received.size(); ++k) acc += row.neighbor_weights[k] * received[k];
    return acc;
}

/// Node-local two-tap update given the node's memory and its x^W.
inline NodeState local_accelerated_update(const NodeState& own, double averaged, const PredictorParams& th,
                                          double alpha)
{
    const double predicted = th.theta3() * averaged + th.theta2() * own.current + th.theta1() * own.previous;
    return {alpha * predicted + (1.0 - alpha) * averaged, own.current};
}

namespace detail {

// Copies the neighbours' broadcast values of node i into `inbox`.
template <typename Value>
void gather(const Graph& g, NodeId i, std::span<const Value> broadcast, std::vector<double>& inbox,
            double (*pick)(const Value&))
{
    inbox.clear();
    for (NodeId j : g.neighbors(i)) inbox.push_back(pick(broadcast[j]));
}

inline double pick_value(const double& v) { return v; }
inline double pick_current(const NodeState& s) { return s.current; }

} // namespace detail

/// One synchronous round of x(t+1) = W x(t), computed node by node from
/// neighbour messages.
inline StateVector step_memoryless(const WeightMatrix& w, std::span<const double> x)
{
    const Graph& g = w.graph();
    if (x.size() != g.size()) throw Error(ErrorCode::contract_violation, "state dimension mismatch");
    StateVector next(x.size());
    std::vector<double> inbox;
    for (NodeId i = 0; i < g.size(); ++i) {
        detail::gather<double>(g, i, x, inbox, detail::pick_value);
        next[i] = local_average(w.local_row(i), x[i], inbox);
    }
    return next;
}

/// One synchronous round of the two-tap predictive update:
///   x^W = W_ii x_i + sum W_ij x_j
///   x^P = theta3 x^W + theta2 x_i(t) + theta1 x_i(t-1)
///   x_i(t+1) = alpha x^P + (1 - alpha) x^W
inline std::vector<NodeState> step_accelerated(const AcceleratedOperator& op,
                                               std::span<const NodeState> states)
{
    const WeightMatrix& w = op.weight();
    const Graph& g = w.graph();
    if (states.size() != g.size()) throw Error(ErrorCode::contract_violation, "state dimension mismatch");
    std::vector<NodeState> next(states.size());
    std::vector<double> inbox;
    for (NodeId i = 0; i < g.size(); ++i) {
        detail::gather<NodeState>(g, i, states, inbox, detail::pick_current);
        const double averaged = local_average(w.local_row(i), states[i].current, inbox);
        next[i] = local_accelerated_update(states[i], averaged, op.theta(), op.alpha());
    }
    return next;
}

inline std::vector<NodeState> make_states(std::span<const double> x0)
{
    std::vector<NodeState> s(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) s[i] = {x0[i], x0[i]};
    return s;
}

struct MaxConsensusResult {
    StateVector values;
    std::size_t rounds = 0;
};

/// x_i <- max over N_i and i, for exactly `rounds` rounds.
inline StateVector max_consensus_rounds(const Graph& g, std::span<const double> x, std::size_t rounds)
{
    if (x.size() != g.size()) throw Error(ErrorCode::contract_violation, "state dimension mismatch");
    StateVector cur(x.begin(), x.end());
    StateVector next(cur.size());
    for (std::size_t r = 0; r < rounds; ++r) {
        for (NodeId i = 0; i < g.size(); ++i) {
            double m = cur[i];
            for (NodeId j : g.neighbors(i)) m = std::max(m, cur[j]);
            next[i] = m;
        }
        cur.swap(next);
    }
    return cur;
}

/// Runs max-consensus to its fixed point. `rounds` counts the rounds that
/// changed at least one value, so a constant input reports 0.
inline MaxConsensusResult max_consensus(const Graph& g, std::span<const double> x)
{
    MaxConsensusResult out{StateVector(x.begin(), x.end()), 0};
    for (;;) {
        StateVector next = max_consensus_rounds(g, out.values, 1);
        if (next == out.values) return out;
        out.values = std::move(next);
        ++out.rounds;
    }
}

struct ExperimentTrace {
    std::vector<double> mse_linear;   ///< ||x(t) - xbar(0) 1||^2 / N for t = 0..iterations_run
    std::vector<double> mse_db;
    std::size_t iterations_run = 0;
    double initial_average = 0.0;
    std::optional<std::size_t> converged_at;
    InitModel init_model = InitModel::custom;
};

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

namespace detail {

inline double mse_against(std::span<const double> x, double avg)
{
    double acc = 0.0;
    for (double v : x) acc += (v - avg) * (v - avg);
    return acc / static_cast<double>(x.size());
}

inline void check_run_args(std::span<const double> x0, double epsilon)
{
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw Error(ErrorCode::invalid_parameter, "epsilon must lie in (0, 1)");
    if (x0.empty()) throw Error(ErrorCode::invalid_parameter, "empty initial state");
    const double avg = mean(x0);
    if (!(mse_against(x0, avg) > 0.0))
        throw Error(ErrorCode::invalid_parameter, "initial state already at consensus");
}

// First t such that ||x(s) - xbar|| <= eps ||x(0) - xbar|| for every
// recorded s >= t.
inline std::optional<std::size_t> first_sustained_crossing(const std::vector<double>& mse, double epsilon)
{
    const double threshold = epsilon * epsilon * mse.front();
    std::size_t t = mse.size();
    while (t > 0 && mse[t - 1] <= threshold) --t;
    if (t == mse.size()) return std::nullopt;
    return t;
}

inline void record(ExperimentTrace& tr, std::span<const double> x)
{
    const double m = mse_against(x, tr.initial_average);
    tr.mse_linear.push_back(m);
    tr.mse_db.push_back(to_db(m));
}

} // namespace detail

/// Convergence time proxy: the simulation always runs `max_iters` rounds
/// and the crossing must hold over the whole remaining horizon.
inline ExperimentTrace run_to_accuracy(const WeightMatrix& w, std::span<const double> x0, double epsilon,
                                       std::size_t max_iters, InitModel init = InitModel::custom)
{
    detail::check_run_args(x0, epsilon);
    ExperimentTrace tr;
    tr.init_model = init;
    tr.initial_average = mean(x0);
    tr.mse_linear.reserve(max_iters + 1);
    tr.mse_db.reserve(max_iters + 1);
    StateVector x(x0.begin(), x0.end());
    detail::record(tr, x);
    for (std::size_t t = 0; t < max_iters; ++t) {
        x = step_memoryless(w, x);
        detail::record(tr, x);
    }
    tr.iterations_run = max_iters;
    tr.converged_at = detail::first_sustained_crossing(tr.mse_linear, epsilon);
    return tr;
}

inline ExperimentTrace run_to_accuracy(const AcceleratedOperator& op, std::span<const double> x0,
                                       double epsilon, std::size_t max_iters,
                                       InitModel init = InitModel::custom)
{
    detail::check_run_args(x0, epsilon);
    ExperimentTrace tr;
    tr.init_model = init;
    tr.initial_average = mean(x0);
    tr.mse_linear.reserve(max_iters + 1);
    tr.mse_db.reserve(max_iters + 1);
    auto states = make_states(x0);
    StateVector x(x0.begin(), x0.end());
    detail::record(tr, x);
    for (std::size_t t = 0; t < max_iters; ++t) {
        states = step_accelerated(op, states);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = states[i].current;
        detail::record(tr, x);
    }
    tr.iterations_run = max_iters;
    tr.converged_at = detail::first_sustained_crossing(tr.mse_linear, epsilon);
    return tr;
}

inline std::size_t default_max_iters_memoryless(std::size_t n) { return 50 * n; }
inline std::size_t default_max_iters_accelerated(std::size_t n) { return 20 * n; }

/// CSV columns: iter, mse_linear, mse_db.
inline void write_trace_csv(std::ostream& os, const ExperimentTrace& tr)
{
    const auto old_precision = os.precision(17);
    os << "iter,mse_linear,mse_db\n";
    for (std::size_t t = 0; t < tr.mse_linear.size(); ++t)
        os << t << ',' << tr.mse_linear[t] << ',' << tr.mse_db[t] << '\n';
    os.precision(old_precision);
}

} // namespace predcons

#endif
