#ifndef PREDCONS_WEIGHTS_HPP
#define PREDCONS_WEIGHTS_HPP

// Consensus weight matrices built from local degree information.

#include "predcons/error.hpp"
#include "predcons/graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <vector>

namespace predcons {

/// What node i knows about W: its own weight and the weights it applies
/// to each neighbour, aligned with Graph::neighbors(i).
struct LocalRow {
    double self_weight = 0.0;
    std::vector<double> neighbor_weights;
};

/// Dense symmetric N x N consensus matrix tied to the topology it respects.
/// Entries may only be nonzero on edges and the diagonal.
class WeightMatrix {
public:
    /// Wraps an arbitrary symmetric matrix; stochasticity is not enforced
    /// here (see check_conditions), the sparsity pattern and symmetry are.
    static WeightMatrix from_dense(std::shared_ptr<const Graph> graph, Eigen::MatrixXd entries)
    {
        if (!graph) throw Error(ErrorCode::contract_violation, "weight matrix needs a graph");
        const auto n = static_cast<Eigen::Index>(graph->size());
        if (entries.rows() != n || entries.cols() != n)
            throw Error(ErrorCode::contract_violation, "weight matrix dimension mismatch");
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (entries(i, j) != entries(j, i))
                    throw Error(ErrorCode::contract_violation, "weight matrix not symmetric");
                if (i != j && entries(i, j) != 0.0
                    && !graph->adjacent(static_cast<NodeId>(i), static_cast<NodeId>(j)))
                    throw Error(ErrorCode::contract_violation,
                                "nonzero weight outside the adjacency pattern");
            }
        }
        WeightMatrix w;
        w.rows_.resize(graph->size());
        for (NodeId i = 0; i < graph->size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            w.rows_[i].self_weight = entries(ii, ii);
            for (NodeId j : graph->neighbors(i))
                w.rows_[i].neighbor_weights.push_back(entries(ii, static_cast<Eigen::Index>(j)));
        }
        w.graph_ = std::move(graph);
        w.entries_ = std::move(entries);
        return w;
    }

    [[nodiscard]] std::size_t size() const noexcept { return graph_->size(); }
    [[nodiscard]] const Graph& graph() const noexcept { return *graph_; }
    [[nodiscard]] const std::shared_ptr<const Graph>& graph_ptr() const noexcept { return graph_; }
    [[nodiscard]] const Eigen::MatrixXd& dense() const noexcept { return entries_; }
    [[nodiscard]] const LocalRow& local_row(NodeId i) const { return rows_.at(i); }
    [[nodiscard]] double operator()(NodeId i, NodeId j) const
    {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    std::shared_ptr<const Graph> graph_;
    Eigen::MatrixXd entries_;
    std::vector<LocalRow> rows_;
};

namespace detail {

// Fills off-diagonals from `edge_weight(i, j)` symmetrically, then sets the
// diagonal to one minus the off-diagonal row sum.
template <typename EdgeWeight>
WeightMatrix build_local(std::shared_ptr<const Graph> g, EdgeWeight edge_weight)
{
    const auto n = g->size();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (auto [i, j] : g->edges()) {
        const double v = edge_weight(i, j);
        w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
    for (NodeId i = 0; i < n; ++i) {
        double off = 0.0;
        for (NodeId j : g->neighbors(i)) off += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0 - off;
    }
    return WeightMatrix::from_dense(std::move(g), std::move(w));
}

} // namespace detail

/// W_ij = 1 / (1 + max(d_i, d_j)) on edges.
inline WeightMatrix metropolis_hastings(std::shared_ptr<const Graph> g)
{
    const Graph& ref = *g;
    return detail::build_local(std::move(g), [&ref](NodeId i, NodeId j) {
        return 1.0 / (1.0 + static_cast<double>(std::max(ref.degree(i), ref.degree(j))));
    });
}

inline WeightMatrix metropolis_hastings(const Graph& g)
{
    return metropolis_hastings(std::make_shared<const Graph>(g));
}

/// W_ij = 1 / (1 + d_max) on edges.
inline WeightMatrix max_degree(std::shared_ptr<const Graph> g)
{
    const double w = 1.0 / (1.0 + static_cast<double>(g->max_degree()));
    return detail::build_local(std::move(g), [w](NodeId, NodeId) { return w; });
}

inline WeightMatrix max_degree(const Graph& g)
{
    return max_degree(std::make_shared<const Graph>(g));
}

/// W -> (I + W) / 2. Maps every eigenvalue l to (1 + l) / 2 >= 0.
inline WeightMatrix lazy_transform(const WeightMatrix& w)
{
    Eigen::MatrixXd lazy = 0.5 * w.dense();
    lazy.diagonal().array() += 0.5;
    return WeightMatrix::from_dense(w.graph_ptr(), std::move(lazy));
}

/// Row-major CSV dump with 17 significant digits.
inline void write_matrix_csv(std::ostream& os, const WeightMatrix& w)
{
    const auto old_precision = os.precision(17);
    const auto n = static_cast<Eigen::Index>(w.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j) os << ',';
            os << w.dense()(i, j);
        }
        os << '\n';
    }
    os.precision(old_precision);
}

} // namespace predcons

#endif
