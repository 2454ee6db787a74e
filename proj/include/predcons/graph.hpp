#ifndef PREDCONS_GRAPH_HPP
#define PREDCONS_GRAPH_HPP

// Undirected communication topologies: chain, 2-D grid, random geometric
// graph. Graphs are immutable once built.

#include "predcons/error.hpp"
#include "predcons/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace predcons {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

enum class Topology { chain, grid, rgg, custom };

inline std::string to_string(Topology t)
{
    switch (t) {
    case Topology::chain: return "chain";
    case Topology::grid: return "grid";
    case Topology::rgg: return "rgg";
    case Topology::custom: return "custom";
    }
    return "custom";
}

class Graph {
public:
    /// Builds from an undirected edge list. Duplicate edges are merged;
    /// self-loops and out-of-range ids are contract violations.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                            Topology kind = Topology::custom)
    {
        if (n == 0) throw Error(ErrorCode::invalid_size, "graph needs at least one node");
        Graph g;
        g.kind_ = kind;
        g.neighbors_.assign(n, {});
        for (auto [i, j] : edges) {
            if (i >= n || j >= n)
                throw Error(ErrorCode::contract_violation, "edge endpoint out of range");
            if (i == j) throw Error(ErrorCode::contract_violation, "self-loop");
            g.neighbors_[i].push_back(j);
            g.neighbors_[j].push_back(i);
        }
        for (auto& nb : g.neighbors_) {
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        }
        return g;
    }

    [[nodiscard]] std::size_t size() const noexcept { return neighbors_.size(); }
    [[nodiscard]] std::span<const NodeId> neighbors(NodeId i) const { return neighbors_.at(i); }
    [[nodiscard]] std::size_t degree(NodeId i) const { return neighbors_.at(i).size(); }

    [[nodiscard]] std::size_t max_degree() const noexcept
    {
        std::size_t d = 0;
        for (const auto& nb : neighbors_) d = std::max(d, nb.size());
        return d;
    }

    [[nodiscard]] bool adjacent(NodeId i, NodeId j) const
    {
        const auto& nb = neighbors_.at(i);
        return std::binary_search(nb.begin(), nb.end(), j);
    }

    [[nodiscard]] std::size_t edge_count() const noexcept
    {
        std::size_t twice = 0;
        for (const auto& nb : neighbors_) twice += nb.size();
        return twice / 2;
    }

    /// Edges (i, j) with i < j in ascending lexicographic order.
    [[nodiscard]] std::vector<Edge> edges() const
    {
        std::vector<Edge> out;
        for (NodeId i = 0; i < size(); ++i)
            for (NodeId j : neighbors_[i])
                if (i < j) out.emplace_back(i, j);
        return out;
    }

    [[nodiscard]] Topology kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t grid_side() const noexcept { return grid_side_; }
    [[nodiscard]] const std::optional<std::vector<Point2>>& positions() const noexcept
    {
        return positions_;
    }
    /// Number of rejected disconnected samples before an RGG was accepted.
    [[nodiscard]] std::size_t retries() const noexcept { return retries_; }

    /// Hop distances from `source`; unreachable nodes get SIZE_MAX.
    [[nodiscard]] std::vector<std::size_t> bfs_distances(NodeId source) const
    {
        std::vector<std::size_t> dist(size(), static_cast<std::size_t>(-1));
        std::queue<NodeId> q;
        dist.at(source) = 0;
        q.push(source);
        while (!q.empty()) {
            const NodeId u = q.front();
            q.pop();
            for (NodeId v : neighbors_[u]) {
                if (dist[v] == static_cast<std::size_t>(-1)) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
            }
        }
        return dist;
    }

    [[nodiscard]] bool is_connected() const
    {
        const auto dist = bfs_distances(0);
        return std::none_of(dist.begin(), dist.end(),
                            [](std::size_t d) { return d == static_cast<std::size_t>(-1); });
    }

    friend bool operator==(const Graph& a, const Graph& b)
    {
        return a.neighbors_ == b.neighbors_;
    }

private:
    friend Graph make_chain(std::size_t);
    friend Graph make_grid(std::size_t);
    friend Graph make_rgg(std::size_t, Seed, std::size_t);

    std::vector<std::vector<NodeId>> neighbors_;
    std::optional<std::vector<Point2>> positions_;
    Topology kind_ = Topology::custom;
    std::size_t grid_side_ = 0;
    std::size_t retries_ = 0;
};

inline Graph make_chain(std::size_t n)
{
    if (n < 2) throw Error(ErrorCode::invalid_size, "chain needs n >= 2");
    std::vector<Edge> edges;
    for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return Graph::from_edges(n, edges, Topology::chain);
}

/// side x side 4-neighbour lattice; node id = row * side + col.
inline Graph make_grid(std::size_t side)
{
    if (side < 2) throw Error(ErrorCode::invalid_size, "grid needs side >= 2");
    std::vector<Edge> edges;
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            const NodeId id = r * side + c;
            if (c + 1 < side) edges.emplace_back(id, id + 1);
            if (r + 1 < side) edges.emplace_back(id, id + side);
        }
    }
    auto g = Graph::from_edges(side * side, edges, Topology::grid);
    g.grid_side_ = side;
    return g;
}

inline Graph make_complete(std::size_t n)
{
    if (n < 2) throw Error(ErrorCode::invalid_size, "complete graph needs n >= 2");
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return Graph::from_edges(n, edges);
}

inline double rgg_radius(std::size_t n)
{
    return std::sqrt(2.0 * std::log(static_cast<double>(n)) / static_cast<double>(n));
}

inline constexpr std::size_t default_rgg_retry_cap = 100;

/// Random geometric graph on the unit square with connection radius
/// sqrt(2 log n / n). Disconnected samples are redrawn from derived seeds.
inline Graph make_rgg(std::size_t n, Seed seed, std::size_t retry_cap = default_rgg_retry_cap)
{
    if (n < 2) throw Error(ErrorCode::invalid_size, "rgg needs n >= 2");
    const double r2 = rgg_radius(n) * rgg_radius(n);
    for (std::size_t attempt = 0; attempt <= retry_cap; ++attempt) {
        Rng rng(derive_seed(seed, attempt));
        std::vector<Point2> pts(n);
        for (auto& p : pts) {
            p.x = rng.uniform();
            p.y = rng.uniform();
        }
        std::vector<Edge> edges;
        for (NodeId i = 0; i < n; ++i) {
            for (NodeId j = i + 1; j < n; ++j) {
                const double dx = pts[i].x - pts[j].x;
                const double dy = pts[i].y - pts[j].y;
                if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
            }
        }
        auto g = Graph::from_edges(n, edges, Topology::rgg);
        if (!g.is_connected()) continue;
        g.positions_ = std::move(pts);
        g.retries_ = attempt;
        return g;
    }
    throw Error(ErrorCode::generation_failure,
                "no connected rgg sample for n=" + std::to_string(n) + " within "
                    + std::to_string(retry_cap) + " retries");
}

inline std::size_t diameter(const Graph& g)
{
    std::size_t d = 0;
    for (NodeId s = 0; s < g.size(); ++s) {
        for (std::size_t h : g.bfs_distances(s)) {
            if (h == static_cast<std::size_t>(-1))
                throw Error(ErrorCode::infinite_diameter, "graph is disconnected");
            d = std::max(d, h);
        }
    }
    return d;
}

// Plain-text edge list: first line n, then "i j" per edge, ascending.
inline void write_edge_list(std::ostream& os, const Graph& g)
{
    os << g.size() << '\n';
    for (auto [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

inline Graph read_edge_list(std::istream& is)
{
    std::size_t n = 0;
    if (!(is >> n)) throw Error(ErrorCode::contract_violation, "edge list: missing node count");
    std::vector<Edge> edges;
    NodeId i = 0;
    NodeId j = 0;
    while (is >> i >> j) edges.emplace_back(i, j);
    if (!is.eof()) throw Error(ErrorCode::contract_violation, "edge list: malformed pair");
    return Graph::from_edges(n, edges);
}

} // namespace predcons

#endif
