#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpnnc/errors.hpp"
#include "mpnnc/interval.hpp"

namespace mpnnc {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

enum class GraphDefect { loop, dangling };

struct GraphIssue {
    GraphDefect defect;
    Edge edge;

    std::string message() const {
        std::string pair = "(" + std::to_string(edge.first) + "," + std::to_string(edge.second) + ")";
        return defect == GraphDefect::loop ? "loop at edge " + pair
                                           : "dangling endpoint in edge " + pair;
    }
};

/// First violated invariant of an edge list over nodes 0..node_count-1, if any.
inline std::optional<GraphIssue> validate(std::size_t node_count, std::span<const Edge> edges) {
    for (const Edge& e : edges) {
        if (e.first >= node_count || e.second >= node_count) return GraphIssue{GraphDefect::dangling, e};
        if (e.first == e.second) return GraphIssue{GraphDefect::loop, e};
    }
    return std::nullopt;
}

/// Finite undirected loop-free graph on dense node ids. Neighbour lists are
/// kept in ascending order so neighbour sums are reproducible bit for bit.
class Graph {
public:
    Graph() = default;

    /// Symmetrizes `edges`; duplicates collapse. Throws GraphError on a loop
    /// or an endpoint >= node_count.
    explicit Graph(std::size_t node_count, std::span<const Edge> edges = {})
        : adjacency_(node_count) {
        if (auto issue = validate(node_count, edges)) throw GraphError(issue->message());
        for (const auto& [u, v] : edges) {
            adjacency_[u].push_back(v);
            adjacency_[v].push_back(u);
        }
        for (auto& list : adjacency_) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    }

    Graph(std::size_t node_count, std::initializer_list<Edge> edges)
        : Graph(node_count, std::span<const Edge>(edges.begin(), edges.size())) {}

    std::size_t node_count() const { return adjacency_.size(); }

    std::span<const NodeId> neighbors(NodeId v) const {
        if (v >= adjacency_.size()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
        return adjacency_[v];
    }

    std::size_t degree(NodeId v) const { return neighbors(v).size(); }

    std::size_t max_degree() const {
        std::size_t best = 0;
        for (const auto& list : adjacency_) best = std::max(best, list.size());
        return best;
    }

    /// Each undirected edge once, as (u, v) with u < v, sorted.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (NodeId u = 0; u < adjacency_.size(); ++u)
            for (NodeId v : adjacency_[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::vector<NodeId>> adjacency_;
};

/// Upper bound p on node degree; selects the graph class G_p.
struct DegreeBound {
    std::size_t value = 0;
};

/// Per-node real vectors, stored row-major (one row of `dim` values per node).
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(std::size_t node_count, std::size_t dim, double fill = 0.0)
        : node_count_(node_count), dim_(dim), values_(node_count * dim, fill) {}

    std::size_t node_count() const { return node_count_; }
    std::size_t dim() const { return dim_; }

    std::span<double> operator[](NodeId v) { return {values_.data() + v * dim_, dim_}; }
    std::span<const double> operator[](NodeId v) const { return {values_.data() + v * dim_, dim_}; }

    double& at(NodeId v, std::size_t k) { return values_.at(v * dim_ + k); }
    double at(NodeId v, std::size_t k) const { return values_.at(v * dim_ + k); }

    std::span<const double> data() const { return values_; }

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    std::size_t node_count_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

/// Axis-aligned closed box in R^d; the feature domain X.
class DomainBox {
public:
    DomainBox() = default;
    explicit DomainBox(std::vector<Interval> sides) : sides_(std::move(sides)) {}

    static DomainBox cube(std::size_t dim, double lo, double hi) {
        return DomainBox(std::vector<Interval>(dim, Interval{lo, hi}));
    }

    std::size_t dim() const { return sides_.size(); }
    const Interval& operator[](std::size_t i) const { return sides_.at(i); }
    std::span<const Interval> sides() const { return sides_; }

    bool contains(std::span<const double> x) const {
        if (x.size() != sides_.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!sides_[i].contains(x[i])) return false;
        return true;
    }

    /// Cartesian product: this box followed by `other`.
    DomainBox times(const DomainBox& other) const {
        std::vector<Interval> s = sides_;
        s.insert(s.end(), other.sides_.begin(), other.sides_.end());
        return DomainBox(std::move(s));
    }

    friend bool operator==(const DomainBox&, const DomainBox&) = default;

private:
    std::vector<Interval> sides_;
};

/// Random graph on n nodes with max degree <= p. Candidate edges are drawn
/// uniformly and rejected when an endpoint is already at degree p.
inline Graph random_graph(std::size_t n, DegreeBound p, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("random_graph needs at least one node");
    std::mt19937_64 rng(seed);
    const std::size_t cap = std::min(p.value, n - 1);
    std::vector<Edge> edges;
    if (cap > 0) {
        std::vector<std::size_t> deg(n, 0);
        std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
        std::uniform_int_distribution<std::size_t> attempts_dist(0, n * cap);
        std::uniform_int_distribution<NodeId> node_dist(0, n - 1);
        const std::size_t attempts = attempts_dist(rng);
        for (std::size_t i = 0; i < attempts; ++i) {
            NodeId u = node_dist(rng), v = node_dist(rng);
            if (u == v || present[u][v] || deg[u] >= cap || deg[v] >= cap) continue;
            present[u][v] = present[v][u] = true;
            ++deg[u];
            ++deg[v];
            edges.emplace_back(std::min(u, v), std::max(u, v));
        }
    }
    return Graph(n, edges);
}

/// Feature map with every coordinate uniform in the matching side of `box`.
inline FeatureMap random_features(const Graph& g, const DomainBox& box, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    FeatureMap chi(g.node_count(), box.dim());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        for (std::size_t k = 0; k < box.dim(); ++k) {
            const Interval& side = box[k];
            std::uniform_real_distribution<double> dist(side.lo, side.hi);
            chi[v][k] = std::clamp(dist(rng), side.lo, side.hi);
        }
    }
    return chi;
}

}  // namespace mpnnc
