#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mpnnc/graph.hpp"
#include "mpnnc/mpnn.hpp"

// Worked GFMTs with brute-force oracles. The oracles walk the raw edge list
// and never touch the interpreter or the MPNN evaluator.

namespace mpnnc::fixtures {

inline double oracle_t1(double x, double y) { return (x + y) / 2.0; }

inline double oracle_t2(double x, double y) { return x > y ? x : y; }

/// Largest feature among the neighbours of v. Undefined on isolated nodes.
inline double oracle_t3(const Graph& g, const FeatureMap& chi, NodeId v) {
    std::optional<double> best;
    for (const Edge& e : g.edges()) {
        NodeId other;
        if (e.first == v)
            other = e.second;
        else if (e.second == v)
            other = e.first;
        else
            continue;
        const double x = chi.at(other, 0);
        if (!best || x > *best) best = x;
    }
    if (!best) throw std::domain_error("T3 is undefined on a node without neighbours");
    return *best;
}

/// Sum of chi(w) over all walks v - u - w, including w = v.
inline double oracle_t4(const Graph& g, const FeatureMap& chi, NodeId v) {
    const std::vector<Edge> edges = g.edges();
    std::vector<std::pair<NodeId, NodeId>> arcs;
    for (const Edge& e : edges) {
        arcs.emplace_back(e.first, e.second);
        arcs.emplace_back(e.second, e.first);
    }
    double total = 0.0;
    for (const auto& [a, u] : arcs) {
        if (a != v) continue;
        for (const auto& [b, w] : arcs)
            if (b == u) total += chi.at(w, 0);
    }
    return total;
}

/// T2 as the two-layer ReLU network (y - x, x, -x) -> a + b - c.
inline Mpnn t2_network() {
    Layer first(Matrix::from_rows({{-1.0, 1.0}, {1.0, 0.0}, {-1.0, 0.0}}), Matrix(3, 2), {0.0, 0.0, 0.0},
                NamedFn::relu);
    Layer second(Matrix::from_rows({{1.0, 1.0, -1.0}}), Matrix(1, 3), {0.0}, NamedFn::id);
    return Mpnn{first, second};
}

/// T_sum as the single layer (0, 1, 0, id).
inline Mpnn t_sum_network() { return Mpnn{Layer::scalar(0.0, 1.0, 0.0, NamedFn::id)}; }

struct Fixture {
    std::string name;
    std::size_t input_arity;
    /// MPLang text, when the GFMT has one.
    std::optional<std::string> expression;
    std::function<double(const Graph&, const FeatureMap&, NodeId)> oracle;
};

inline const std::vector<Fixture>& all() {
    static const std::vector<Fixture> list{
        {"T1", 2, "0.5*P1 + 0.5*P2",
         [](const Graph&, const FeatureMap& chi, NodeId v) { return oracle_t1(chi.at(v, 0), chi.at(v, 1)); }},
        {"T2", 2, "relu(P2 + -1*P1) + P1",
         [](const Graph&, const FeatureMap& chi, NodeId v) { return oracle_t2(chi.at(v, 0), chi.at(v, 1)); }},
        {"T3", 1, std::nullopt, oracle_t3},
        {"T4", 1, "<><>P1", oracle_t4},
        {"T_half", 1, "0.5*P1", [](const Graph&, const FeatureMap& chi, NodeId v) { return chi.at(v, 0) / 2.0; }},
        {"T_sum", 1, "<>P1",
         [](const Graph& g, const FeatureMap& chi, NodeId v) {
             double s = 0.0;
             for (const Edge& e : g.edges()) {
                 if (e.first == v) s += chi.at(e.second, 0);
                 if (e.second == v) s += chi.at(e.first, 0);
             }
             return s;
         }},
        {"P1", 2, "P1", [](const Graph&, const FeatureMap& chi, NodeId v) { return chi.at(v, 0); }},
        {"P2", 2, "P2", [](const Graph&, const FeatureMap& chi, NodeId v) { return chi.at(v, 1); }},
    };
    return list;
}

inline const Fixture& find(std::string_view name) {
    const auto& list = all();
    auto it = std::find_if(list.begin(), list.end(), [&](const Fixture& f) { return f.name == name; });
    if (it == list.end()) throw std::out_of_range("no fixture named '" + std::string(name) + "'");
    return *it;
}

}  // namespace mpnnc::fixtures
