#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mpnnc/errors.hpp"
#include "mpnnc/expr.hpp"
#include "mpnnc/graph.hpp"

namespace mpnnc {

namespace detail {

inline void check_instance(const Graph& g, const FeatureMap& chi) {
    if (chi.node_count() != g.node_count())
        throw ArityError("feature map has " + std::to_string(chi.node_count()) + " rows but the graph has " +
                         std::to_string(g.node_count()) + " nodes");
}

// Bottom-up evaluation of every subterm on every node. Shared subterms are
// evaluated once per call.
class Evaluator {
public:
    Evaluator(const Graph& g, const FeatureMap& chi) : g_(g), chi_(chi) {}

    const std::vector<double>& operator()(const Expr& e) {
        if (auto it = memo_.find(e.key()); it != memo_.end()) return it->second;
        std::vector<double> out(g_.node_count());
        std::visit(overloaded{
                       [&](const ast::One&) { std::fill(out.begin(), out.end(), 1.0); },
                       [&](const ast::Proj& p) {
                           for (NodeId v = 0; v < out.size(); ++v) out[v] = chi_[v][p.index - 1];
                       },
                       [&](const ast::Scale& s) {
                           const auto& x = (*this)(s.operand);
                           for (NodeId v = 0; v < out.size(); ++v) out[v] = s.factor * x[v];
                       },
                       [&](const ast::Add& a) {
                           const auto& x = (*this)(a.lhs);
                           const auto& y = (*this)(a.rhs);
                           for (NodeId v = 0; v < out.size(); ++v) out[v] = x[v] + y[v];
                       },
                       [&](const ast::Apply& a) {
                           const auto& x = (*this)(a.operand);
                           for (NodeId v = 0; v < out.size(); ++v) out[v] = a.fn(x[v]);
                       },
                       [&](const ast::Diamond& d) {
                           const auto& x = (*this)(d.operand);
                           for (NodeId v = 0; v < out.size(); ++v) {
                               double acc = 0.0;
                               for (NodeId u : g_.neighbors(v)) acc += x[u];
                               out[v] = acc;
                           }
                       },
                   },
                   e.node().value);
        return memo_.emplace(e.key(), std::move(out)).first->second;
    }

private:
    const Graph& g_;
    const FeatureMap& chi_;
    // Keys are node addresses; the expressions outlive the evaluator.
    std::unordered_map<const void*, std::vector<double>> memo_;
};

}  // namespace detail

/// Value of e at every node of g under chi.
inline std::vector<double> eval(const Expr& e, const Graph& g, const FeatureMap& chi) {
    detail::check_instance(g, chi);
    if (!arity_check(e, chi.dim()))
        throw ArityError("expression uses P" + std::to_string(max_projection(e)) + " but features have dimension " +
                         std::to_string(chi.dim()));
    return detail::Evaluator(g, chi)(e);
}

/// Component-wise evaluation; output dimension = number of components.
inline FeatureMap eval_tuple(const ExprTuple& t, const Graph& g, const FeatureMap& chi) {
    detail::check_instance(g, chi);
    if (chi.dim() != t.input_arity)
        throw ArityError("tuple expects input arity " + std::to_string(t.input_arity) + ", features have " +
                         std::to_string(chi.dim()));
    for (const Expr& e : t.components)
        if (!arity_check(e, chi.dim()))
            throw ArityError("expression uses P" + std::to_string(max_projection(e)) +
                             " but features have dimension " + std::to_string(chi.dim()));
    detail::Evaluator evaluator(g, chi);
    FeatureMap out(g.node_count(), t.components.size());
    for (std::size_t j = 0; j < t.components.size(); ++j) {
        const auto& column = evaluator(t.components[j]);
        for (NodeId v = 0; v < g.node_count(); ++v) out[v][j] = column[v];
    }
    return out;
}

}  // namespace mpnnc
