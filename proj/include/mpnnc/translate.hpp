#pragma once

#include <optional>
#include <vector>

#include "mpnnc/expr.hpp"
#include "mpnnc/mpnn.hpp"

namespace mpnnc {

/// Equivalent expression tuple for an MPNN, by substituting each layer's
/// component expressions
///   sigma(w1_j1 P1 + ... + w2_j1 <>P1 + ... + b_j)
/// into the next layer. Zero coefficients, unit scalings and id
/// applications are left out.
inline ExprTuple mpnn_to_mplang(const Mpnn& N) {
    std::vector<Expr> prev;
    for (std::size_t k = 1; k <= N.input_arity(); ++k) prev.push_back(Expr::proj(k));

    for (const Layer& L : N.layers()) {
        std::vector<Expr> summed;
        for (const Expr& e : prev) summed.push_back(Expr::diamond(e));

        std::vector<Expr> next;
        for (std::size_t j = 0; j < L.output_arity(); ++j) {
            // same grouping as layer evaluation: (own + neighbour) + bias
            auto chain = [](std::optional<Expr>& acc, double w, const Expr& e) {
                if (w == 0.0) return;
                Expr term = w == 1.0 ? e : Expr::scale(w, e);
                acc = acc ? Expr::add(*acc, term) : term;
            };
            std::optional<Expr> own, nb, acc;
            for (std::size_t k = 0; k < L.input_arity(); ++k) chain(own, L.w1()(j, k), prev[k]);
            for (std::size_t k = 0; k < L.input_arity(); ++k) chain(nb, L.w2()(j, k), summed[k]);
            if (own) acc = own;
            if (nb) acc = acc ? Expr::add(*acc, *nb) : *nb;
            chain(acc, L.bias()[j], Expr::one());
            Expr body = acc ? *acc : Expr::constant(0.0);
            next.push_back(L.activation().is(NamedFn::id) ? body : Expr::apply(L.activation(), body));
        }
        prev = std::move(next);
    }
    return ExprTuple{std::move(prev), N.input_arity()};
}

}  // namespace mpnnc
