#pragma once

#include <cmath>
#include <string>
#include <unordered_map>

#include "mpnnc/activation.hpp"
#include "mpnnc/errors.hpp"
#include "mpnnc/expr.hpp"
#include "mpnnc/graph.hpp"
#include "mpnnc/interpreter.hpp"
#include "mpnnc/sampling.hpp"

namespace mpnnc {

namespace detail {

inline void require_box_arity(const Expr& e, const DomainBox& box) {
    if (!arity_check(e, box.dim()))
        throw ArityError("expression uses P" + std::to_string(max_projection(e)) + " but the box has dimension " +
                         std::to_string(box.dim()));
}

class ImageBounder {
public:
    ImageBounder(DegreeBound p, const DomainBox& box) : p_(p), box_(box) {}

    Interval operator()(const Expr& e) {
        if (auto it = memo_.find(e.key()); it != memo_.end()) return it->second;
        const Interval out = std::visit(
            overloaded{
                [&](const ast::One&) { return Interval::point(1.0); },
                [&](const ast::Proj& pr) { return box_[pr.index - 1]; },
                [&](const ast::Scale& s) { return s.factor * (*this)(s.operand); },
                [&](const ast::Add& a) { return (*this)(a.lhs) + (*this)(a.rhs); },
                [&](const ast::Apply& a) { return interval_image(a.fn, (*this)(a.operand)); },
                [&](const ast::Diamond& d) {
                    const Interval y = (*this)(d.operand);
                    Interval acc = Interval::point(0.0);
                    for (std::size_t k = 1; k <= p_.value; ++k) acc = hull(acc, repeated_sum(y, k));
                    return acc;
                },
            },
            e.node().value);
        memo_.emplace(e.key(), out);
        return out;
    }

private:
    DegreeBound p_;
    const DomainBox& box_;
    std::unordered_map<const void*, Interval> memo_;
};

}  // namespace detail

/// Interval containing every value of e over G_p and the box.
inline Interval image_bounds(const Expr& e, DegreeBound p, const DomainBox& box) {
    detail::require_box_arity(e, box);
    return detail::ImageBounder(p, box)(e);
}

/// sum_i c_i * relu(a_i * e + (-b_i)) as a ReLU-MPLang expression.
inline Expr expand_relu_sum(const ReluSum& f, const Expr& e) {
    std::optional<Expr> acc;
    for (const ReluTerm& t : f.terms) {
        Expr term = Expr::one();
        if (t.a == 0.0) {
            term = Expr::constant(t.c * std::max(0.0, -t.b));
        } else {
            Expr inner = t.a == 1.0 ? e : Expr::scale(t.a, e);
            if (t.b != 0.0) inner = Expr::add(inner, Expr::constant(-t.b));
            term = Expr::apply(NamedFn::relu, inner);
            if (t.c != 1.0) term = Expr::scale(t.c, term);
        }
        acc = acc ? Expr::add(*acc, term) : term;
    }
    return acc ? *acc : Expr::constant(0.0);
}

/// ReLU-MPLang expression within eps of e over G_p and the box. ReLU-only
/// subterms are kept as they are.
inline Expr approximate(const Expr& e, DegreeBound p, const DomainBox& box, double eps,
                        const ApproxOptions& opts = {}) {
    if (!(eps > 0.0)) throw std::invalid_argument("approximation budget must be positive");
    detail::require_box_arity(e, box);
    if (classify(e).relu_only) return e;
    return std::visit(
        detail::overloaded{
            [&](const ast::One&) { return e; },
            [&](const ast::Proj&) { return e; },
            [&](const ast::Scale& s) {
                if (s.factor == 0.0) return Expr::constant(0.0);
                return Expr::scale(s.factor, approximate(s.operand, p, box, eps / std::fabs(s.factor), opts));
            },
            [&](const ast::Add& a) {
                return Expr::add(approximate(a.lhs, p, box, eps / 2.0, opts),
                                 approximate(a.rhs, p, box, eps / 2.0, opts));
            },
            [&](const ast::Apply& a) {
                const Interval y1 = image_bounds(a.operand, p, box);
                const Interval y{y1.lo - eps / 2.0, y1.hi + eps / 2.0};
                const ReluSum f2 = relu_approximate(a.fn, y, eps / 2.0, opts);
                const double delta = modulus_delta(Activation::relu_sum(f2), y, eps / 2.0);
                const Expr inner = approximate(a.operand, p, box, std::min(delta, eps / 2.0), opts);
                return expand_relu_sum(f2, inner);
            },
            [&](const ast::Diamond& d) {
                if (p.value == 0) return Expr::constant(0.0);
                return Expr::diamond(approximate(d.operand, p, box, eps / static_cast<double>(p.value), opts));
            },
        },
        e.node().value);
}

/// Largest |e1 - e2| seen over `trials` random instances of G_p x box. A
/// lower bound on the uniform distance.
inline double uniform_distance_estimate(const Expr& e1, const Expr& e2, DegreeBound p, const DomainBox& box,
                                        std::size_t trials, std::uint64_t seed, const SamplerOptions& opts = {}) {
    detail::require_box_arity(e1, box);
    detail::require_box_arity(e2, box);
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = sample_instance(p, box, trial_seed(seed, t), opts);
        const auto a = eval(e1, inst.graph, inst.features);
        const auto b = eval(e2, inst.graph, inst.features);
        for (NodeId v = 0; v < a.size(); ++v) worst = std::max(worst, std::fabs(a[v] - b[v]));
    }
    return worst;
}

}  // namespace mpnnc
