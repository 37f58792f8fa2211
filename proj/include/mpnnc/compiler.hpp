#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mpnnc/activation.hpp"
#include "mpnnc/errors.hpp"
#include "mpnnc/expr.hpp"
#include "mpnnc/graph.hpp"
#include "mpnnc/mpnn.hpp"

namespace mpnnc {

enum class CompileMode { relu_exact, mixed, addition_free, pointwise };

inline std::string_view to_string(CompileMode m) {
    switch (m) {
        case CompileMode::relu_exact: return "relu";
        case CompileMode::mixed: return "mixed";
        case CompileMode::addition_free: return "addition-free";
        case CompileMode::pointwise: return "pointwise";
    }
    return "?";
}

/// Pre-activation enclosure of a layer over G_p and a box: one interval per
/// output component, with M the largest upper end and m the smallest lower end.
struct LayerBounds {
    std::vector<Interval> components;
    double M = 0.0;
    double m = 0.0;
};

/// Union over node degrees k = 0..p of the images of
///   (x0, x1, ..., xk) |-> w1_i . x0 + w2_i . (x1 + ... + xk) + b_i
/// over box^(k+1), evaluated in the same order as layer evaluation so that
/// rounded values stay inside.
inline LayerBounds layer_output_bounds(const Layer& L, DegreeBound p, const DomainBox& box) {
    if (box.dim() != L.input_arity())
        throw ArityError("bounding box has dimension " + std::to_string(box.dim()) + " but the layer reads " +
                         std::to_string(L.input_arity()) + " channels");
    const std::size_t d = L.input_arity();
    LayerBounds out;
    out.M = -std::numeric_limits<double>::infinity();
    out.m = std::numeric_limits<double>::infinity();
    std::vector<Interval> nsum(d);
    for (std::size_t i = 0; i < L.output_arity(); ++i) {
        double own_lo = 0.0, own_hi = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const Interval t = L.w1()(i, k) * box[k];
            own_lo += t.lo;
            own_hi += t.hi;
        }
        std::optional<Interval> comp;
        for (std::size_t deg = 0; deg <= p.value; ++deg) {
            double nb_lo = 0.0, nb_hi = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const Interval t = L.w2()(i, k) * repeated_sum(box[k], deg);
                nb_lo += t.lo;
                nb_hi += t.hi;
            }
            const Interval z{own_lo + nb_lo + L.bias()[i], own_hi + nb_hi + L.bias()[i]};
            comp = comp ? hull(*comp, z) : z;
        }
        out.components.push_back(*comp);
        out.M = std::max(out.M, comp->hi);
        out.m = std::min(out.m, comp->lo);
    }
    return out;
}

/// Post-activation enclosure of a layer's output.
inline DomainBox layer_image(const Layer& L, DegreeBound p, const DomainBox& box) {
    const LayerBounds pre = layer_output_bounds(L, p, box);
    std::vector<Interval> sides;
    for (const Interval& z : pre.components) sides.push_back(interval_image(L.activation(), z));
    return DomainBox(std::move(sides));
}

/// Rewrites L and K to share one merged activation. L' agrees with L over
/// G_p and box_L, K' with K over G_p and box_K.
inline std::pair<Layer, Layer> merge_layers(const Layer& L, const Layer& K, DegreeBound p, const DomainBox& box_L,
                                            const DomainBox& box_K) {
    const double M = layer_output_bounds(L, p, box_L).M;
    const double m = layer_output_bounds(K, p, box_K).m;
    const Activation shared = merge(L.activation(), M, K.activation(), m);
    std::vector<double> bl = L.bias(), bk = K.bias();
    for (double& x : bl) x -= M + 1.0;
    for (double& x : bk) x += 1.0 - m;
    return {Layer(L.w1(), L.w2(), std::move(bl), shared), Layer(K.w1(), K.w2(), std::move(bk), shared)};
}

/// One layer equivalent to L || K over G_p and box_L x box_K.
inline Layer parallel_mixed(const Layer& L, const Layer& K, DegreeBound p, const DomainBox& box_L,
                            const DomainBox& box_K) {
    auto [l, k] = merge_layers(L, K, p, box_L, box_K);
    return parallel_layers(l, k);
}

// ---------------------------------------------------------------------------
// ReLU compilation

namespace detail {

inline Layer constant_layer(std::size_t d) { return Layer(Matrix(1, d), Matrix(1, d), {1.0}, NamedFn::id); }

inline Layer projection_layer(std::size_t d, std::size_t index) {
    Matrix w1(1, d);
    w1(0, index - 1) = 1.0;
    return Layer(std::move(w1), Matrix(1, d), {0.0}, NamedFn::id);
}

inline Layer sum_pair_layer() {
    return Layer(Matrix::from_rows({{1.0, 1.0}}), Matrix(1, 2), {0.0}, NamedFn::id);
}

inline std::vector<Layer> then(const Mpnn& N, Layer L) {
    std::vector<Layer> layers = N.layers();
    layers.push_back(std::move(L));
    return layers;
}

inline void require_arity(const Expr& e, std::size_t d) {
    if (!arity_check(e, d))
        throw ArityError("expression uses P" + std::to_string(max_projection(e)) + " but input arity is " +
                         std::to_string(d));
}

class ReluCompiler {
public:
    explicit ReluCompiler(std::size_t d) : d_(d) {}

    const Mpnn& operator()(const Expr& e) {
        if (auto it = memo_.find(e.key()); it != memo_.end()) return it->second;
        Mpnn out = std::visit(
            overloaded{
                [&](const ast::One&) { return Mpnn{constant_layer(d_)}; },
                [&](const ast::Proj& p) { return Mpnn{projection_layer(d_, p.index)}; },
                [&](const ast::Scale& s) {
                    return normalize_relu(then((*this)(s.operand), Layer::scalar(s.factor, 0.0, 0.0, NamedFn::id)));
                },
                [&](const ast::Add& a) {
                    Mpnn both = concat_mpnns((*this)(a.lhs), (*this)(a.rhs));
                    return normalize_relu(then(both, sum_pair_layer()));
                },
                [&](const ast::Apply& a) {
                    if (!a.fn.is(NamedFn::relu))
                        throw ModeError("ReLU compilation cannot apply " + describe(a.fn));
                    return normalize_relu(then((*this)(a.operand), Layer::scalar(1.0, 0.0, 0.0, NamedFn::relu)));
                },
                [&](const ast::Diamond& dm) {
                    return normalize_relu(then((*this)(dm.operand), Layer::scalar(0.0, 1.0, 0.0, NamedFn::id)));
                },
            },
            e.node().value);
        return memo_.emplace(e.key(), std::move(out)).first->second;
    }

private:
    std::size_t d_;
    std::unordered_map<const void*, Mpnn> memo_;
};

}  // namespace detail

/// ReLU-MPNN equivalent to a ReLU-MPLang expression on all graphs and all
/// feature maps.
inline Mpnn compile_relu(const Expr& e, std::size_t d) {
    detail::require_arity(e, d);
    return detail::ReluCompiler(d)(e);
}

inline Mpnn compile_relu_tuple(const ExprTuple& t) {
    if (t.components.empty()) throw ArityError("empty expression tuple");
    detail::ReluCompiler compile(t.input_arity);
    for (const Expr& e : t.components) detail::require_arity(e, t.input_arity);
    Mpnn out = compile(t.components.front());
    for (std::size_t j = 1; j < t.components.size(); ++j) out = concat_mpnns(out, compile(t.components[j]));
    return out;
}

// ---------------------------------------------------------------------------
// Bounded-degree, bounded-domain compilation with arbitrary activations

/// A compiled network together with the box each layer reads and each
/// layer's pre-activation bounds over G_p.
struct CompiledNetwork {
    Mpnn network;
    std::vector<DomainBox> layer_inputs;
    std::vector<LayerBounds> bounds;
    DomainBox output;
};

namespace detail {

struct Piece {
    std::vector<Layer> layers;
    std::vector<DomainBox> inputs;
    DomainBox output;
};

class MixedCompiler {
public:
    MixedCompiler(std::size_t d, DegreeBound p, DomainBox box) : d_(d), p_(p), box_(std::move(box)) {}

    Piece operator()(const Expr& e) {
        return std::visit(
            overloaded{
                [&](const ast::One&) { return start(constant_layer(d_)); },
                [&](const ast::Proj& pr) { return start(projection_layer(d_, pr.index)); },
                [&](const ast::Scale& s) {
                    return append((*this)(s.operand), Layer::scalar(s.factor, 0.0, 0.0, NamedFn::id));
                },
                [&](const ast::Add& a) { return append(concat((*this)(a.lhs), (*this)(a.rhs)), sum_pair_layer()); },
                [&](const ast::Apply& a) { return append((*this)(a.operand), Layer::scalar(1.0, 0.0, 0.0, a.fn)); },
                [&](const ast::Diamond& dm) {
                    return append((*this)(dm.operand), Layer::scalar(0.0, 1.0, 0.0, NamedFn::id));
                },
            },
            e.node().value);
    }

    Piece start(Layer L) {
        Piece out;
        out.output = box_;
        return append(std::move(out), std::move(L));
    }

    Piece append(Piece piece, Layer L) {
        DomainBox image = layer_image(L, p_, piece.output);
        piece.inputs.push_back(std::move(piece.output));
        piece.layers.push_back(std::move(L));
        piece.output = std::move(image);
        return piece;
    }

    /// A | B. Shorter side gets identity id-layers; layers with differing
    /// activations are merged against the boxes they read.
    Piece concat(Piece a, Piece b) {
        while (a.layers.size() < b.layers.size()) a = append(std::move(a), Layer::identity(a.output.dim()));
        while (b.layers.size() < a.layers.size()) b = append(std::move(b), Layer::identity(b.output.dim()));
        Piece out;
        for (std::size_t i = 0; i < a.layers.size(); ++i) {
            const Layer& l = a.layers[i];
            const Layer& k = b.layers[i];
            const bool same = l.activation() == k.activation();
            if (i == 0) {
                if (same) {
                    out.layers.push_back(concat_layers(l, k));
                } else {
                    auto [l2, k2] = merge_layers(l, k, p_, a.inputs[0], b.inputs[0]);
                    out.layers.push_back(concat_layers(l2, k2));
                }
                out.inputs.push_back(a.inputs[0]);
            } else {
                out.layers.push_back(same ? parallel_layers(l, k) : parallel_mixed(l, k, p_, a.inputs[i], b.inputs[i]));
                out.inputs.push_back(a.inputs[i].times(b.inputs[i]));
            }
        }
        out.output = a.output.times(b.output);
        return out;
    }

    CompiledNetwork finish(Piece piece) const {
        CompiledNetwork out{Mpnn(piece.layers), piece.inputs, {}, piece.output};
        for (std::size_t i = 0; i < piece.layers.size(); ++i)
            out.bounds.push_back(layer_output_bounds(piece.layers[i], p_, piece.inputs[i]));
        return out;
    }

private:
    std::size_t d_;
    DegreeBound p_;
    DomainBox box_;
};

inline void check_mixed_domain(std::size_t d, const DomainBox& box) {
    if (box.dim() != d)
        throw ArityError("domain box has dimension " + std::to_string(box.dim()) + " but input arity is " +
                         std::to_string(d));
    for (const Interval& side : box.sides())
        if (!std::isfinite(side.lo) || !std::isfinite(side.hi)) throw ModeError("mixed compilation needs a bounded box");
}

}  // namespace detail

/// MPNN equivalent to e over G_p and box, for any catalog activations.
inline CompiledNetwork compile_mixed(const Expr& e, std::size_t d, DegreeBound p, const DomainBox& box) {
    detail::require_arity(e, d);
    detail::check_mixed_domain(d, box);
    detail::MixedCompiler compile(d, p, box);
    return compile.finish(compile(e));
}

inline CompiledNetwork compile_mixed_tuple(const ExprTuple& t, DegreeBound p, const DomainBox& box) {
    if (t.components.empty()) throw ArityError("empty expression tuple");
    for (const Expr& e : t.components) detail::require_arity(e, t.input_arity);
    detail::check_mixed_domain(t.input_arity, box);
    detail::MixedCompiler compile(t.input_arity, p, box);
    detail::Piece acc = compile(t.components.front());
    for (std::size_t j = 1; j < t.components.size(); ++j) acc = compile.concat(std::move(acc), compile(t.components[j]));
    return compile.finish(std::move(acc));
}

// ---------------------------------------------------------------------------
// Addition-free fast paths

namespace detail {

inline std::vector<Layer> compile_without_addition(const Expr& e, std::size_t d, bool allow_diamond) {
    return std::visit(
        overloaded{
            [&](const ast::One&) { return std::vector<Layer>{constant_layer(d)}; },
            [&](const ast::Proj& p) { return std::vector<Layer>{projection_layer(d, p.index)}; },
            [&](const ast::Scale& s) {
                std::vector<Layer> layers = compile_without_addition(s.operand, d, allow_diamond);
                const Layer& last = layers.back();
                if (last.activation().is(NamedFn::id)) {
                    std::vector<double> b = last.bias();
                    for (double& x : b) x *= s.factor;
                    layers.back() = Layer(last.w1().scaled(s.factor), last.w2().scaled(s.factor), std::move(b),
                                          NamedFn::id);
                } else {
                    layers.push_back(Layer::scalar(s.factor, 0.0, 0.0, NamedFn::id));
                }
                return layers;
            },
            [&](const ast::Add&) -> std::vector<Layer> {
                throw ModeError("expression uses '+'; it is not addition-free");
            },
            [&](const ast::Apply& a) {
                std::vector<Layer> layers = compile_without_addition(a.operand, d, allow_diamond);
                if (layers.back().activation().is(NamedFn::id))
                    layers.back() = layers.back().with_activation(a.fn);
                else
                    layers.push_back(Layer::scalar(1.0, 0.0, 0.0, a.fn));
                return layers;
            },
            [&](const ast::Diamond& dm) {
                if (!allow_diamond) throw ModeError("expression uses '<>'; it is not summation-free");
                std::vector<Layer> layers = compile_without_addition(dm.operand, d, allow_diamond);
                const Layer& last = layers.back();
                const bool affine_in_own = last.activation().is(NamedFn::id) &&
                                           last.w2() == Matrix(last.w2().rows(), last.w2().cols()) &&
                                           std::all_of(last.bias().begin(), last.bias().end(),
                                                       [](double x) { return x == 0.0; });
                // sum_u W1 x(u) = W1 sum_u x(u) folds into a single layer
                if (affine_in_own)
                    layers.back() = Layer(Matrix(last.w1().rows(), last.w1().cols()), last.w1(), last.bias(),
                                          NamedFn::id);
                else
                    layers.push_back(Layer::scalar(0.0, 1.0, 0.0, NamedFn::id));
                return layers;
            },
        },
        e.node().value);
}

}  // namespace detail

/// (F u {id})-MPNN for an addition-free expression, exact on all inputs.
inline Mpnn compile_addition_free(const Expr& e, std::size_t d) {
    detail::require_arity(e, d);
    return Mpnn(detail::compile_without_addition(e, d, true));
}

/// F-MPNN for an addition-free, summation-free expression; id only as a
/// final scaling layer.
inline Mpnn compile_pointwise(const Expr& e, std::size_t d) {
    detail::require_arity(e, d);
    return Mpnn(detail::compile_without_addition(e, d, false));
}

/// Strongest exact mode for e: pointwise, then addition-free, then ReLU,
/// then mixed when a degree bound and box are available.
inline std::optional<CompileMode> strongest_mode(const ExprClass& c, bool have_domain) {
    if (c.addition_free && c.summation_free) return CompileMode::pointwise;
    if (c.addition_free) return CompileMode::addition_free;
    if (c.relu_only) return CompileMode::relu_exact;
    if (have_domain) return CompileMode::mixed;
    return std::nullopt;
}

}  // namespace mpnnc
