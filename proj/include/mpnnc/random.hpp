#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mpnnc/activation.hpp"
#include "mpnnc/expr.hpp"
#include "mpnnc/mpnn.hpp"

namespace mpnnc {

struct RandomExprOptions {
    std::size_t depth = 4;
    std::size_t input_arity = 2;
    std::vector<Activation> functions{NamedFn::relu};
    double scalar_bound = 2.0;
};

namespace detail {

inline Expr random_expr_at(std::mt19937_64& rng, const RandomExprOptions& o, std::size_t depth) {
    std::uniform_int_distribution<int> pick(0, depth == 0 ? 1 : 5);
    std::uniform_real_distribution<double> scalar(-o.scalar_bound, o.scalar_bound);
    switch (pick(rng)) {
        case 0: return Expr::one();
        case 1: return Expr::proj(std::uniform_int_distribution<std::size_t>(1, o.input_arity)(rng));
        case 2: {
            const double a = scalar(rng);
            return Expr::scale(a, random_expr_at(rng, o, depth - 1));
        }
        case 3: {
            Expr lhs = random_expr_at(rng, o, depth - 1);
            return Expr::add(std::move(lhs), random_expr_at(rng, o, depth - 1));
        }
        case 4: {
            const auto& f = o.functions.at(std::uniform_int_distribution<std::size_t>(0, o.functions.size() - 1)(rng));
            return Expr::apply(f, random_expr_at(rng, o, depth - 1));
        }
        default: return Expr::diamond(random_expr_at(rng, o, depth - 1));
    }
}

}  // namespace detail

/// Expression of depth at most o.depth; constructors uniform, leaves forced
/// when the depth budget runs out.
inline Expr random_expr(std::uint64_t seed, const RandomExprOptions& o = {}) {
    std::mt19937_64 rng(seed);
    return detail::random_expr_at(rng, o, o.depth);
}

/// Every activation form in the catalog: the named functions plus one
/// piecewise-linear and one ReLU-sum sample.
inline std::vector<Activation> catalog_samples() {
    return {NamedFn::id,
            NamedFn::relu,
            NamedFn::tanh,
            NamedFn::sigmoid,
            NamedFn::sin,
            NamedFn::abs,
            Activation::piecewise_linear({{-1.0, 0.5}, {0.0, -0.25}, {2.0, 1.0}}),
            Activation::relu_sum(ReluSum{{{1.0, 0.5, 2.0}, {-1.0, 0.0, 0.5}, {0.0, -1.0, -0.3}}})};
}

struct RandomMpnnOptions {
    std::size_t max_layers = 3;
    std::size_t max_arity = 3;
    std::vector<Activation> activations = catalog_samples();
    double weight_bound = 1.0;
};

inline Layer random_layer(std::mt19937_64& rng, std::size_t in, std::size_t out, const Activation& sigma,
                          double weight_bound) {
    std::uniform_real_distribution<double> w(-weight_bound, weight_bound);
    Matrix w1(out, in), w2(out, in);
    std::vector<double> b(out);
    for (std::size_t i = 0; i < out; ++i) {
        for (std::size_t k = 0; k < in; ++k) {
            w1(i, k) = w(rng);
            w2(i, k) = w(rng);
        }
        b[i] = w(rng);
    }
    return Layer(std::move(w1), std::move(w2), std::move(b), sigma);
}

/// 1..max_layers layers with arities in 1..max_arity and activations drawn
/// from `activations`.
inline Mpnn random_mpnn(std::uint64_t seed, const RandomMpnnOptions& o = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> arity(1, o.max_arity);
    std::uniform_int_distribution<std::size_t> fn(0, o.activations.size() - 1);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, o.max_layers)(rng);
    std::vector<Layer> layers;
    std::size_t in = arity(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t out = arity(rng);
        layers.push_back(random_layer(rng, in, out, o.activations[fn(rng)], o.weight_bound));
        in = out;
    }
    return Mpnn(std::move(layers));
}

}  // namespace mpnnc
