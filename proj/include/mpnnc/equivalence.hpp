#pragma once

#include <cmath>
#include <optional>
#include <variant>

#include "mpnnc/errors.hpp"
#include "mpnnc/expr.hpp"
#include "mpnnc/graph.hpp"
#include "mpnnc/interpreter.hpp"
#include "mpnnc/mpnn.hpp"
#include "mpnnc/sampling.hpp"

namespace mpnnc {

/// Anything that denotes a GFMT: an expression tuple or a network.
using Program = std::variant<ExprTuple, Mpnn>;

inline std::size_t input_arity(const Program& prog) {
    return std::visit(detail::overloaded{[](const ExprTuple& t) { return t.input_arity; },
                                         [](const Mpnn& n) { return n.input_arity(); }},
                      prog);
}

inline std::size_t output_arity(const Program& prog) {
    return std::visit(detail::overloaded{[](const ExprTuple& t) { return t.components.size(); },
                                         [](const Mpnn& n) { return n.output_arity(); }},
                      prog);
}

inline FeatureMap run(const Program& prog, const Graph& g, const FeatureMap& chi) {
    return std::visit(detail::overloaded{[&](const ExprTuple& t) { return eval_tuple(t, g, chi); },
                                         [&](const Mpnn& n) { return eval(n, g, chi); }},
                      prog);
}

struct Tolerance {
    double relative = 1e-9;
    double absolute = 1e-12;

    bool accepts(double a, double b) const {
        const double dev = std::fabs(a - b);
        return dev <= std::max(absolute, relative * std::max(std::fabs(a), std::fabs(b)));
    }
};

struct CheckOptions {
    std::size_t trials = 1000;
    Tolerance tolerance;
    std::uint64_t seed = 0;
    SamplerOptions sampler;
};

/// A failing instance, enough to replay the comparison.
struct Witness {
    std::size_t trial = 0;
    Graph graph{1};
    FeatureMap features;
    NodeId node = 0;
    std::size_t component = 0;
    double a = 0.0;
    double b = 0.0;
    double deviation = 0.0;
};

struct CheckResult {
    bool passed = true;
    std::size_t trials = 0;
    double max_deviation = 0.0;
    std::optional<Witness> witness;
};

inline void require_same_shape(const Program& a, const Program& b) {
    if (input_arity(a) != input_arity(b))
        throw ArityError("programs differ in input arity: " + std::to_string(input_arity(a)) + " vs " +
                         std::to_string(input_arity(b)));
    if (output_arity(a) != output_arity(b))
        throw ArityError("programs differ in output arity: " + std::to_string(output_arity(a)) + " vs " +
                         std::to_string(output_arity(b)));
}

/// Compares a and b on `trials` random instances of G_p x box. The witness
/// is the first failing (trial, node, component) in order.
inline CheckResult check_equivalence(const Program& a, const Program& b, DegreeBound p, const DomainBox& box,
                                     const CheckOptions& opts = {}) {
    require_same_shape(a, b);
    if (box.dim() != input_arity(a))
        throw ArityError("box has dimension " + std::to_string(box.dim()) + " but the programs read " +
                         std::to_string(input_arity(a)) + " channels");
    CheckResult out;
    out.trials = opts.trials;
    for (std::size_t t = 0; t < opts.trials; ++t) {
        const Instance inst = sample_instance(p, box, trial_seed(opts.seed, t), opts.sampler);
        const FeatureMap ya = run(a, inst.graph, inst.features);
        const FeatureMap yb = run(b, inst.graph, inst.features);
        for (NodeId v = 0; v < ya.node_count(); ++v) {
            for (std::size_t j = 0; j < ya.dim(); ++j) {
                const double x = ya[v][j], y = yb[v][j];
                const double dev = std::fabs(x - y);
                if (std::isnan(dev) || dev > out.max_deviation) out.max_deviation = dev;
                if (!opts.tolerance.accepts(x, y) && !out.witness) {
                    out.passed = false;
                    out.witness = Witness{t, inst.graph, inst.features, v, j, x, y, dev};
                }
            }
        }
    }
    return out;
}

/// Re-evaluates both programs on a witness instance.
inline Witness replay(const Program& a, const Program& b, const Witness& w) {
    require_same_shape(a, b);
    Witness out = w;
    out.a = run(a, w.graph, w.features)[w.node][w.component];
    out.b = run(b, w.graph, w.features)[w.node][w.component];
    out.deviation = std::fabs(out.a - out.b);
    return out;
}

}  // namespace mpnnc
