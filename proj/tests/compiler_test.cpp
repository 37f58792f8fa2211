#include <random>

#include "support.hpp"

using namespace mpnnc;
using namespace mpnnc::testing;

namespace {

void expect_agrees(const Expr& e, const Mpnn& N, std::size_t d, DegreeBound p, const DomainBox& box,
                   std::uint64_t seed, std::size_t trials) {
    for (std::size_t t = 0; t < trials; ++t) {
        const Instance inst = sample_instance(p, box, trial_seed(seed, t));
        const auto want = eval(e, inst.graph, inst.features);
        const FeatureMap got = eval(N, inst.graph, inst.features);
        ASSERT_EQ(got.dim(), 1u);
        for (NodeId v = 0; v < want.size(); ++v)
            ASSERT_TRUE(near_value(want[v], got[v][0])) << to_string(e) << " trial " << t << " node " << v;
    }
    (void)d;
}

// the boxes are exact; a shifted merged evaluation may round one ulp past them
bool loosely_contains(const Interval& y, double x) {
    const double slack = 1e-12 * (1.0 + std::max(std::fabs(y.lo), std::fabs(y.hi)));
    return y.lo - slack <= x && x <= y.hi + slack;
}

bool relu_shape(const Mpnn& N) {
    for (std::size_t i = 0; i < N.size(); ++i) {
        const Activation& a = N[i].activation();
        if (a.is(NamedFn::relu)) continue;
        if (a.is(NamedFn::id) && i + 1 == N.size()) continue;
        return false;
    }
    return true;
}

}  // namespace

TEST(CompileRelu, MaxExpression) {
    const Mpnn N = compile_relu(parse("relu(P2 + -1*P1) + P1"), 2);
    EXPECT_GE(N.size(), 2u);
    EXPECT_TRUE(relu_shape(N));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> x(-10.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const double a = x(rng), b = x(rng);
        EXPECT_TRUE(near_value(std::max(a, b), eval(N, Graph(1), rows({{a, b}}))[0][0]));
    }
}

TEST(CompileRelu, TwoHopSum) {
    const Mpnn N = compile_relu(parse("<><>P1"), 1);
    const FeatureMap y = eval(N, path3(), column({1, 2, 3}));
    EXPECT_EQ(y[1][0], 4.0);
    EXPECT_EQ(y[0][0], fixtures::oracle_t4(path3(), column({1, 2, 3}), 0));
}

TEST(CompileRelu, Constant) {
    const Mpnn N = compile_relu(Expr::one(), 2);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Instance inst = instance(s, 2);
        const FeatureMap y = eval(N, inst.graph, inst.features);
        for (double x : y.data()) EXPECT_EQ(x, 1.0);
    }
}

TEST(CompileRelu, BaseCaseShapes) {
    EXPECT_EQ(compile_relu(Expr::one(), 2),
              (Mpnn{Layer(Matrix(1, 2), Matrix(1, 2), {1.0}, NamedFn::id)}));
    EXPECT_EQ(compile_relu(Expr::proj(2), 3),
              (Mpnn{Layer(Matrix::from_rows({{0, 1, 0}}), Matrix(1, 3), {0.0}, NamedFn::id)}));
    const Mpnn zero = compile_relu(parse("0*P1"), 1);
    EXPECT_EQ(zero.size(), 2u);
}

TEST(CompileRelu, Rejections) {
    EXPECT_THROW(compile_relu(parse("tanh(P1)"), 1), ModeError);
    EXPECT_THROW(compile_relu(parse("P2"), 1), ArityError);
}

TEST(CompileRelu, RandomExpressionsUnboundedDegree) {
    RandomExprOptions o;
    o.depth = 5;
    o.input_arity = 3;
    for (std::uint64_t s = 0; s < 60; ++s) {
        const Expr e = random_expr(s, o);
        const Mpnn N = compile_relu(e, 3);
        ASSERT_TRUE(relu_shape(N)) << to_string(e);
        expect_agrees(e, N, 3, DegreeBound{11}, DomainBox::cube(3, -10, 10), s, 10);
    }
}

TEST(CompileReluTuple, Examples) {
    const FeatureMap pp = eval(compile_relu_tuple(make_tuple({parse("P1"), parse("P1")}, 1)), path3(), column({1, -2, 3}));
    EXPECT_EQ(pp, rows({{1, 1}, {-2, -2}, {3, 3}}));
    const FeatureMap tri = eval(compile_relu_tuple(make_tuple({parse("P1"), parse("<>P1")}, 1)), triangle(),
                                column({1, 1, 1}));
    EXPECT_EQ(tri, rows({{1, 2}, {1, 2}, {1, 2}}));
    const ExprTuple t = make_tuple({parse("relu(P2 + -1*P1) + P1"), parse("<>P1")}, 2);
    const Mpnn N = compile_relu_tuple(t);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Instance inst = instance(s, 2);
        EXPECT_TRUE(same_features(eval_tuple(t, inst.graph, inst.features), eval(N, inst.graph, inst.features)));
    }
}

TEST(LayerOutputBounds, Examples) {
    const LayerBounds pass = layer_output_bounds(Layer::scalar(1, 0, 0, NamedFn::id), DegreeBound{5},
                                                 DomainBox::cube(1, -1, 2));
    EXPECT_EQ(pass.components[0], Interval(-1, 2));
    EXPECT_EQ(pass.M, 2.0);
    EXPECT_EQ(pass.m, -1.0);
    EXPECT_EQ(layer_output_bounds(Layer::scalar(0, 1, 0, NamedFn::id), DegreeBound{3}, DomainBox::cube(1, 0, 1))
                  .components[0],
              Interval(0, 3));
    EXPECT_EQ(layer_output_bounds(Layer::scalar(1, 1, 1, NamedFn::id), DegreeBound{2}, DomainBox::cube(1, -1, 1))
                  .components[0],
              Interval(-2, 4));
    EXPECT_THROW(layer_output_bounds(Layer::identity(2), DegreeBound{1}, DomainBox::cube(1, 0, 1)), ArityError);
}

TEST(LayerOutputBounds, IncludesIsolatedNodes) {
    // a positive bias with a negative neighbour weight: k = 0 gives the max
    const LayerBounds b = layer_output_bounds(Layer::scalar(0, -1, 5, NamedFn::id), DegreeBound{2},
                                              DomainBox::cube(1, 1, 2));
    EXPECT_EQ(b.components[0], Interval(1, 5));
}

TEST(LayerOutputBounds, SoundOnSamples) {
    std::mt19937_64 rng(8);
    for (std::uint64_t s = 0; s < 40; ++s) {
        const Layer L = random_layer(rng, 2, 3, NamedFn::id, 2.0);
        const DomainBox box({Interval{-1, 0.5}, Interval{0, 3}});
        const DegreeBound p{1 + s % 3};
        const LayerBounds b = layer_output_bounds(L, p, box);
        for (std::uint64_t t = 0; t < 200; ++t) {
            const Instance inst = sample_instance(p, box, trial_seed(s, t));
            const FeatureMap z = preactivation(L, inst.graph, inst.features);
            for (NodeId v = 0; v < z.node_count(); ++v)
                for (std::size_t i = 0; i < 3; ++i) ASSERT_TRUE(b.components[i].contains(z[v][i]));
        }
    }
}

TEST(MergeLayers, TanhThenIdentity) {
    const Layer L = Layer::scalar(1, 0, 0, NamedFn::tanh);
    const Layer K = Layer::scalar(1, 0, 0, NamedFn::id);
    auto [l, k] = merge_layers(L, K, DegreeBound{2}, DomainBox::cube(1, -3, 3), DomainBox::cube(1, -2, 1));
    EXPECT_EQ(l.activation(), merge(NamedFn::tanh, 3.0, NamedFn::id, -2.0));
    EXPECT_EQ(l.activation(), k.activation());
    EXPECT_EQ(l.bias()[0], -4.0);
    EXPECT_EQ(k.bias()[0], 3.0);
    for (double x = -3.0; x <= 3.0; x += 0.25) EXPECT_DOUBLE_EQ(eval_layer(l, Graph(1), column({x}))[0][0], std::tanh(x));
    for (double x = -2.0; x <= 1.0; x += 0.25) EXPECT_EQ(eval_layer(k, Graph(1), column({x}))[0][0], x);
}

TEST(MergeLayers, SameActivationStillWorks) {
    const Layer r = Layer::scalar(1, 0, 0, NamedFn::relu);
    auto [l, k] = merge_layers(r, r, DegreeBound{1}, DomainBox::cube(1, 0, 1), DomainBox::cube(1, 0, 1));
    for (double x = 0.0; x <= 1.0; x += 0.125) {
        EXPECT_NEAR(eval_layer(l, Graph(1), column({x}))[0][0], x, 1e-15);
        EXPECT_NEAR(eval_layer(k, Graph(1), column({x}))[0][0], x, 1e-15);
    }
}

TEST(MergeLayers, RandomTanhSigmoid) {
    std::mt19937_64 rng(12);
    const DomainBox box = DomainBox::cube(2, -1, 1);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Layer L = random_layer(rng, 2, 2, NamedFn::tanh, 1.0);
        const Layer K = random_layer(rng, 2, 1, NamedFn::sigmoid, 1.0);
        auto [l, k] = merge_layers(L, K, DegreeBound{2}, box, box);
        ASSERT_EQ(l.activation(), k.activation());
        for (std::uint64_t t = 0; t < 50; ++t) {
            const Instance inst = sample_instance(DegreeBound{2}, box, trial_seed(s, t));
            ASSERT_TRUE(same_features(eval_layer(L, inst.graph, inst.features), eval_layer(l, inst.graph, inst.features)));
            ASSERT_TRUE(same_features(eval_layer(K, inst.graph, inst.features), eval_layer(k, inst.graph, inst.features)));
        }
    }
}

TEST(ParallelMixed, TanhWithId) {
    const Layer L = Layer::scalar(1, 0, 0, NamedFn::tanh);
    const Layer K = Layer::scalar(1, 0, 0, NamedFn::id);
    const DomainBox side = DomainBox::cube(1, -1, 1);
    const Layer P = parallel_mixed(L, K, DegreeBound{2}, side, side);
    EXPECT_TRUE(std::holds_alternative<Merged>(P.activation().repr()));
    for (std::uint64_t t = 0; t < 50; ++t) {
        const Instance inst = sample_instance(DegreeBound{2}, side.times(side), t);
        const FeatureMap y = eval_layer(P, inst.graph, inst.features);
        for (NodeId v = 0; v < y.node_count(); ++v) {
            EXPECT_TRUE(near_value(std::tanh(inst.features[v][0]), y[v][0]));
            EXPECT_TRUE(near_value(inst.features[v][1], y[v][1]));
        }
    }
}

TEST(ParallelMixed, SymmetricInputs) {
    const Layer L = Layer::scalar(0.5, 0.25, 0.1, NamedFn::sin);
    const DomainBox side = DomainBox::cube(1, -1, 1);
    const Layer P = parallel_mixed(L, L, DegreeBound{2}, side, side);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const Instance one = sample_instance(DegreeBound{2}, side, t);
        FeatureMap dup(one.features.node_count(), 2);
        for (NodeId v = 0; v < dup.node_count(); ++v) dup[v][0] = dup[v][1] = one.features[v][0];
        const FeatureMap y = eval_layer(P, one.graph, dup);
        for (NodeId v = 0; v < y.node_count(); ++v) EXPECT_TRUE(near_value(y[v][0], y[v][1]));
    }
}

TEST(CompileMixed, Examples) {
    const Expr e = parse("tanh(P1) + sin(P1)");
    const DomainBox box = DomainBox::cube(1, -1, 1);
    const CompiledNetwork c = compile_mixed(e, 1, DegreeBound{2}, box);
    expect_agrees(e, c.network, 1, DegreeBound{2}, box, 1, 100);

    const Expr r = parse("relu(P1)");
    const CompiledNetwork cr = compile_mixed(r, 1, DegreeBound{2}, box);
    const Mpnn exact = compile_relu(r, 1);
    for (std::uint64_t t = 0; t < 50; ++t) {
        const Instance inst = sample_instance(DegreeBound{2}, box, t);
        EXPECT_TRUE(same_features(eval(exact, inst.graph, inst.features), eval(cr.network, inst.graph, inst.features)));
    }

    const Expr s = parse("sin(<>P1)");
    const DomainBox unit = DomainBox::cube(1, 0, 1);
    expect_agrees(s, compile_mixed(s, 1, DegreeBound{3}, unit).network, 1, DegreeBound{3}, unit, 2, 100);
}

TEST(CompileMixed, BoundsEnclosePreactivations) {
    RandomExprOptions o;
    o.depth = 4;
    o.input_arity = 2;
    o.functions = {NamedFn::tanh, NamedFn::sigmoid, NamedFn::sin, NamedFn::abs, NamedFn::relu};
    const DomainBox box = DomainBox::cube(2, -1, 1);
    for (std::uint64_t s = 0; s < 40; ++s) {
        const Expr e = random_expr(s, o);
        const DegreeBound p{1 + s % 3};
        const CompiledNetwork c = compile_mixed(e, 2, p, box);
        ASSERT_EQ(c.bounds.size(), c.network.size());
        for (std::uint64_t t = 0; t < 20; ++t) {
            const Instance inst = sample_instance(p, box, trial_seed(s, t));
            FeatureMap x = inst.features;
            for (std::size_t i = 0; i < c.network.size(); ++i) {
                const FeatureMap z = preactivation(c.network[i], inst.graph, x);
                for (NodeId v = 0; v < z.node_count(); ++v) {
                    for (std::size_t j = 0; j < x.dim(); ++j)
                        ASSERT_TRUE(loosely_contains(c.layer_inputs[i][j], x[v][j])) << to_string(e) << " layer " << i;
                    for (std::size_t j = 0; j < z.dim(); ++j)
                        ASSERT_TRUE(loosely_contains(c.bounds[i].components[j], z[v][j])) << to_string(e) << " layer " << i;
                }
                x = eval_layer(c.network[i], inst.graph, x);
            }
        }
    }
}

TEST(CompileMixed, OnlyValidInsideTheDomain) {
    const Expr e = parse("tanh(P1) + sin(P1)");
    const CompiledNetwork c = compile_mixed(e, 1, DegreeBound{1}, DomainBox::cube(1, -1, 1));
    const FeatureMap far = column({40.0});
    const double want = eval(e, Graph(1), far)[0];
    const double got = eval(c.network, Graph(1), far)[0][0];
    // no equality is promised outside the box; just show both are finite
    EXPECT_TRUE(std::isfinite(want) && std::isfinite(got));
    EXPECT_GT(std::fabs(want - got), 1e-6);
}

TEST(CompileMixed, Rejections) {
    EXPECT_THROW(compile_mixed(parse("P2"), 1, DegreeBound{1}, DomainBox::cube(1, 0, 1)), ArityError);
    EXPECT_THROW(compile_mixed(parse("P1"), 2, DegreeBound{1}, DomainBox::cube(1, 0, 1)), ArityError);
}

TEST(CompileMixedTuple, AgreesComponentwise) {
    const ExprTuple t = make_tuple({parse("tanh(P1)"), parse("sigmoid(<>P2) + P1"), parse("abs(P2)")}, 2);
    const DomainBox box = DomainBox::cube(2, -1, 1);
    const CompiledNetwork c = compile_mixed_tuple(t, DegreeBound{2}, box);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Instance inst = sample_instance(DegreeBound{2}, box, s);
        EXPECT_TRUE(same_features(eval_tuple(t, inst.graph, inst.features), eval(c.network, inst.graph, inst.features)));
    }
}

TEST(CompileAdditionFree, Examples) {
    const Expr e = parse("tanh(2*<>P1)");
    const Mpnn N = compile_addition_free(e, 1);
    for (const Activation& a : activations_used(N)) EXPECT_TRUE(a.is(NamedFn::tanh) || a.is(NamedFn::id));
    expect_agrees(e, N, 1, DegreeBound{11}, DomainBox::cube(1, -10, 10), 3, 100);
    EXPECT_EQ(compile_addition_free(parse("<>P1"), 1), (Mpnn{Layer::scalar(0, 1, 0, NamedFn::id)}));
    EXPECT_THROW(compile_addition_free(parse("P1 + P2"), 2), ModeError);
}

TEST(CompileAdditionFree, RandomExpressions) {
    RandomExprOptions o;
    o.depth = 6;
    o.input_arity = 2;
    o.functions = {NamedFn::tanh, NamedFn::sin, NamedFn::abs};
    std::size_t tested = 0;
    for (std::uint64_t s = 0; tested < 60; ++s) {
        const Expr e = random_expr(s, o);
        if (!classify(e).addition_free) continue;
        ++tested;
        const Mpnn N = compile_addition_free(e, 2);
        const ExprClass c = classify(e);
        for (const Activation& a : activations_used(N)) ASSERT_TRUE(a.is(NamedFn::id) || c.uses(a));
        expect_agrees(e, N, 2, DegreeBound{11}, DomainBox::cube(2, -3, 3), s, 10);
    }
}

TEST(CompilePointwise, Examples) {
    EXPECT_EQ(compile_pointwise(parse("3*P1"), 1), (Mpnn{Layer::scalar(3, 0, 0, NamedFn::id)}));
    EXPECT_EQ(compile_pointwise(parse("tanh(P1)"), 1), (Mpnn{Layer::scalar(1, 0, 0, NamedFn::tanh)}));
    const Mpnn two = compile_pointwise(parse("2*tanh(P1)"), 1);
    EXPECT_EQ(two, (Mpnn{Layer::scalar(1, 0, 0, NamedFn::tanh), Layer::scalar(2, 0, 0, NamedFn::id)}));
    EXPECT_THROW(compile_pointwise(parse("<>P1"), 1), ModeError);
    EXPECT_THROW(compile_pointwise(parse("P1 + 1"), 1), ModeError);
}

TEST(StrongestMode, Ordering) {
    EXPECT_EQ(strongest_mode(classify(parse("tanh(P1)")), false), CompileMode::pointwise);
    EXPECT_EQ(strongest_mode(classify(parse("tanh(<>P1)")), false), CompileMode::addition_free);
    EXPECT_EQ(strongest_mode(classify(parse("relu(P1) + 1")), false), CompileMode::relu_exact);
    EXPECT_EQ(strongest_mode(classify(parse("tanh(P1) + 1")), true), CompileMode::mixed);
    EXPECT_FALSE(strongest_mode(classify(parse("tanh(P1) + 1")), false));
}
