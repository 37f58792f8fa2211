#include <random>

#include "support.hpp"

using namespace mpnnc;
using namespace mpnnc::testing;

TEST(Oracles, Examples) {
    EXPECT_EQ(fixtures::oracle_t1(1, 3), 2.0);
    EXPECT_EQ(fixtures::oracle_t1(0, 0), 0.0);
    EXPECT_EQ(fixtures::oracle_t1(-2, 4), 1.0);
    EXPECT_EQ(fixtures::oracle_t2(1, 3), 3.0);
    EXPECT_EQ(fixtures::oracle_t2(3, 3), 3.0);
    EXPECT_EQ(fixtures::oracle_t2(-1, -4), -1.0);

    const Graph star(4, {{0, 1}, {0, 2}, {0, 3}});
    EXPECT_EQ(fixtures::oracle_t3(star, column({0, 1, 5, 2}), 0), 5.0);
    EXPECT_EQ(fixtures::oracle_t3(path3(), column({7, 0, 3}), 1), 7.0);
    EXPECT_THROW(fixtures::oracle_t3(Graph(2, {}), column({1, 2}), 0), std::domain_error);

    EXPECT_EQ(fixtures::oracle_t4(path3(), column({1, 2, 3}), 0), 4.0);
    EXPECT_EQ(fixtures::oracle_t4(Graph(1), column({5}), 0), 0.0);
    for (NodeId v = 0; v < 3; ++v) EXPECT_EQ(fixtures::oracle_t4(triangle(), column({1, 1, 1}), v), 4.0);
}

TEST(Fixtures, T1Exact) {
    const Expr e = parse(*fixtures::find("T1").expression);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> x(-10, 10);
    for (int k = 0; k < 1000; ++k) {
        const double a = x(rng), b = x(rng);
        EXPECT_EQ(eval(e, Graph(1), rows({{a, b}}))[0], fixtures::oracle_t1(a, b));
    }
}

TEST(Fixtures, T2ExpressionAndNetwork) {
    const Expr e = parse(*fixtures::find("T2").expression);
    const Mpnn N = fixtures::t2_network();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> x(-10, 10);
    for (int k = 0; k < 1000; ++k) {
        const double a = x(rng), b = x(rng);
        const FeatureMap chi = rows({{a, b}});
        EXPECT_TRUE(near_value(fixtures::oracle_t2(a, b), eval(e, Graph(1), chi)[0], 0, 1e-12));
        EXPECT_TRUE(near_value(fixtures::oracle_t2(a, b), eval(N, Graph(1), chi)[0][0], 0, 1e-12));
    }
}

TEST(Fixtures, T4ExpressionAndCompiled) {
    const Expr e = parse(*fixtures::find("T4").expression);
    const Mpnn N = compile_relu(e, 1);
    const Mpnn twice{fixtures::t_sum_network()[0], fixtures::t_sum_network()[0]};
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Instance inst = instance(s, 1);
        const auto y = eval(e, inst.graph, inst.features);
        const FeatureMap z = eval(N, inst.graph, inst.features);
        const FeatureMap w = eval(twice, inst.graph, inst.features);
        for (NodeId v = 0; v < y.size(); ++v) {
            const double want = fixtures::oracle_t4(inst.graph, inst.features, v);
            EXPECT_TRUE(near_value(want, y[v], 1e-12, 1e-12));
            EXPECT_TRUE(near_value(want, z[v][0], 1e-12, 1e-12));
            EXPECT_TRUE(near_value(want, w[v][0], 1e-12, 1e-12));
        }
    }
}

TEST(Fixtures, ExpressionsMatchOracles) {
    for (const fixtures::Fixture& f : fixtures::all()) {
        if (!f.expression) continue;
        const Expr e = parse(*f.expression);
        for (std::uint64_t s = 0; s < 30; ++s) {
            const Instance inst = instance(s, f.input_arity);
            const auto y = eval(e, inst.graph, inst.features);
            for (NodeId v = 0; v < y.size(); ++v)
                EXPECT_TRUE(near_value(f.oracle(inst.graph, inst.features, v), y[v], 1e-12, 1e-12)) << f.name;
        }
    }
}

TEST(Fixtures, T3HasNoExpression) {
    const fixtures::Fixture& t3 = fixtures::find("T3");
    EXPECT_FALSE(t3.expression);
    const Graph star(4, {{0, 1}, {0, 2}, {0, 3}});
    EXPECT_EQ(t3.oracle(star, column({9, 1, 5, 2}), 1), 9.0);
    EXPECT_THROW(fixtures::find("T9"), std::out_of_range);
}
