#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <gtest/gtest.h>

#include "mpnnc/mpnnc.hpp"

namespace mpnnc::testing {

inline ::testing::AssertionResult near_value(double expected, double actual, double rel = 1e-9, double abs = 1e-12) {
    const double dev = std::fabs(expected - actual);
    if (dev <= std::max(abs, rel * std::max(std::fabs(expected), std::fabs(actual))))
        return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "expected " << expected << ", got " << actual << " (deviation " << dev
                                         << ")";
}

inline ::testing::AssertionResult same_features(const FeatureMap& expected, const FeatureMap& actual,
                                                double rel = 1e-9, double abs = 1e-12) {
    if (expected.node_count() != actual.node_count() || expected.dim() != actual.dim())
        return ::testing::AssertionFailure() << "shape " << expected.node_count() << "x" << expected.dim() << " vs "
                                             << actual.node_count() << "x" << actual.dim();
    for (NodeId v = 0; v < expected.node_count(); ++v)
        for (std::size_t j = 0; j < expected.dim(); ++j) {
            auto r = near_value(expected[v][j], actual[v][j], rel, abs);
            if (!r) return r << " at node " << v << ", component " << j;
        }
    return ::testing::AssertionSuccess();
}

inline FeatureMap column(std::initializer_list<double> values) {
    FeatureMap chi(values.size(), 1);
    NodeId v = 0;
    for (double x : values) chi[v++][0] = x;
    return chi;
}

inline FeatureMap rows(std::initializer_list<std::initializer_list<double>> values) {
    const std::size_t d = values.begin()->size();
    FeatureMap chi(values.size(), d);
    NodeId v = 0;
    for (const auto& r : values) {
        std::size_t k = 0;
        for (double x : r) chi[v][k++] = x;
        ++v;
    }
    return chi;
}

inline Graph path3() { return Graph(3, {{0, 1}, {1, 2}}); }
inline Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline Instance instance(std::uint64_t seed, std::size_t d, DegreeBound p = {11}, double lo = -10.0,
                         double hi = 10.0) {
    return sample_instance(p, DomainBox::cube(d, lo, hi), seed);
}

}  // namespace mpnnc::testing
