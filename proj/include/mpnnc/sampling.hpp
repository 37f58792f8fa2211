#pragma once

#include <cstdint>
#include <random>

#include "mpnnc/detail.hpp"
#include "mpnnc/graph.hpp"

namespace mpnnc {

/// One random (graph, feature map, node) triple.
struct Instance {
    Graph graph{1};
    FeatureMap features;
    NodeId node = 0;
};

struct SamplerOptions {
    std::size_t max_nodes = 12;
    /// Chance that a coordinate is snapped to one of its box's endpoints, so
    /// extremes are hit often.
    double corner_rate = 0.25;
};

/// Instance from G_p x box; graph size uniform in 1..max_nodes.
inline Instance sample_instance(DegreeBound p, const DomainBox& box, std::uint64_t seed,
                                const SamplerOptions& opts = {}) {
    std::mt19937_64 rng(detail::mix_seed(seed));
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(opts.max_nodes, 1))(rng);
    Instance out;
    out.graph = random_graph(n, p, rng());
    out.features = random_features(out.graph, box, rng());
    std::bernoulli_distribution snap(opts.corner_rate);
    std::bernoulli_distribution upper(0.5);
    for (NodeId v = 0; v < n; ++v)
        for (std::size_t k = 0; k < box.dim(); ++k)
            if (snap(rng)) out.features[v][k] = upper(rng) ? box[k].hi : box[k].lo;
    out.node = std::uniform_int_distribution<NodeId>(0, n - 1)(rng);
    return out;
}

/// Seed of trial i under base seed s; independent of how many trials run.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
    return detail::mix_seed(base ^ detail::mix_seed(trial + 1));
}

}  // namespace mpnnc
