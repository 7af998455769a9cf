#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "citynet/error.hpp"
#include "citynet/graph.hpp"
#include "citynet/parallel.hpp"
#include "citynet/rng.hpp"

namespace citynet {

namespace detail {

/// Sum of BFS distances from `source`; `reached` receives the number of nodes visited.
inline std::uint64_t bfs_distance_sum(const SocialGraph& g, NodeId source, std::size_t& reached) {
    constexpr std::uint32_t unseen = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> dist(g.node_count(), unseen);
    std::vector<NodeId> queue;
    queue.reserve(g.node_count());
    queue.push_back(source);
    dist[source] = 0;
    std::uint64_t sum = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        sum += dist[u];
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] == unseen) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    reached = queue.size();
    return sum;
}

inline double mean_over_sources(const SocialGraph& g, const std::vector<NodeId>& sources, unsigned threads) {
    const std::size_t n = g.node_count();
    if (n < 2) throw InvalidArgument("average shortest path needs at least two nodes");
    std::vector<std::uint64_t> sums(sources.size());
    std::vector<std::size_t> reached(sources.size());
    parallel_for(sources.size(), resolve_threads(threads),
                 [&](std::size_t i) { sums[i] = bfs_distance_sum(g, sources[i], reached[i]); });
    for (std::size_t r : reached) {
        if (r != n) throw InvalidArgument("average shortest path on a disconnected graph");
    }
    // integer sums: exact and independent of evaluation order
    const std::uint64_t total = std::accumulate(sums.begin(), sums.end(), std::uint64_t{0});
    return static_cast<double>(total) / (static_cast<double>(sources.size()) * static_cast<double>(n - 1));
}

}  // namespace detail

/// Mean distance over all ordered pairs of distinct nodes, one BFS per node.
inline double average_shortest_path(const SocialGraph& g, unsigned threads = 1) {
    std::vector<NodeId> sources(g.node_count());
    std::iota(sources.begin(), sources.end(), NodeId{0});
    return detail::mean_over_sources(g, sources, threads);
}

/// Unbiased estimate from `k_sources` distinct uniformly drawn BFS roots.
inline double average_shortest_path_sampled(const SocialGraph& g, std::size_t k_sources, std::uint64_t seed,
                                             unsigned threads = 1) {
    if (k_sources == 0) throw InvalidArgument("sampled shortest paths need at least one source");
    std::vector<NodeId> sources(g.node_count());
    std::iota(sources.begin(), sources.end(), NodeId{0});
    if (k_sources < sources.size()) {
        Rng rng(seed);
        rng.shuffle(sources);
        sources.resize(k_sources);
    }
    return detail::mean_over_sources(g, sources, threads);
}

/// Exact up to `exact_limit` nodes, otherwise sampled with `k_sources` roots.
inline double average_shortest_path_auto(const SocialGraph& g, std::uint64_t seed, unsigned threads = 1,
                                         std::size_t exact_limit = 10000, std::size_t k_sources = 1000) {
    return g.node_count() <= exact_limit ? average_shortest_path(g, threads)
                                         : average_shortest_path_sampled(g, k_sources, seed, threads);
}

}  // namespace citynet
