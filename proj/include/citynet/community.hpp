#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <vector>

#include "citynet/error.hpp"
#include "citynet/graph.hpp"
#include "citynet/rng.hpp"

namespace citynet {

/// Community label per graph node (indexed like the graph); labels are 0..count-1.
struct Partition {
    std::vector<std::uint32_t> community;
    std::uint32_t count = 0;

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// Relabels communities 0, 1, ... in order of first appearance.
inline Partition normalized(std::vector<std::uint32_t> labels) {
    std::vector<std::uint32_t> remap;
    constexpr std::uint32_t unset = static_cast<std::uint32_t>(-1);
    const std::uint32_t span = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    remap.assign(span, unset);
    std::uint32_t next = 0;
    for (auto& c : labels) {
        if (remap[c] == unset) remap[c] = next++;
        c = remap[c];
    }
    return {std::move(labels), next};
}

/// Q = Σ_c (e_c / m − (d_c / 2m)²).
inline double modularity(const SocialGraph& g, const Partition& p) {
    if (p.community.size() != g.node_count()) throw InvalidArgument("partition does not cover every node");
    if (g.edge_count() == 0) throw InvalidArgument("modularity is undefined on an edgeless graph");
    std::uint32_t span = 0;
    for (auto c : p.community) span = std::max(span, c + 1);
    std::vector<double> inside(span, 0.0), degree(span, 0.0);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        degree[p.community[u]] += static_cast<double>(g.degree(u));
        for (NodeId v : g.neighbors(u)) {
            if (u < v && p.community[u] == p.community[v]) inside[p.community[u]] += 1.0;
        }
    }
    const double m = static_cast<double>(g.edge_count());
    double q = 0.0;
    for (std::uint32_t c = 0; c < span; ++c) {
        const double share = degree[c] / (2.0 * m);
        q += inside[c] / m - share * share;
    }
    return q;
}

namespace detail {

/// Weighted graph used between Louvain levels; loops[i] is the internal weight of node i.
struct WeightedGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency;
    std::vector<double> loops;

    std::size_t size() const { return adjacency.size(); }
};

/// Local-moving phase. Returns true if any node changed community.
inline bool move_nodes(const WeightedGraph& g, std::vector<std::uint32_t>& comm, double total2, Rng& rng) {
    const std::size_t n = g.size();
    std::vector<double> strength(n), tot(n);
    for (std::size_t i = 0; i < n; ++i) {
        double k = 2.0 * g.loops[i];
        for (auto [j, w] : g.adjacency[i]) k += w;
        strength[i] = k;
        comm[i] = static_cast<std::uint32_t>(i);
        tot[i] = k;
    }
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(order);

    std::vector<double> link(n, 0.0);
    std::vector<std::uint32_t> touched;
    bool any = false;
    for (int pass = 0; pass < 1000; ++pass) {
        bool moved = false;
        for (std::uint32_t i : order) {
            const std::uint32_t own = comm[i];
            touched.clear();
            for (auto [j, w] : g.adjacency[i]) {
                const std::uint32_t c = comm[j];
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += w;
            }
            tot[own] -= strength[i];
            const double ki = strength[i] / total2;
            std::uint32_t best = own;
            double best_gain = link[own] - tot[own] * ki;
            for (std::uint32_t c : touched) {
                const double gain = link[c] - tot[c] * ki;
                if (gain > best_gain + 1e-12) {
                    best_gain = gain;
                    best = c;
                }
            }
            tot[best] += strength[i];
            comm[i] = best;
            if (best != own) moved = any = true;
            for (std::uint32_t c : touched) link[c] = 0.0;
        }
        if (!moved) break;
    }
    return any;
}

inline WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& comm, std::uint32_t count) {
    WeightedGraph out;
    out.adjacency.resize(count);
    out.loops.assign(count, 0.0);
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> arcs;
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        out.loops[comm[i]] += g.loops[i];
        for (auto [j, w] : g.adjacency[i]) {
            if (j < i) continue;
            const std::uint32_t a = comm[i], b = comm[j];
            if (a == b) out.loops[a] += w;
            else arcs.emplace_back(std::min(a, b), std::max(a, b), w);
        }
    }
    std::sort(arcs.begin(), arcs.end());
    for (std::size_t k = 0; k < arcs.size();) {
        auto [a, b, w] = arcs[k];
        double sum = 0.0;
        for (; k < arcs.size() && std::get<0>(arcs[k]) == a && std::get<1>(arcs[k]) == b; ++k) sum += std::get<2>(arcs[k]);
        out.adjacency[a].emplace_back(b, sum);
        out.adjacency[b].emplace_back(a, sum);
    }
    return out;
}

}  // namespace detail

namespace detail {

inline Partition louvain_once(const SocialGraph& g, Rng rng) {
    std::vector<std::uint32_t> membership(g.node_count());
    std::iota(membership.begin(), membership.end(), 0u);
    WeightedGraph level;
    level.adjacency.resize(g.node_count());
    level.loops.assign(g.node_count(), 0.0);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.neighbors(u)) level.adjacency[u].emplace_back(v, 1.0);
    }
    const double total2 = 2.0 * static_cast<double>(g.edge_count());
    std::vector<std::uint32_t> comm;
    while (true) {
        comm.assign(level.size(), 0);
        if (!move_nodes(level, comm, total2, rng)) break;
        auto local = normalized(comm);
        for (auto& c : membership) c = local.community[c];
        level = aggregate(level, local.community, local.count);
    }
    return normalized(std::move(membership));
}

}  // namespace detail

/// Multi-level Louvain modularity optimisation. Each of `restarts` runs sweeps
/// nodes in an order shuffled from (seed, run); the highest-Q partition wins,
/// earlier runs on ties. Deterministic per seed.
inline Partition louvain(const SocialGraph& g, std::uint64_t seed, unsigned restarts = 10) {
    if (g.empty()) throw InvalidArgument("louvain on an empty graph");
    if (restarts == 0) throw InvalidArgument("louvain needs at least one run");
    if (g.edge_count() == 0) {
        std::vector<std::uint32_t> singles(g.node_count());
        std::iota(singles.begin(), singles.end(), 0u);
        return normalized(std::move(singles));
    }
    Partition best;
    double best_q = 0.0;
    for (unsigned r = 0; r < restarts; ++r) {
        auto p = detail::louvain_once(g, Rng::substream(seed, "louvain", r));
        const double q = modularity(g, p);
        if (r == 0 || q > best_q + 1e-12) {
            best_q = q;
            best = std::move(p);
        }
    }
    return best;
}

}  // namespace citynet
