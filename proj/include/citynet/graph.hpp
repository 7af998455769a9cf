#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citynet/error.hpp"

namespace citynet {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Undirected simple graph over string-labelled users.
///
/// Nodes are indexed 0..n-1 in ascending label order and adjacency lists are
/// sorted, so every traversal below is deterministic. Immutable once built.
class SocialGraph {
public:
    SocialGraph() : offsets_(1, 0) {}

    /// Builds from unique labels and index pairs into `labels`.
    /// Duplicate edges collapse; self-loops and out-of-range endpoints throw.
    SocialGraph(std::vector<std::string> labels, std::span<const Edge> edges) {
        const std::size_t n = labels.size();
        std::vector<NodeId> order(n);
        std::iota(order.begin(), order.end(), NodeId{0});
        std::sort(order.begin(), order.end(),
                  [&](NodeId a, NodeId b) { return labels[a] < labels[b]; });
        std::vector<NodeId> remap(n);
        labels_.reserve(n);
        for (NodeId i = 0; i < n; ++i) {
            remap[order[i]] = i;
            if (i > 0 && labels[order[i]] == labels_.back()) {
                throw InvalidArgument("duplicate node label '" + labels_.back() + "'");
            }
            labels_.push_back(std::move(labels[order[i]]));
        }

        std::vector<Edge> canon;
        canon.reserve(edges.size());
        for (auto [u, v] : edges) {
            if (u >= n || v >= n) throw InvalidArgument("edge endpoint out of range");
            if (u == v) throw InvalidArgument("self-loop on '" + labels_[remap[u]] + "'");
            NodeId a = remap[u], b = remap[v];
            if (a > b) std::swap(a, b);
            canon.emplace_back(a, b);
        }
        std::sort(canon.begin(), canon.end());
        canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
        edge_count_ = canon.size();

        offsets_.assign(n + 1, 0);
        for (auto [a, b] : canon) {
            ++offsets_[a + 1];
            ++offsets_[b + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        adjacency_.resize(offsets_.back());
        std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (auto [a, b] : canon) {
            adjacency_[cursor[a]++] = b;
            adjacency_[cursor[b]++] = a;
        }
        for (NodeId u = 0; u < n; ++u) {
            std::sort(adjacency_.begin() + offsets_[u], adjacency_.begin() + offsets_[u + 1]);
        }
    }

    /// Builds from labelled edges; endpoints become nodes, `extra_nodes` adds isolated ones.
    static SocialGraph from_labelled_edges(std::span<const std::pair<std::string, std::string>> edges,
                                           std::span<const std::string> extra_nodes = {}) {
        std::unordered_map<std::string, NodeId> index;
        std::vector<std::string> labels;
        auto intern = [&](const std::string& s) {
            auto [it, inserted] = index.try_emplace(s, static_cast<NodeId>(labels.size()));
            if (inserted) labels.push_back(s);
            return it->second;
        };
        for (const auto& s : extra_nodes) intern(s);
        std::vector<Edge> ids;
        ids.reserve(edges.size());
        for (const auto& [a, b] : edges) ids.emplace_back(intern(a), intern(b));
        return SocialGraph(std::move(labels), ids);
    }

    std::size_t node_count() const noexcept { return labels_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    bool empty() const noexcept { return labels_.empty(); }

    std::span<const NodeId> neighbors(NodeId u) const {
        return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
    }
    std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

    const std::string& label(NodeId u) const { return labels_[u]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    std::optional<NodeId> find(std::string_view label) const {
        auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
        if (it == labels_.end() || *it != label) return std::nullopt;
        return static_cast<NodeId>(it - labels_.begin());
    }

    bool has_edge(NodeId u, NodeId v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    /// All edges as (u, v) with u < v, ascending.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (NodeId u = 0; u < node_count(); ++u) {
            for (NodeId v : neighbors(u)) {
                if (u < v) out.emplace_back(u, v);
            }
        }
        return out;
    }

    friend bool operator==(const SocialGraph& a, const SocialGraph& b) {
        return a.labels_ == b.labels_ && a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_;
    }

private:
    std::vector<std::string> labels_;
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> adjacency_;
    std::size_t edge_count_ = 0;
};

/// Subgraph induced by `nodes` (any order, duplicates ignored).
inline SocialGraph induced_subgraph(const SocialGraph& g, std::span<const NodeId> nodes) {
    std::vector<NodeId> keep(nodes.begin(), nodes.end());
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    constexpr NodeId absent = static_cast<NodeId>(-1);
    std::vector<NodeId> local(g.node_count(), absent);
    std::vector<std::string> labels;
    labels.reserve(keep.size());
    for (NodeId i = 0; i < keep.size(); ++i) {
        local[keep[i]] = i;
        labels.push_back(g.label(keep[i]));
    }
    std::vector<Edge> edges;
    for (NodeId u : keep) {
        for (NodeId v : g.neighbors(u)) {
            if (u < v && local[v] != absent) edges.emplace_back(local[u], local[v]);
        }
    }
    return SocialGraph(std::move(labels), edges);
}

/// Drops degree-0 nodes.
inline SocialGraph without_isolated(const SocialGraph& g) {
    std::vector<NodeId> keep;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        if (g.degree(u) > 0) keep.push_back(u);
    }
    return induced_subgraph(g, keep);
}

/// Component id per node; components numbered in order of their smallest node.
inline std::vector<NodeId> connected_components(const SocialGraph& g, NodeId* count = nullptr) {
    constexpr NodeId unset = static_cast<NodeId>(-1);
    std::vector<NodeId> comp(g.node_count(), unset);
    std::vector<NodeId> stack;
    NodeId next = 0;
    for (NodeId s = 0; s < g.node_count(); ++s) {
        if (comp[s] != unset) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : g.neighbors(u)) {
                if (comp[v] == unset) {
                    comp[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    if (count) *count = next;
    return comp;
}

/// Largest connected component as an induced subgraph. Equal sizes resolve to
/// the component holding the smallest node id.
inline SocialGraph giant_component(const SocialGraph& g) {
    if (g.empty()) return g;
    NodeId count = 0;
    auto comp = connected_components(g, &count);
    std::vector<std::size_t> sizes(count, 0);
    for (NodeId c : comp) ++sizes[c];
    // components are numbered by smallest member, so the first maximum wins ties
    const auto best = static_cast<NodeId>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<NodeId> keep;
    keep.reserve(sizes[best]);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        if (comp[u] == best) keep.push_back(u);
    }
    return induced_subgraph(g, keep);
}

/// Three mutually adjacent nodes, stored ascending.
struct Triad {
    std::array<NodeId, 3> members;
    friend bool operator==(const Triad&, const Triad&) = default;
    friend auto operator<=>(const Triad&, const Triad&) = default;
};

/// Calls fn(a, b, c) once per triangle with a < b < c, in lexicographic order.
template <typename Fn>
void for_each_triangle(const SocialGraph& g, Fn&& fn) {
    for (NodeId a = 0; a < g.node_count(); ++a) {
        auto na = g.neighbors(a);
        auto b_begin = std::upper_bound(na.begin(), na.end(), a);
        for (auto bi = b_begin; bi != na.end(); ++bi) {
            const NodeId b = *bi;
            auto nb = g.neighbors(b);
            // intersect the parts of both lists above b
            auto x = std::upper_bound(bi, na.end(), b);
            auto y = std::upper_bound(nb.begin(), nb.end(), b);
            while (x != na.end() && y != nb.end()) {
                if (*x < *y) {
                    ++x;
                } else if (*y < *x) {
                    ++y;
                } else {
                    fn(a, b, *x);
                    ++x;
                    ++y;
                }
            }
        }
    }
}

inline std::vector<Triad> enumerate_triangles(const SocialGraph& g) {
    std::vector<Triad> out;
    for_each_triangle(g, [&](NodeId a, NodeId b, NodeId c) { out.push_back(Triad{{a, b, c}}); });
    return out;
}

/// Links among u's neighbours over the k(k-1)/2 possible; 0 when degree < 2.
inline double local_clustering(const SocialGraph& g, NodeId u) {
    if (u >= g.node_count()) throw InvalidArgument("unknown node index " + std::to_string(u));
    auto nb = g.neighbors(u);
    const std::size_t k = nb.size();
    if (k < 2) return 0.0;
    std::size_t links = 0;
    for (std::size_t i = 0; i < k; ++i) {
        auto ni = g.neighbors(nb[i]);
        // count neighbours of nb[i] that are also in nb and come after it
        auto x = nb.begin() + static_cast<std::ptrdiff_t>(i) + 1;
        auto y = std::upper_bound(ni.begin(), ni.end(), nb[i]);
        while (x != nb.end() && y != ni.end()) {
            if (*x < *y) {
                ++x;
            } else if (*y < *x) {
                ++y;
            } else {
                ++links;
                ++x;
                ++y;
            }
        }
    }
    return static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

inline double local_clustering(const SocialGraph& g, std::string_view label) {
    auto u = g.find(label);
    if (!u) throw InvalidArgument("unknown node '" + std::string(label) + "'");
    return local_clustering(g, *u);
}

/// Mean local clustering over all nodes; nodes of degree < 2 count as 0.
inline double average_clustering(const SocialGraph& g) {
    if (g.empty()) throw InvalidArgument("average clustering of an empty graph");
    double sum = 0.0;
    for (NodeId u = 0; u < g.node_count(); ++u) sum += local_clustering(g, u);
    return sum / static_cast<double>(g.node_count());
}

// Edge-list text format: one "u v" pair per line, '#' starts a comment line.

inline SocialGraph read_edge_list(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::string a, b, extra;
        if (!(fields >> a >> b) || (fields >> extra)) {
            throw ParseError("expected two node ids", lineno);
        }
        if (a == b) throw ParseError("self-loop on '" + a + "'", lineno);
        edges.emplace_back(std::move(a), std::move(b));
    }
    return SocialGraph::from_labelled_edges(edges);
}

inline void write_edge_list(std::ostream& out, const SocialGraph& g) {
    for (auto [u, v] : g.edges()) out << g.label(u) << ' ' << g.label(v) << '\n';
}

}  // namespace citynet
