#pragma once

#include <algorithm>
#include <array>
#include <iterator>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citynet/community.hpp"
#include "citynet/dataset.hpp"
#include "citynet/error.hpp"
#include "citynet/generator.hpp"
#include "citynet/geo.hpp"
#include "citynet/graph.hpp"
#include "citynet/paths.hpp"
#include "citynet/rng.hpp"

namespace citynet {

// ---------------------------------------------------------------------------
// Degrees

/// degree → number of nodes with that degree (zero counts omitted).
inline std::map<std::size_t, std::size_t> degree_distribution(const SocialGraph& g) {
    std::map<std::size_t, std::size_t> hist;
    for (NodeId u = 0; u < g.node_count(); ++u) ++hist[g.degree(u)];
    return hist;
}

inline std::vector<std::uint64_t> degree_sequence(const SocialGraph& g) {
    std::vector<std::uint64_t> out;
    out.reserve(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) out.push_back(g.degree(u));
    return out;
}

// ---------------------------------------------------------------------------
// Place popularity

/// Distinct visitors per venue from check-ins; unvisited venues map to 0.
inline std::map<std::string, std::uint64_t> place_popularity(const CityDataset& d) {
    std::map<std::string, std::uint64_t> pop;
    for (const auto& [id, v] : d.venues) pop[id] = 0;
    std::set<std::pair<std::string_view, std::string_view>> seen;
    for (const auto& c : d.checkins) {
        if (seen.emplace(c.user, c.venue).second) ++pop[c.venue];
    }
    return pop;
}

/// Assigned users per venue.
inline std::map<std::string, std::uint64_t> place_popularity(const CityIndex& city, const PlaceAssignment& a) {
    const auto counts = model_popularity(a, city.venue_count());
    std::map<std::string, std::uint64_t> pop;
    for (std::size_t v = 0; v < counts.size(); ++v) pop[city.venues[v]->id] = counts[v];
    return pop;
}

/// (x, P(popularity ≥ x)) at every observed value, ascending in x.
inline std::vector<std::pair<std::uint64_t, double>> popularity_ccdf(const std::map<std::string, std::uint64_t>& pop) {
    if (pop.empty()) throw InvalidArgument("CCDF of an empty popularity map");
    std::map<std::uint64_t, std::size_t> freq;
    for (const auto& [id, count] : pop) ++freq[count];
    std::vector<std::pair<std::uint64_t, double>> out;
    std::size_t at_least = pop.size();
    for (const auto& [x, count] : freq) {
        out.emplace_back(x, static_cast<double>(at_least) / static_cast<double>(pop.size()));
        at_least -= count;
    }
    return out;
}

/// Ranks 1..n with ties given their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j + 1);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = r;
        i = j;
    }
    return rank;
}

/// Spearman rank correlation; nullopt when either side has no variation.
inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidArgument("spearman: length mismatch");
    if (x.size() < 2) return std::nullopt;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

struct PopularityComparison {
    struct Pair {
        std::string venue;
        std::uint64_t empirical;
        std::uint64_t modeled;
    };
    std::vector<Pair> pairs;
    /// (empirical popularity, mean modeled popularity of venues with it)
    std::vector<std::pair<std::uint64_t, double>> mean_curve;
    /// Unset when either side is constant.
    std::optional<double> spearman;
};

inline PopularityComparison popularity_comparison(const std::map<std::string, std::uint64_t>& empirical,
                                                  const std::map<std::string, std::uint64_t>& modeled) {
    if (empirical.size() != modeled.size()) throw InvalidArgument("popularity maps cover different venues");
    PopularityComparison out;
    std::vector<double> x, y;
    std::map<std::uint64_t, std::pair<double, std::size_t>> groups;
    auto it = modeled.begin();
    for (const auto& [id, e] : empirical) {
        if (it->first != id) throw InvalidArgument("popularity maps cover different venues ('" + id + "')");
        out.pairs.push_back({id, e, it->second});
        x.push_back(static_cast<double>(e));
        y.push_back(static_cast<double>(it->second));
        auto& g = groups[e];
        g.first += static_cast<double>(it->second);
        ++g.second;
        ++it;
    }
    for (const auto& [e, g] : groups) out.mean_curve.emplace_back(e, g.first / static_cast<double>(g.second));
    out.spearman = spearman(x, y);
    return out;
}

// ---------------------------------------------------------------------------
// Geographic span

struct SpanSample {
    std::string user;
    double span_km = 0.0;
};

struct SpanDistribution {
    std::vector<SpanSample> samples;
    double bin_width = 0.5;
    /// Density per bin [i·w, (i+1)·w); integrates to 1.
    std::vector<double> pdf;
};

/// One span per user with at least one place; `visits[u]` indexes city.venues.
inline SpanDistribution span_distribution(const CityIndex& city, const std::vector<std::vector<std::uint32_t>>& visits,
                                          double bin_width = 0.5) {
    if (!(bin_width > 0.0)) throw InvalidArgument("span bin width must be positive");
    SpanDistribution out;
    out.bin_width = bin_width;
    std::vector<LatLon> places;
    for (std::size_t u = 0; u < visits.size(); ++u) {
        if (visits[u].empty()) continue;
        places.clear();
        for (auto v : visits[u]) places.push_back(city.venues[v]->position);
        out.samples.push_back({city.user_ids[u], geographic_span(places)});
    }
    for (const auto& s : out.samples) {
        const auto bin = static_cast<std::size_t>(s.span_km / bin_width);
        if (bin >= out.pdf.size()) out.pdf.resize(bin + 1, 0.0);
        out.pdf[bin] += 1.0;
    }
    for (auto& p : out.pdf) p /= static_cast<double>(out.samples.size()) * bin_width;
    return out;
}

inline SpanDistribution span_distribution(const CityIndex& city, double bin_width = 0.5) {
    return span_distribution(city, city.visited, bin_width);
}

inline SpanDistribution span_distribution(const CityIndex& city, const PlaceAssignment& a, double bin_width = 0.5) {
    return span_distribution(city, a.visits, bin_width);
}

/// Two-sample Kolmogorov–Smirnov statistic sup |F_a − F_b|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("KS distance needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

inline std::vector<double> span_values(const SpanDistribution& s) {
    std::vector<double> out;
    out.reserve(s.samples.size());
    for (const auto& x : s.samples) out.push_back(x.span_km);
    return out;
}

// ---------------------------------------------------------------------------
// Triangles and places

/// Venue sets aligned with graph nodes; graph users unknown to the city get an empty set.
inline std::vector<std::vector<std::uint32_t>> visited_by_node(const SocialGraph& g, const CityIndex& city,
                                                               const std::vector<std::vector<std::uint32_t>>& visits) {
    std::vector<std::vector<std::uint32_t>> out(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        auto it = std::lower_bound(city.user_ids.begin(), city.user_ids.end(), g.label(u));
        if (it == city.user_ids.end() || *it != g.label(u)) continue;
        out[u] = visits[static_cast<std::size_t>(it - city.user_ids.begin())];
        std::sort(out[u].begin(), out[u].end());
    }
    return out;
}

/// Share of triangles whose three members have a venue in common; nullopt without triangles.
/// `visited[u]` must be sorted.
inline std::optional<double> triangle_common_place_fraction(const SocialGraph& g,
                                                            const std::vector<std::vector<std::uint32_t>>& visited) {
    if (visited.size() != g.node_count()) throw InvalidArgument("visited sets must align with graph nodes");
    std::size_t total = 0, shared = 0;
    std::vector<std::uint32_t> ab;
    for_each_triangle(g, [&](NodeId a, NodeId b, NodeId c) {
        ++total;
        ab.clear();
        std::set_intersection(visited[a].begin(), visited[a].end(), visited[b].begin(), visited[b].end(),
                              std::back_inserter(ab));
        for (auto v : ab) {
            if (std::binary_search(visited[c].begin(), visited[c].end(), v)) {
                ++shared;
                break;
            }
        }
    });
    if (total == 0) return std::nullopt;
    return static_cast<double>(shared) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Colocation

enum class ColocationCount {
    /// Each unordered user pair counted once per category.
    Pair,
    /// Every pair of check-ins inside the window counted.
    Event,
};

struct ColocationResult {
    std::map<Category, double> probability;
    /// Categories with no colocated pairs, left out of `probability`.
    std::vector<Category> omitted;
};

/// P(pair is a tie in g | pair checked in at the same venue within window_s seconds), per category.
inline ColocationResult colocation_friendship_probability(const CityDataset& d, const SocialGraph& g,
                                                          std::int64_t window_s = 3600,
                                                          ColocationCount mode = ColocationCount::Pair) {
    const CityIndex city(d);
    std::unordered_map<std::string_view, std::uint32_t> user_index;
    for (std::uint32_t i = 0; i < city.user_ids.size(); ++i) user_index.emplace(city.user_ids[i], i);
    // dataset user → graph node
    constexpr NodeId absent = static_cast<NodeId>(-1);
    std::vector<NodeId> node(city.user_count(), absent);
    for (std::uint32_t i = 0; i < city.user_count(); ++i) {
        if (auto n = g.find(city.user_ids[i])) node[i] = *n;
    }

    std::vector<std::vector<std::pair<std::int64_t, std::uint32_t>>> by_venue(city.venue_count());
    for (const auto& c : d.checkins) {
        by_venue[*city.venue_of(c.venue)].emplace_back(c.timestamp, user_index.at(c.user));
    }

    std::array<std::unordered_set<std::uint64_t>, kCategoryCount> pairs;
    std::array<std::uint64_t, kCategoryCount> events{}, friend_events{};
    for (std::uint32_t v = 0; v < city.venue_count(); ++v) {
        auto& visits = by_venue[v];
        std::sort(visits.begin(), visits.end());
        const auto cat = static_cast<std::size_t>(city.venues[v]->category);
        for (std::size_t i = 0; i < visits.size(); ++i) {
            for (std::size_t j = i + 1; j < visits.size() && visits[j].first - visits[i].first <= window_s; ++j) {
                std::uint32_t a = visits[i].second, b = visits[j].second;
                if (a == b) continue;
                if (a > b) std::swap(a, b);
                if (mode == ColocationCount::Pair) {
                    pairs[cat].insert((std::uint64_t{a} << 32) | b);
                } else {
                    ++events[cat];
                    if (node[a] != absent && node[b] != absent && g.has_edge(node[a], node[b])) ++friend_events[cat];
                }
            }
        }
    }

    ColocationResult out;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
        std::uint64_t total = 0, friends = 0;
        if (mode == ColocationCount::Pair) {
            total = pairs[c].size();
            for (std::uint64_t key : pairs[c]) {
                const auto a = static_cast<std::uint32_t>(key >> 32), b = static_cast<std::uint32_t>(key);
                if (node[a] != absent && node[b] != absent && g.has_edge(node[a], node[b])) ++friends;
            }
        } else {
            total = events[c];
            friends = friend_events[c];
        }
        if (total == 0) out.omitted.push_back(kAllCategories[c]);
        else out.probability[kAllCategories[c]] = static_cast<double>(friends) / static_cast<double>(total);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random baseline

/// Uniform simple graph with n nodes and exactly k edges (G(n, m)).
inline SocialGraph random_graph(std::size_t n, std::size_t k, std::uint64_t seed) {
    const std::uint64_t max_edges = n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (k > max_edges) throw InvalidArgument("k = " + std::to_string(k) + " exceeds n(n-1)/2 = " + std::to_string(max_edges));
    Rng rng(seed);
    // draw whichever of the edge set or its complement is smaller
    const bool complement = k > max_edges / 2;
    const std::uint64_t draws = complement ? max_edges - k : k;
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(draws * 2);
    while (chosen.size() < draws) {
        auto a = static_cast<std::uint32_t>(rng.below(n));
        auto b = static_cast<std::uint32_t>(rng.below(n));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        chosen.insert((std::uint64_t{a} << 32) | b);
    }
    std::vector<Edge> edges;
    edges.reserve(k);
    if (complement) {
        for (std::uint32_t a = 0; a < n; ++a) {
            for (std::uint32_t b = a + 1; b < n; ++b) {
                if (!chosen.contains((std::uint64_t{a} << 32) | b)) edges.emplace_back(a, b);
            }
        }
    } else {
        for (std::uint64_t key : chosen) edges.emplace_back(static_cast<NodeId>(key >> 32), static_cast<NodeId>(key));
    }
    const std::size_t width = std::to_string(n).size();
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto s = std::to_string(i);
        labels[i] = "r" + std::string(width - s.size(), '0') + s;
    }
    return SocialGraph(std::move(labels), edges);
}

struct BaselineMetrics {
    double clustering = 0.0;
    /// Mean path on the giant component; NaN when it has fewer than two nodes.
    double avg_path = 0.0;
    /// Louvain modularity; NaN when k = 0.
    double modularity = 0.0;
};

/// Clustering, giant-component mean path and Louvain modularity of a G(n, k) graph.
inline BaselineMetrics random_baseline(std::size_t n, std::size_t k, std::uint64_t seed, unsigned threads = 1) {
    if (n == 0) throw InvalidArgument("random baseline needs at least one node");
    const auto g = random_graph(n, k, seed);
    BaselineMetrics out;
    out.clustering = average_clustering(g);
    const auto gc = giant_component(g);
    out.avg_path = gc.node_count() < 2 ? std::nan("") : average_shortest_path_auto(gc, mix64(seed), threads);
    out.modularity = k == 0 ? std::nan("") : modularity(g, louvain(g, mix64(seed + 1)));
    return out;
}

}  // namespace citynet
