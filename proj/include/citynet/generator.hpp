#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "citynet/dataset.hpp"
#include "citynet/error.hpp"
#include "citynet/geo.hpp"
#include "citynet/graph.hpp"
#include "citynet/ingest.hpp"
#include "citynet/parallel.hpp"
#include "citynet/rng.hpp"

namespace citynet {

/// Model constants, ablation switches and seed. Defaults are the published values.
struct GeneratorConfig {
    double alpha = 0.84;           // rank-distance exponent
    double p_social = 0.15;        // Food, Nightlife Spot, Residence
    double p_semi = 0.08;          // Professional and Other Places, Shop and Service
    double p_other = 0.01;         // remaining categories
    double p_overpopular = 0.001;  // any venue above pop_threshold assignees
    std::uint32_t pop_threshold = 30;
    double closure_prob = 0.15;
    bool ablate_distance = false;
    bool ablate_categories = false;
    bool ablate_closure = false;
    /// Tie probability used everywhere under ablate_categories; calibrated by generate() when unset.
    std::optional<double> uniform_tie_prob;
    std::uint64_t seed = 0;

    void validate() const {
        auto prob = [](double p, const char* name) {
            if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must be a probability in [0, 1]");
        };
        prob(p_social, "p_social");
        prob(p_semi, "p_semi");
        prob(p_other, "p_other");
        prob(p_overpopular, "p_overpopular");
        prob(closure_prob, "closure_prob");
        if (uniform_tie_prob) prob(*uniform_tie_prob, "uniform_tie_prob");
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
        if (pop_threshold < 1) throw InvalidArgument("pop_threshold must be >= 1");
    }

    friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

inline nlohmann::json to_json(const GeneratorConfig& c) {
    nlohmann::json j = {
        {"alpha", c.alpha},
        {"p_social", c.p_social},
        {"p_semi", c.p_semi},
        {"p_other", c.p_other},
        {"p_overpopular", c.p_overpopular},
        {"pop_threshold", c.pop_threshold},
        {"closure_prob", c.closure_prob},
        {"ablate_distance", c.ablate_distance},
        {"ablate_categories", c.ablate_categories},
        {"ablate_closure", c.ablate_closure},
        {"uniform_tie_prob", nullptr},
        {"seed", c.seed},
    };
    if (c.uniform_tie_prob) j["uniform_tie_prob"] = *c.uniform_tie_prob;
    return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline GeneratorConfig config_from_json(const nlohmann::json& j, GeneratorConfig c = {}) {
    if (!j.is_object()) throw InvalidArgument("generator config must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "alpha") c.alpha = value.get<double>();
            else if (key == "p_social") c.p_social = value.get<double>();
            else if (key == "p_semi") c.p_semi = value.get<double>();
            else if (key == "p_other") c.p_other = value.get<double>();
            else if (key == "p_overpopular") c.p_overpopular = value.get<double>();
            else if (key == "pop_threshold") c.pop_threshold = value.get<std::uint32_t>();
            else if (key == "closure_prob") c.closure_prob = value.get<double>();
            else if (key == "ablate_distance") c.ablate_distance = value.get<bool>();
            else if (key == "ablate_categories") c.ablate_categories = value.get<bool>();
            else if (key == "ablate_closure") c.ablate_closure = value.get<bool>();
            else if (key == "uniform_tie_prob") {
                if (value.is_null()) c.uniform_tie_prob.reset();
                else c.uniform_tie_prob = value.get<double>();
            } else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else throw InvalidArgument("unknown generator config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("generator config: ") + e.what());
    }
    c.validate();
    return c;
}

/// Per-user venue sequences (indices into CityIndex::venues); entry 0 is the anchor.
struct PlaceAssignment {
    std::vector<std::vector<std::uint32_t>> visits;

    friend bool operator==(const PlaceAssignment&, const PlaceAssignment&) = default;
};

// ---------------------------------------------------------------------------
// Rank distance

/// Rank of every venue as seen from `anchor` (rank 1 = nearest); the anchor itself gets 0.
/// Equal distances order by venue id.
inline std::vector<std::uint32_t> rank_table(const CityIndex& city, std::uint32_t anchor) {
    const std::size_t n = city.venue_count();
    std::vector<std::pair<double, std::uint32_t>> order;
    order.reserve(n);
    const auto& origin = city.venues[anchor]->position;
    for (std::uint32_t w = 0; w < n; ++w) {
        if (w != anchor) order.emplace_back(great_circle(origin, city.venues[w]->position), w);
    }
    std::sort(order.begin(), order.end());
    std::vector<std::uint32_t> rank(n, 0);
    for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i].second] = i + 1;
    return rank;
}

/// 1 + number of venues strictly closer to `from` than `to` (ties by smaller id count as closer).
inline std::uint32_t rank_distance(const CityIndex& city, std::uint32_t from, std::uint32_t to) {
    if (from >= city.venue_count() || to >= city.venue_count()) throw InvalidArgument("unknown venue index");
    if (from == to) throw InvalidArgument("rank distance needs two distinct venues");
    const auto& origin = city.venues[from]->position;
    const double target = great_circle(origin, city.venues[to]->position);
    std::uint32_t closer = 0;
    for (std::uint32_t w = 0; w < city.venue_count(); ++w) {
        if (w == from || w == to) continue;
        const double d = great_circle(origin, city.venues[w]->position);
        if (d < target || (d == target && w < to)) ++closer;
    }
    return closer + 1;
}

inline std::uint32_t rank_distance(const CityIndex& city, std::string_view from, std::string_view to) {
    auto a = city.venue_of(from);
    auto b = city.venue_of(to);
    if (!a) throw InvalidArgument("unknown venue '" + std::string(from) + "'");
    if (!b) throw InvalidArgument("unknown venue '" + std::string(to) + "'");
    return rank_distance(city, *a, *b);
}

// ---------------------------------------------------------------------------
// Place assignment

/// Unnormalised selection weight of every venue given a user's anchor:
/// popularity × rank^(−alpha), or popularity alone under ablate_distance. The anchor gets 0.
inline std::vector<double> assignment_weights(const CityIndex& city, std::uint32_t anchor, const GeneratorConfig& cfg) {
    if (anchor >= city.venue_count()) throw InvalidArgument("unknown anchor venue index");
    std::vector<double> w(city.venue_count());
    if (cfg.ablate_distance) {
        for (std::size_t v = 0; v < w.size(); ++v) w[v] = city.popularity[v];
    } else {
        const auto rank = rank_table(city, anchor);
        for (std::size_t v = 0; v < w.size(); ++v) {
            w[v] = v == anchor ? 0.0 : city.popularity[v] * std::pow(static_cast<double>(rank[v]), -cfg.alpha);
        }
    }
    w[anchor] = 0.0;
    return w;
}

/// Draws each user's venue count from the empirical distinct-venues-per-user
/// distribution, an anchor proportional to popularity, and the remaining
/// venues without replacement from assignment_weights around the anchor.
inline PlaceAssignment assign_places(const CityIndex& city, const GeneratorConfig& cfg, unsigned threads = 1) {
    cfg.validate();
    const std::size_t users = city.user_count();
    PlaceAssignment out;
    out.visits.resize(users);
    if (users == 0) return out;
    if (city.venue_count() == 0) throw InvalidArgument("cannot assign places in a city without venues");

    std::vector<std::size_t> counts(users);
    for (std::size_t u = 0; u < users; ++u) counts[u] = city.visited[u].size();
    std::vector<double> popularity(city.popularity.begin(), city.popularity.end());
    const CumulativeSampler anchor_sampler(popularity);
    if (anchor_sampler.total() <= 0.0) throw InvalidArgument("no venue has any visitors");

    std::vector<std::size_t> wanted(users);
    std::vector<std::uint32_t> anchors(users);
    for (std::size_t u = 0; u < users; ++u) {
        Rng rng = Rng::substream(cfg.seed, "anchor", u);
        wanted[u] = std::max<std::size_t>(1, counts[rng.below(users)]);
        anchors[u] = static_cast<std::uint32_t>(anchor_sampler(rng));
    }

    // users sharing an anchor share its weight vector
    std::vector<std::vector<std::uint32_t>> by_anchor(city.venue_count());
    for (std::uint32_t u = 0; u < users; ++u) by_anchor[anchors[u]].push_back(u);
    std::vector<std::uint32_t> used_anchors;
    for (std::uint32_t v = 0; v < by_anchor.size(); ++v) {
        if (!by_anchor[v].empty()) used_anchors.push_back(v);
    }

    parallel_for(used_anchors.size(), resolve_threads(threads), [&](std::size_t i) {
        const std::uint32_t anchor = used_anchors[i];
        const auto base = assignment_weights(city, anchor, cfg);
        const auto candidates = static_cast<std::size_t>(std::count_if(base.begin(), base.end(), [](double w) { return w > 0.0; }));
        std::vector<double> w;
        for (std::uint32_t u : by_anchor[anchor]) {
            Rng rng = Rng::substream(cfg.seed, "places", u);
            auto& seq = out.visits[u];
            seq.push_back(anchor);
            const std::size_t extra = std::min(wanted[u] - 1, candidates);
            w = base;
            double total = std::accumulate(w.begin(), w.end(), 0.0);
            for (std::size_t k = 0; k < extra && total > 0.0; ++k) {
                const auto pick = static_cast<std::uint32_t>(rng.weighted(w, total));
                seq.push_back(pick);
                w[pick] = 0.0;
                total = std::accumulate(w.begin(), w.end(), 0.0);
            }
        }
    });
    return out;
}

/// Number of users assigned to each venue.
inline std::vector<std::uint32_t> model_popularity(const PlaceAssignment& a, std::size_t venue_count) {
    std::vector<std::uint32_t> pop(venue_count, 0);
    for (const auto& seq : a.visits) {
        for (auto v : seq) ++pop[v];
    }
    return pop;
}

// ---------------------------------------------------------------------------
// Tie formation

/// Tie probability for a pair sharing venue `v` with `assignees` model visitors.
inline double tie_probability(const Venue& v, std::size_t assignees, const GeneratorConfig& cfg) {
    if (cfg.ablate_categories) {
        if (!cfg.uniform_tie_prob) throw InvalidArgument("ablate_categories requires uniform_tie_prob");
        return *cfg.uniform_tie_prob;
    }
    if (assignees > cfg.pop_threshold) return cfg.p_overpopular;
    switch (category_class(v.category)) {
        case CategoryClass::Social: return cfg.p_social;
        case CategoryClass::SemiSocial: return cfg.p_semi;
        case CategoryClass::NonSocial: return cfg.p_other;
    }
    return cfg.p_other;
}

/// Places ties venue by venue (ascending id) over assignee pairs (ascending),
/// each with tie_probability; after every successful draw u1–u2, each existing
/// friend f of u1 also assigned to the venue is linked to u2 with closure_prob.
/// Closure edges do not trigger further closure. Node set = all dataset users.
inline SocialGraph form_ties(const CityIndex& city, const PlaceAssignment& a, const GeneratorConfig& cfg) {
    cfg.validate();
    const std::size_t users = city.user_count();
    if (a.visits.size() != users) throw InvalidArgument("assignment does not match the dataset's user count");
    std::vector<std::vector<NodeId>> assignees(city.venue_count());
    for (NodeId u = 0; u < users; ++u) {
        for (auto v : a.visits[u]) {
            if (v >= city.venue_count()) throw InvalidArgument("assignment references an unknown venue");
            assignees[v].push_back(u);
        }
    }

    std::vector<std::vector<NodeId>> friends(users);
    std::vector<Edge> edges;
    auto link = [&](NodeId x, NodeId y) {
        auto& fx = friends[x];
        auto it = std::lower_bound(fx.begin(), fx.end(), y);
        if (it != fx.end() && *it == y) return;
        fx.insert(it, y);
        auto& fy = friends[y];
        fy.insert(std::lower_bound(fy.begin(), fy.end(), x), x);
        edges.emplace_back(std::min(x, y), std::max(x, y));
    };

    std::vector<char> here(users, 0);
    std::vector<NodeId> local_friends;
    for (std::uint32_t v = 0; v < city.venue_count(); ++v) {
        const auto& group = assignees[v];
        if (group.size() < 2) continue;
        const double p = tie_probability(*city.venues[v], group.size(), cfg);
        Rng rng = Rng::substream(cfg.seed, "ties", v);
        for (NodeId u : group) here[u] = 1;
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                const NodeId u1 = group[i], u2 = group[j];
                if (!rng.bernoulli(p)) continue;
                local_friends.clear();
                if (!cfg.ablate_closure) {
                    for (NodeId f : friends[u1]) {
                        if (f != u2 && here[f]) local_friends.push_back(f);
                    }
                }
                link(u1, u2);
                for (NodeId f : local_friends) {
                    if (rng.bernoulli(cfg.closure_prob)) link(f, u2);
                }
            }
        }
        for (NodeId u : group) here[u] = 0;
    }
    return SocialGraph(city.user_ids, edges);
}

/// Bisects for the uniform tie probability whose category-blind run on `a`
/// yields `target_edges` ties (stops within 0.5%).
inline double calibrate_uniform_tie_prob(const CityIndex& city, const PlaceAssignment& a, GeneratorConfig cfg,
                                         std::size_t target_edges) {
    cfg.ablate_categories = true;
    double lo = 0.0, hi = 1.0;
    double best = 0.0;
    double best_gap = static_cast<double>(target_edges);
    for (int iter = 0; iter < 40; ++iter) {
        const double p = 0.5 * (lo + hi);
        cfg.uniform_tie_prob = p;
        const auto edges = static_cast<double>(form_ties(city, a, cfg).edge_count());
        const double gap = std::abs(edges - static_cast<double>(target_edges));
        if (gap < best_gap) {
            best_gap = gap;
            best = p;
        }
        if (gap <= 0.005 * static_cast<double>(target_edges)) break;
        if (edges < static_cast<double>(target_edges)) lo = p;
        else hi = p;
    }
    return best;
}

struct Generation {
    PlaceAssignment assignment;
    SocialGraph graph;
    /// Config as actually run (uniform_tie_prob filled in when calibrated).
    GeneratorConfig config;
};

/// assign_places followed by form_ties under one seed. Under ablate_categories
/// with no uniform_tie_prob, a full-model pilot on the same assignment sets
/// the tie count that the uniform probability is calibrated to reproduce.
inline Generation generate(const CityIndex& city, GeneratorConfig cfg, unsigned threads = 1) {
    cfg.validate();
    Generation out;
    out.assignment = assign_places(city, cfg, threads);
    if (cfg.ablate_categories && !cfg.uniform_tie_prob) {
        GeneratorConfig pilot = cfg;
        pilot.ablate_categories = false;
        const auto target = form_ties(city, out.assignment, pilot).edge_count();
        cfg.uniform_tie_prob = calibrate_uniform_tie_prob(city, out.assignment, cfg, target);
    }
    out.graph = form_ties(city, out.assignment, cfg);
    out.config = cfg;
    return out;
}

// ---------------------------------------------------------------------------
// Assignment CSV: user_id,venue_id,position (position 0 = anchor)

inline void write_assignment(std::ostream& out, const CityIndex& city, const PlaceAssignment& a) {
    out << "user_id,venue_id,position\n";
    for (std::size_t u = 0; u < a.visits.size(); ++u) {
        for (std::size_t k = 0; k < a.visits[u].size(); ++k) {
            out << city.user_ids[u] << ',' << city.venues[a.visits[u][k]]->id << ',' << k << '\n';
        }
    }
}

inline PlaceAssignment read_assignment(std::istream& in, const CityIndex& city) {
    PlaceAssignment a;
    a.visits.resize(city.user_count());
    detail::read_csv(in, 3, [&](std::vector<std::string>& f, std::size_t lineno) {
        auto it = std::lower_bound(city.user_ids.begin(), city.user_ids.end(), f[0]);
        if (it == city.user_ids.end() || *it != f[0]) throw ParseError("unknown user '" + f[0] + "'", lineno);
        auto v = city.venue_of(f[1]);
        if (!v) throw ParseError("unknown venue '" + f[1] + "'", lineno);
        const auto pos = detail::parse_number<std::size_t>(f[2], "position", lineno);
        auto& seq = a.visits[static_cast<std::size_t>(it - city.user_ids.begin())];
        if (pos != seq.size()) throw ParseError("positions must be consecutive from 0 per user", lineno);
        if (std::find(seq.begin(), seq.end(), *v) != seq.end()) throw ParseError("duplicate venue for user", lineno);
        seq.push_back(*v);
    });
    return a;
}

}  // namespace citynet
