#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "citynet/dataset.hpp"
#include "citynet/error.hpp"
#include "citynet/generator.hpp"
#include "citynet/geo.hpp"
#include "citynet/powerlaw.hpp"
#include "citynet/rng.hpp"

namespace citynet {

/// Desk-scale city used in place of proprietary check-in data.
struct SyntheticCityParams {
    std::size_t n_users = 2000;
    std::size_t n_venues = 1500;
    double popularity_exponent = 1.87;
    double span_km = 10.0;
    std::uint64_t seed = 0;
    /// Upper bound on a venue's popularity as a fraction of n_users.
    double max_popularity_share = 1.0;
    /// Distinct venues per user follow a discrete power law with this exponent (min 1).
    double visits_exponent = 2.0;
    /// Rank-distance exponent used when laying users' venue sets out in space.
    double mobility_alpha = 0.84;
    LatLon center{33.749, -84.388};
    /// Relative frequency of each category, indexed like kAllCategories.
    std::array<double, kCategoryCount> category_weights{0.07, 0.04, 0.26, 0.08, 0.09, 0.14, 0.07, 0.17, 0.08};
    std::int64_t start_time = 1290000000;
    std::int64_t time_span_s = 30 * 86400;
    /// Check-ins per visited venue are uniform on 1..max_checkins_per_visit.
    std::uint32_t max_checkins_per_visit = 1;
    /// Extra one-way follows and non-colocated reciprocal follows, as fractions of n_users.
    double one_way_follow_rate = 0.5;
    double stray_mutual_rate = 0.1;
};

namespace detail {

inline std::string padded_id(char prefix, std::size_t i, std::size_t count) {
    const std::size_t width = std::to_string(count).size();
    auto s = std::to_string(i);
    return prefix + std::string(width - s.size(), '0') + s;
}

}  // namespace detail

/// Synthesizes venues (uniform in a disc), per-venue popularity (discrete power
/// law), per-user venue counts (discrete power law), spatially local venue sets
/// realising both exactly where possible, timestamped check-ins and a follow
/// graph whose reciprocal, co-visiting part comes from the tie model.
inline CityDataset generate_synthetic_city(const SyntheticCityParams& p) {
    if (p.n_users < 1 || p.n_venues < 1) throw InvalidArgument("synthetic city needs at least one user and one venue");
    if (!(p.popularity_exponent > 1.0)) throw InvalidArgument("popularity exponent must exceed 1 (non-normalizable otherwise)");
    if (!(p.visits_exponent > 1.0)) throw InvalidArgument("visits exponent must exceed 1 (non-normalizable otherwise)");
    if (!(p.span_km >= 0.0)) throw InvalidArgument("span_km must be non-negative");
    if (p.max_checkins_per_visit < 1) throw InvalidArgument("max_checkins_per_visit must be at least 1");
    const std::size_t nu = p.n_users, nv = p.n_venues;

    // venues
    Rng venue_rng = Rng::substream(p.seed, "synth-venues", 0);
    const CumulativeSampler category_sampler(p.category_weights);
    const double km_per_degree = kEarthRadiusKm * std::numbers::pi / 180.0;
    std::vector<Venue> venues(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        const double r = p.span_km * std::sqrt(venue_rng.uniform());
        const double theta = 2.0 * std::numbers::pi * venue_rng.uniform();
        const double dy = r * std::sin(theta), dx = r * std::cos(theta);
        venues[v].id = detail::padded_id('v', v, nv);
        venues[v].name = "Venue " + std::to_string(v);
        venues[v].position = {p.center.lat + dy / km_per_degree,
                              p.center.lon + dx / (km_per_degree * std::cos(p.center.lat * std::numbers::pi / 180.0))};
        venues[v].category = kAllCategories[category_sampler(venue_rng)];
    }

    // target popularity and per-user counts, reconciled to equal totals
    Rng count_rng = Rng::substream(p.seed, "synth-counts", 0);
    const auto pop_cap = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(p.max_popularity_share * static_cast<double>(nu)));
    const DiscretePowerLaw pop_law(p.popularity_exponent, 1, std::min<std::uint64_t>(pop_cap, nu));
    const DiscretePowerLaw visit_law(p.visits_exponent, 1, nv);
    std::vector<std::uint64_t> capacity(nv);
    for (auto& c : capacity) c = pop_law(count_rng);
    std::vector<std::uint64_t> wanted(nu);
    for (auto& m : wanted) m = visit_law(count_rng);
    std::uint64_t total = std::accumulate(capacity.begin(), capacity.end(), std::uint64_t{0});
    while (total < nu) {
        auto v = count_rng.below(nv);
        if (capacity[v] < pop_cap) {
            ++capacity[v];
            ++total;
        }
    }
    std::uint64_t demand = std::accumulate(wanted.begin(), wanted.end(), std::uint64_t{0});
    while (demand > total) {
        auto u = count_rng.below(nu);
        if (wanted[u] > 1) {
            --wanted[u];
            --demand;
        }
    }
    while (demand < total) {
        // grow in proportion to current counts so the shape of the law survives
        std::vector<double> weights(wanted.begin(), wanted.end());
        for (std::size_t u = 0; u < nu; ++u) {
            if (wanted[u] >= nv) weights[u] = 0.0;
        }
        const CumulativeSampler grow(weights);
        const std::uint64_t batch = std::min<std::uint64_t>(total - demand, std::max<std::size_t>(1, nu / 10));
        for (std::uint64_t k = 0; k < batch; ++k) {
            auto u = grow(count_rng);
            if (wanted[u] < nv) {
                ++wanted[u];
                ++demand;
            }
        }
    }

    // spatially local venue sets drawn against remaining capacity
    Rng place_rng = Rng::substream(p.seed, "synth-places", 0);
    std::vector<std::uint32_t> order(nu);
    std::iota(order.begin(), order.end(), 0u);
    place_rng.shuffle(order);
    std::unordered_map<std::uint32_t, std::vector<double>> decay_cache;
    auto decay_from = [&](std::uint32_t anchor) -> const std::vector<double>& {
        auto [it, inserted] = decay_cache.try_emplace(anchor);
        if (inserted) {
            std::vector<std::pair<double, std::uint32_t>> byd;
            byd.reserve(nv);
            for (std::uint32_t w = 0; w < nv; ++w) {
                if (w != anchor) byd.emplace_back(great_circle(venues[anchor].position, venues[w].position), w);
            }
            std::sort(byd.begin(), byd.end());
            it->second.assign(nv, 0.0);
            for (std::size_t r = 0; r < byd.size(); ++r) {
                it->second[byd[r].second] = std::pow(static_cast<double>(r + 1), -p.mobility_alpha);
            }
        }
        return it->second;
    };

    std::vector<std::vector<std::uint32_t>> visits(nu);
    std::vector<double> weights(nv);
    for (std::uint32_t u : order) {
        for (std::size_t v = 0; v < nv; ++v) weights[v] = static_cast<double>(capacity[v]);
        double left = std::accumulate(weights.begin(), weights.end(), 0.0);
        if (left <= 0.0) break;
        const auto anchor = static_cast<std::uint32_t>(place_rng.weighted(weights, left));
        visits[u].push_back(anchor);
        --capacity[anchor];
        const auto& decay = decay_from(anchor);
        for (std::size_t v = 0; v < nv; ++v) weights[v] = static_cast<double>(capacity[v]) * decay[v];
        weights[anchor] = 0.0;
        left = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (std::uint64_t k = 1; k < wanted[u] && left > 0.0; ++k) {
            const auto pick = static_cast<std::uint32_t>(place_rng.weighted(weights, left));
            visits[u].push_back(pick);
            --capacity[pick];
            weights[pick] = 0.0;
            left = std::accumulate(weights.begin(), weights.end(), 0.0);
        }
    }
    // users left without places get one, and leftover capacity goes to the
    // users anchored nearest to the venue
    for (std::uint32_t u = 0; u < nu; ++u) {
        if (!visits[u].empty()) continue;
        const auto v = static_cast<std::uint32_t>(place_rng.below(nv));
        visits[u].push_back(v);
    }
    for (std::uint32_t v = 0; v < nv; ++v) {
        if (capacity[v] == 0) continue;
        std::vector<std::pair<double, std::uint32_t>> near;
        for (std::uint32_t u = 0; u < nu; ++u) {
            if (std::find(visits[u].begin(), visits[u].end(), v) != visits[u].end()) continue;
            near.emplace_back(great_circle(venues[visits[u][0]].position, venues[v].position), u);
        }
        std::sort(near.begin(), near.end());
        for (std::size_t k = 0; k < near.size() && capacity[v] > 0; ++k, --capacity[v]) visits[near[k].second].push_back(v);
    }

    CityDataset d;
    for (auto& v : venues) d.venues.emplace(v.id, v);
    d.users.reserve(nu);
    for (std::size_t u = 0; u < nu; ++u) d.users.push_back(detail::padded_id('u', u, nu));

    // check-ins per visited venue, uniform over the observation period
    Rng time_rng = Rng::substream(p.seed, "synth-times", 0);
    const auto span = static_cast<std::uint64_t>(std::max<std::int64_t>(1, p.time_span_s));
    std::vector<std::vector<std::vector<std::int64_t>>> times(nu);
    for (std::size_t u = 0; u < nu; ++u) {
        times[u].resize(visits[u].size());
        for (std::size_t k = 0; k < visits[u].size(); ++k) {
            const auto n = p.max_checkins_per_visit > 1 ? 1 + time_rng.below(p.max_checkins_per_visit) : 1;
            for (std::uint64_t c = 0; c < n; ++c) {
                times[u][k].push_back(p.start_time + static_cast<std::int64_t>(time_rng.below(span)));
            }
        }
    }

    // ground-truth ties from the full model on these venue sets
    for (std::size_t u = 0; u < nu; ++u) {
        for (auto v : visits[u]) d.checkins.push_back({d.users[u], venues[v].id, 0});
    }
    const CityIndex index(d);
    PlaceAssignment truth{visits};
    GeneratorConfig tie_cfg;
    tie_cfg.seed = mix64(p.seed ^ hash_tag("synth-ties"));
    const auto ties = form_ties(index, truth, tie_cfg);

    // friends meet: the later user's first check-in at their first shared venue
    // moves to within half an hour of the earlier user's
    // (graph nodes and dataset users share the same sorted order)
    for (auto [ua, ub] : ties.edges()) {
        for (std::size_t i = 0; i < visits[ua].size(); ++i) {
            auto j = std::find(visits[ub].begin(), visits[ub].end(), visits[ua][i]);
            if (j == visits[ub].end()) continue;
            auto& tb = times[ub][static_cast<std::size_t>(j - visits[ub].begin())];
            tb.front() = times[ua][i].front() + static_cast<std::int64_t>(time_rng.below(1800));
            break;
        }
    }

    d.checkins.clear();
    for (std::size_t u = 0; u < nu; ++u) {
        for (std::size_t k = 0; k < visits[u].size(); ++k) {
            for (auto t : times[u][k]) d.checkins.push_back({d.users[u], venues[visits[u][k]].id, t});
        }
    }
    std::sort(d.checkins.begin(), d.checkins.end(), [](const CheckIn& x, const CheckIn& y) {
        return std::tie(x.timestamp, x.user, x.venue) < std::tie(y.timestamp, y.user, y.venue);
    });

    // follows: both directions for every tie, plus one-way and stray mutual noise
    for (auto [a, b] : ties.edges()) {
        d.follows.emplace(ties.label(a), ties.label(b));
        d.follows.emplace(ties.label(b), ties.label(a));
    }
    Rng follow_rng = Rng::substream(p.seed, "synth-follows", 0);
    if (nu >= 2) {
        const auto one_way = static_cast<std::size_t>(p.one_way_follow_rate * static_cast<double>(nu));
        for (std::size_t k = 0; k < one_way; ++k) {
            const auto a = follow_rng.below(nu), b = follow_rng.below(nu);
            if (a != b && !d.follows.contains({d.users[b], d.users[a]})) d.follows.emplace(d.users[a], d.users[b]);
        }
        const auto stray = static_cast<std::size_t>(p.stray_mutual_rate * static_cast<double>(nu));
        for (std::size_t k = 0; k < stray; ++k) {
            const auto a = follow_rng.below(nu), b = follow_rng.below(nu);
            if (a == b) continue;
            d.follows.emplace(d.users[a], d.users[b]);
            d.follows.emplace(d.users[b], d.users[a]);
        }
    }
    validate(d);
    return d;
}

inline CityDataset generate_synthetic_city(std::size_t n_users, std::size_t n_venues, double popularity_exponent,
                                           double span_km, std::uint64_t seed) {
    SyntheticCityParams p;
    p.n_users = n_users;
    p.n_venues = n_venues;
    p.popularity_exponent = popularity_exponent;
    p.span_km = span_km;
    p.seed = seed;
    return generate_synthetic_city(p);
}

}  // namespace citynet
