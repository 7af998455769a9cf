#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "citynet/analysis.hpp"
#include "citynet/community.hpp"
#include "citynet/dataset.hpp"
#include "citynet/graph.hpp"
#include "citynet/paths.hpp"
#include "citynet/powerlaw.hpp"

namespace citynet {

struct ReportOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool with_baseline = true;
    std::int64_t colocation_window_s = 3600;
    ColocationCount colocation_mode = ColocationCount::Pair;
};

/// Structural and spatial measurements of one network.
struct MetricReport {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t n_gc = 0;
    std::optional<double> clustering;
    std::optional<double> avg_path;
    std::optional<double> modularity;
    std::optional<PowerLawFit> degree_fit;
    std::optional<PowerLawFit> popularity_fit;
    std::optional<double> triangle_common_place;
    std::map<Category, double> coloc_prob;
    std::optional<BaselineMetrics> baseline;
};

namespace detail {

inline std::optional<PowerLawFit> try_fit(const std::vector<std::uint64_t>& samples) {
    std::vector<std::uint64_t> positive;
    for (auto x : samples) {
        if (x > 0) positive.push_back(x);
    }
    try {
        return fit_power_law(positive);
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

inline nlohmann::json optional_number(const std::optional<double>& x) {
    if (!x || !std::isfinite(*x)) return nullptr;
    return *x;
}

inline nlohmann::json fit_json(const std::optional<PowerLawFit>& f) {
    if (!f) return {{"exponent", nullptr}, {"xmin", nullptr}, {"ks", nullptr}};
    return {{"exponent", f->exponent}, {"xmin", f->xmin}, {"ks", f->ks_statistic}};
}

}  // namespace detail

/// Measures `g` over its nodes with at least one tie. `visits` are per-user venue
/// sets of `city` (its check-ins or a model assignment); without a city the
/// place-based fields stay unset. `checkins` enables the colocation measurement.
inline MetricReport compute_report(const SocialGraph& input, const CityIndex* city,
                                   const std::vector<std::vector<std::uint32_t>>* visits,
                                   const CityDataset* checkins, const ReportOptions& opt = {}) {
    if (city && !visits) visits = &city->visited;
    const SocialGraph g = without_isolated(input);
    MetricReport r;
    r.n = g.node_count();
    r.k = g.edge_count();
    if (!g.empty()) {
        const auto gc = giant_component(g);
        r.n_gc = gc.node_count();
        r.clustering = average_clustering(g);
        if (gc.node_count() >= 2) r.avg_path = average_shortest_path_auto(gc, opt.seed, opt.threads);
        if (g.edge_count() > 0) r.modularity = modularity(g, louvain(g, opt.seed));
        r.degree_fit = detail::try_fit(degree_sequence(g));
        if (city) r.triangle_common_place = triangle_common_place_fraction(g, visited_by_node(g, *city, *visits));
        if (opt.with_baseline) r.baseline = random_baseline(r.n, r.k, mix64(opt.seed ^ hash_tag("baseline")), opt.threads);
    }
    if (city) {
        std::vector<std::uint64_t> pop(city->venue_count(), 0);
        for (const auto& seq : *visits) {
            for (auto v : seq) ++pop[v];
        }
        r.popularity_fit = detail::try_fit(pop);
    }
    if (checkins) {
        r.coloc_prob = colocation_friendship_probability(*checkins, g, opt.colocation_window_s, opt.colocation_mode).probability;
    }
    return r;
}

inline nlohmann::json to_json(const MetricReport& r) {
    nlohmann::json coloc = nlohmann::json::object();
    for (const auto& [c, p] : r.coloc_prob) coloc[std::string(to_string(c))] = p;
    nlohmann::json baseline = {{"c_r", nullptr}, {"d_r", nullptr}, {"q_r", nullptr}};
    if (r.baseline) {
        baseline = {{"c_r", detail::optional_number(r.baseline->clustering)},
                    {"d_r", detail::optional_number(r.baseline->avg_path)},
                    {"q_r", detail::optional_number(r.baseline->modularity)}};
    }
    return {
        {"n", r.n},
        {"k", r.k},
        {"n_gc", r.n_gc},
        {"clustering", detail::optional_number(r.clustering)},
        {"avg_path", detail::optional_number(r.avg_path)},
        {"modularity", detail::optional_number(r.modularity)},
        {"degree_fit", detail::fit_json(r.degree_fit)},
        {"popularity_fit", detail::fit_json(r.popularity_fit)},
        {"triangle_common_place", detail::optional_number(r.triangle_common_place)},
        {"coloc_prob", std::move(coloc)},
        {"baseline", std::move(baseline)},
    };
}

inline const std::vector<std::string>& report_keys() {
    static const std::vector<std::string> keys = {"n",          "k",              "n_gc",
                                                  "clustering", "avg_path",       "modularity",
                                                  "degree_fit", "popularity_fit", "triangle_common_place",
                                                  "coloc_prob", "baseline"};
    return keys;
}

/// Element-wise mean of reports sharing one schema. A numeric field is null
/// in the result if it is null in any input.
inline nlohmann::json average_reports(const std::vector<nlohmann::json>& reports) {
    if (reports.empty()) throw InvalidArgument("no reports to average");
    auto mean = [&](auto&& self, const std::vector<const nlohmann::json*>& xs) -> nlohmann::json {
        const auto& first = *xs.front();
        if (first.is_object()) {
            nlohmann::json out = nlohmann::json::object();
            for (const auto& [key, value] : first.items()) {
                std::vector<const nlohmann::json*> sub;
                for (const auto* x : xs) {
                    if (x->is_object() && x->contains(key)) sub.push_back(&(*x)[key]);
                }
                out[key] = sub.size() == xs.size() ? self(self, sub) : nlohmann::json(nullptr);
            }
            return out;
        }
        double sum = 0.0;
        for (const auto* x : xs) {
            if (!x->is_number()) return nullptr;
            sum += x->get<double>();
        }
        return sum / static_cast<double>(xs.size());
    };
    std::vector<const nlohmann::json*> all;
    for (const auto& r : reports) all.push_back(&r);
    return mean(mean, all);
}

// CSV outputs for external plotting; every file starts with a header row.

inline void write_degree_csv(std::ostream& out, const std::map<std::size_t, std::size_t>& hist) {
    out << "degree,count\n";
    for (const auto& [deg, count] : hist) out << deg << ',' << count << '\n';
}

inline void write_ccdf_csv(std::ostream& out, const std::vector<std::pair<std::uint64_t, double>>& ccdf) {
    out << "popularity,ccdf\n";
    for (const auto& [x, p] : ccdf) out << x << ',' << p << '\n';
}

inline void write_span_csv(std::ostream& out, const SpanDistribution& s) {
    out << "bin_start_km,bin_end_km,density\n";
    for (std::size_t i = 0; i < s.pdf.size(); ++i) {
        out << static_cast<double>(i) * s.bin_width << ',' << static_cast<double>(i + 1) * s.bin_width << ',' << s.pdf[i] << '\n';
    }
}

inline void write_popularity_pairs_csv(std::ostream& out, const PopularityComparison& c) {
    out << "venue_id,empirical,modeled\n";
    for (const auto& p : c.pairs) out << p.venue << ',' << p.empirical << ',' << p.modeled << '\n';
}

inline void write_popularity_curve_csv(std::ostream& out, const PopularityComparison& c) {
    out << "empirical,mean_modeled\n";
    for (const auto& [e, m] : c.mean_curve) out << e << ',' << m << '\n';
}

}  // namespace citynet
