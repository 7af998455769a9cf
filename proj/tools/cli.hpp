#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "citynet/analysis.hpp"
#include "citynet/dataset.hpp"
#include "citynet/generator.hpp"
#include "citynet/graph.hpp"
#include "citynet/ingest.hpp"
#include "citynet/parallel.hpp"
#include "citynet/report.hpp"
#include "citynet/synthetic.hpp"

namespace citynet::cli {

inline constexpr const char* kToolVersion = "citynet 0.1.0";

enum Exit : int { kOk = 0, kInvalid = 1, kCannotOpen = 2 };

/// Thrown for files that cannot be opened or created; maps to exit status 2.
class IoError : public Error {
public:
    using Error::Error;
};

namespace fs = std::filesystem;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out.flush()) throw IoError("failed writing '" + path.string() + "'");
}

inline void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot open directory '" + dir.string() + "': " + ec.message());
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

/// Parses with `fn`, prefixing any parse error with the file name.
template <typename Fn>
auto parse_file(const std::string& path, Fn&& fn) {
    std::istringstream in(read_file(path));
    try {
        return fn(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), 0);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline CityDataset load_dataset(const std::string& path) {
    return parse_file(path, [](std::istream& in) {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("not valid JSON: ") + e.what());
        }
        return dataset_from_json(j);
    });
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

template <typename Writer>
std::string render(Writer&& w) {
    std::ostringstream s;
    s << std::setprecision(17);
    w(s);
    return s.str();
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string checkins, venues, follows, out;
};

inline int cmd_ingest(const IngestArgs& a, std::ostream& out) {
    auto venues = parse_file(a.venues, [](std::istream& in) { return parse_venues(in); });
    auto checkins = parse_file(a.checkins, [](std::istream& in) { return parse_checkins(in); });
    auto follows = parse_file(a.follows, [](std::istream& in) { return parse_follows(in); });
    const auto d = assemble_dataset(std::move(venues), std::move(checkins), std::move(follows));
    write_file(a.out, dump(to_json(d)));
    out << "users: " << d.users.size() << "\nvenues: " << d.venues.size() << "\ncheck-ins: " << d.checkins.size() << '\n';
    return kOk;
}

struct BuildNetworkArgs {
    std::string dataset, out;
    bool all_users = false;
};

inline int cmd_build_network(const BuildNetworkArgs& a, std::ostream& out) {
    const auto d = load_dataset(a.dataset);
    const auto g = build_city_network(d, a.all_users ? NodePolicy::AllUsers : NodePolicy::Connected);
    write_file(a.out, render([&](std::ostream& s) { write_edge_list(s, g); }));
    const std::size_t gc = g.empty() ? 0 : giant_component(g).node_count();
    out << "N: " << g.node_count() << "\nK: " << g.edge_count() << "\nN_GC: " << gc << '\n';
    return kOk;
}

struct GenerateArgs {
    std::string dataset, config, out;
    std::vector<std::string> ablate;
    std::optional<std::uint64_t> seed;
    unsigned runs = 1;
    unsigned threads = 0;
    bool metrics = false;
};

inline nlohmann::json model_metrics(const Generation& run, const CityIndex& city, unsigned threads) {
    ReportOptions opt;
    opt.seed = run.config.seed;
    opt.threads = threads;
    return to_json(compute_report(run.graph, &city, &run.assignment.visits, nullptr, opt));
}

inline int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    const std::string dataset_text = read_file(a.dataset);
    const auto d = load_dataset(a.dataset);
    GeneratorConfig cfg;
    bool config_has_seed = false;
    nlohmann::json inputs = {{"dataset", {{"path", a.dataset}, {"sha256", sha256_hex(dataset_text)}}}};
    if (!a.config.empty()) {
        const std::string text = read_file(a.config);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument(a.config + ": not valid JSON: " + e.what());
        }
        cfg = config_from_json(j);
        config_has_seed = j.contains("seed");
        inputs["config"] = {{"path", a.config}, {"sha256", sha256_hex(text)}};
    }
    for (const auto& flag : a.ablate) {
        if (flag == "distance") cfg.ablate_distance = true;
        else if (flag == "categories") cfg.ablate_categories = true;
        else if (flag == "closure") cfg.ablate_closure = true;
        else throw InvalidArgument("unknown ablation '" + flag + "'");
    }
    std::string seed_source = "config";
    if (a.seed) {
        cfg.seed = *a.seed;
        seed_source = "flag";
    } else if (!config_has_seed) {
        std::random_device rd;
        cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        seed_source = "auto";
    }
    cfg.validate();
    if (a.runs < 1) throw InvalidArgument("--runs must be at least 1");

    const unsigned threads = resolve_threads(a.threads);
    const CityIndex city(d);
    make_dir(a.out);
    const fs::path root(a.out);

    nlohmann::json runs = nlohmann::json::array();
    std::vector<nlohmann::json> metrics;
    for (unsigned r = 0; r < a.runs; ++r) {
        GeneratorConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + r;
        const auto run = generate(city, run_cfg, threads);
        std::string prefix;
        if (a.runs > 1) {
            std::ostringstream name;
            name << "run_" << std::setw(2) << std::setfill('0') << r + 1 << '/';
            prefix = name.str();
            make_dir(root / prefix);
        }
        nlohmann::json outputs = {prefix + "graph.edges", prefix + "assignment.csv"};
        write_file(root / (prefix + "graph.edges"), render([&](std::ostream& s) { write_edge_list(s, run.graph); }));
        write_file(root / (prefix + "assignment.csv"), render([&](std::ostream& s) { write_assignment(s, city, run.assignment); }));
        if (a.metrics || a.runs > 1) {
            metrics.push_back(model_metrics(run, city, threads));
            write_file(root / (prefix + "metrics.json"), dump(metrics.back()));
            outputs.push_back(prefix + "metrics.json");
        }
        runs.push_back({{"seed", run_cfg.seed}, {"config", to_json(run.config)}, {"outputs", outputs}});
        out << "run " << r + 1 << ": seed " << run_cfg.seed << ", N " << without_isolated(run.graph).node_count() << ", K "
            << run.graph.edge_count() << '\n';
    }
    nlohmann::json manifest = {
        {"tool_version", kToolVersion},
        {"config", to_json(cfg)},
        {"seed_source", seed_source},
        {"inputs", inputs},
        {"runs", runs},
    };
    if (a.runs > 1) {
        write_file(root / "metrics_mean.json", dump(average_reports(metrics)));
        manifest["outputs"] = {"metrics_mean.json"};
    }
    write_file(root / "manifest.json", dump(manifest));
    return kOk;
}

struct AnalyzeArgs {
    std::string graph, dataset, assignment, out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool event_mode = false;
    bool no_baseline = false;
};

inline int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const auto g = parse_file(a.graph, [](std::istream& in) { return read_edge_list(in); });
    std::optional<CityDataset> d;
    std::optional<CityIndex> city;
    std::optional<PlaceAssignment> assignment;
    if (!a.dataset.empty()) {
        d = load_dataset(a.dataset);
        city.emplace(*d);
    }
    if (!a.assignment.empty()) {
        if (!city) throw InvalidArgument("--assignment requires --dataset");
        assignment = parse_file(a.assignment, [&](std::istream& in) { return read_assignment(in, *city); });
    }
    ReportOptions opt;
    opt.seed = a.seed;
    opt.threads = resolve_threads(a.threads);
    opt.with_baseline = !a.no_baseline;
    opt.colocation_mode = a.event_mode ? ColocationCount::Event : ColocationCount::Pair;
    const auto* visits = assignment ? &assignment->visits : city ? &city->visited : nullptr;
    const auto report = compute_report(g, city ? &*city : nullptr, visits, d ? &*d : nullptr, opt);

    make_dir(a.out);
    const fs::path root(a.out);
    write_file(root / "report.json", dump(to_json(report)));
    write_file(root / "degree_distribution.csv",
               render([&](std::ostream& s) { write_degree_csv(s, degree_distribution(without_isolated(g))); }));
    if (city) {
        const auto pop = assignment ? place_popularity(*city, *assignment) : place_popularity(*d);
        if (!pop.empty()) write_file(root / "popularity_ccdf.csv", render([&](std::ostream& s) { write_ccdf_csv(s, popularity_ccdf(pop)); }));
        write_file(root / "span_pdf.csv", render([&](std::ostream& s) { write_span_csv(s, span_distribution(*city, *visits)); }));
    }
    out << "N: " << report.n << "\nK: " << report.k << "\nN_GC: " << report.n_gc << '\n';
    if (report.clustering) out << "C: " << *report.clustering << '\n';
    if (report.avg_path) out << "d: " << *report.avg_path << '\n';
    if (report.modularity) out << "Q: " << *report.modularity << '\n';
    return kOk;
}

struct SynthArgs {
    SyntheticCityParams params;
    std::string out;
};

inline int cmd_synth(const SynthArgs& a, std::ostream& out) {
    const auto d = generate_synthetic_city(a.params);
    write_file(a.out, dump(to_json(d)));
    out << "users: " << d.users.size() << "\nvenues: " << d.venues.size() << "\ncheck-ins: " << d.checkins.size() << '\n';
    return kOk;
}

struct CompareArgs {
    std::string dataset, assignment, out;
    double bin_width = 0.5;
};

inline int cmd_compare(const CompareArgs& a, std::ostream& out) {
    const auto d = load_dataset(a.dataset);
    const CityIndex city(d);
    const auto assignment = parse_file(a.assignment, [&](std::istream& in) { return read_assignment(in, city); });
    const auto pop = popularity_comparison(place_popularity(d), place_popularity(city, assignment));
    const auto span_in = span_distribution(city, a.bin_width);
    const auto span_model = span_distribution(city, assignment, a.bin_width);
    const double ks = ks_two_sample(span_values(span_in), span_values(span_model));

    make_dir(a.out);
    const fs::path root(a.out);
    write_file(root / "popularity_pairs.csv", render([&](std::ostream& s) { write_popularity_pairs_csv(s, pop); }));
    write_file(root / "popularity_curve.csv", render([&](std::ostream& s) { write_popularity_curve_csv(s, pop); }));
    write_file(root / "span_input.csv", render([&](std::ostream& s) { write_span_csv(s, span_in); }));
    write_file(root / "span_model.csv", render([&](std::ostream& s) { write_span_csv(s, span_model); }));
    nlohmann::json summary = {{"spearman", pop.spearman ? nlohmann::json(*pop.spearman) : nlohmann::json(nullptr)},
                              {"span_ks", ks}};
    write_file(root / "comparison.json", dump(summary));
    out << "spearman: " << (pop.spearman ? std::to_string(*pop.spearman) : "undefined") << "\nspan KS: " << ks << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Place-focused city social networks: ingestion, generation, analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Assemble check-in, venue and follow CSVs into a dataset JSON");
    c_ingest->add_option("--checkins", ingest.checkins, "user_id,venue_id,unix_timestamp CSV")->required();
    c_ingest->add_option("--venues", ingest.venues, "venue_id,name,lat,lon,category CSV")->required();
    c_ingest->add_option("--follows", ingest.follows, "follower_id,followee_id CSV")->required();
    c_ingest->add_option("--out", ingest.out, "dataset JSON to write")->required();

    BuildNetworkArgs build;
    auto* c_build = app.add_subcommand("build-network", "Write the reciprocal-follow, shared-venue network");
    c_build->add_option("--dataset", build.dataset)->required();
    c_build->add_option("--out", build.out, "edge list to write")->required();
    c_build->add_flag("--all-users", build.all_users, "keep users without ties");

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "Run the generative model on a dataset");
    c_gen->add_option("--dataset", gen.dataset)->required();
    c_gen->add_option("--config", gen.config, "generator config JSON; flags override it");
    c_gen->add_option("--out", gen.out, "output directory")->required();
    c_gen->add_option("--ablate", gen.ablate, "disable a mechanism (repeatable)")
        ->check(CLI::IsMember({"distance", "categories", "closure"}))
        ->take_all();
    c_gen->add_option("--seed", gen.seed);
    c_gen->add_option("--runs", gen.runs, "independent runs with seeds seed, seed+1, ...")->check(CLI::PositiveNumber);
    c_gen->add_option("--threads", gen.threads);
    c_gen->add_flag("--metrics", gen.metrics, "also write metrics.json for a single run");

    AnalyzeArgs an;
    auto* c_an = app.add_subcommand("analyze", "Write the metric report and distribution CSVs for a network");
    c_an->add_option("--graph", an.graph, "edge list")->required();
    c_an->add_option("--dataset", an.dataset);
    c_an->add_option("--assignment", an.assignment, "model assignment CSV used instead of check-ins");
    c_an->add_option("--out", an.out, "output directory")->required();
    c_an->add_option("--seed", an.seed, "seed for Louvain, path sampling and the random baseline");
    c_an->add_option("--threads", an.threads);
    c_an->add_flag("--event-colocation", an.event_mode, "count colocation events instead of distinct pairs");
    c_an->add_flag("--no-baseline", an.no_baseline);

    SynthArgs syn;
    auto* c_syn = app.add_subcommand("synth", "Write a synthetic city dataset");
    c_syn->add_option("--users", syn.params.n_users)->check(CLI::PositiveNumber);
    c_syn->add_option("--venues", syn.params.n_venues)->check(CLI::PositiveNumber);
    c_syn->add_option("--exponent", syn.params.popularity_exponent, "popularity power-law exponent");
    c_syn->add_option("--span-km", syn.params.span_km);
    c_syn->add_option("--max-checkins", syn.params.max_checkins_per_visit, "check-ins per visited venue are uniform on 1..N")
        ->check(CLI::PositiveNumber);
    c_syn->add_option("--seed", syn.params.seed)->required();
    c_syn->add_option("--out", syn.out, "dataset JSON to write")->required();

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Popularity and span comparison between check-ins and a model assignment");
    c_cmp->add_option("--dataset", cmp.dataset)->required();
    c_cmp->add_option("--assignment", cmp.assignment)->required();
    c_cmp->add_option("--out", cmp.out, "output directory")->required();
    c_cmp->add_option("--bin-width", cmp.bin_width, "span histogram bin width in km");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help exits 0; every usage error maps to the invalid-input status
        return app.exit(e, out, err) == 0 ? kOk : kInvalid;
    }

    try {
        if (*c_ingest) return cmd_ingest(ingest, out);
        if (*c_build) return cmd_build_network(build, out);
        if (*c_gen) return cmd_generate(gen, out);
        if (*c_an) return cmd_analyze(an, out);
        if (*c_syn) return cmd_synth(syn, out);
        if (*c_cmp) return cmd_compare(cmp, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kCannotOpen;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    }
    return kInvalid;
}

}  // namespace citynet::cli
