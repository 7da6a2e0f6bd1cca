#include "netr/cli.hpp"

#include "netr/bench.hpp"
#include "netr/csv.hpp"
#include "netr/errors.hpp"
#include "netr/persist.hpp"
#include "netr/synth.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace netr {

namespace fs = std::filesystem;

namespace {

struct BuildOptions {
    fs::path objects;
    fs::path checkins;
    fs::path friends;
    fs::path out;
    BuildParams params;
};

struct QueryOptions {
    fs::path index;
    std::string user;
    double lat = 0.0;
    double lon = 0.0;
    std::string keywords;
    std::string time;
    int k = 5;
    ScoreWeights weights;
    std::string mode = "netr";
    bool oracle = false;
    bool explain = false;
};

struct GenOptions {
    fs::path out;
    SynthParams synth;
};

struct BenchCliOptions {
    fs::path index;
    fs::path queries;
    std::string modes = "netr";
    std::string sweep;
    fs::path report;
    std::uint64_t seed = 1;
};

// Runs one build stage, prefixing any error with the stage name.
template <class Fn>
auto stage(const char* name, Fn&& fn) {
    const auto tag = [name](const std::exception& e) { return std::string(name) + ": " + e.what(); };
    try {
        return fn();
    } catch (const UsageError& e) {
        throw UsageError(tag(e));
    } catch (const DataError& e) {
        throw DataError(tag(e));
    } catch (const InvariantError& e) {
        throw InvariantError(tag(e));
    } catch (const fs::filesystem_error& e) {
        throw DataError(tag(e));
    }
}

int cmdBuild(const BuildOptions& o, std::ostream& out) {
    const bool existed = fs::exists(o.out);
    try {
        Dataset data = stage("ingest", [&] { return ingest(o.objects, o.checkins, o.friends, o.params.intervalCount); });
        const NetrIndex index = stage("index", [&] { return buildIndex(std::move(data), o.params); });
        stage("persist", [&] {
            const std::map<std::string, std::string> inputs{{"objects", fileHash(o.objects)},
                                                            {"checkins", fileHash(o.checkins)},
                                                            {"friends", fileHash(o.friends)}};
            const ScoreWeights w;
            const nlohmann::json defaults{{"k", 5},          {"alpha", w.alpha}, {"beta", w.beta},
                                          {"gamma", w.gamma}, {"theta", w.theta}, {"radius_km", w.deltaMaxKm}};
            saveIndex(index, o.out, inputs, defaults);
        });
        fmt::print(out, "index written to {} ({} objects, {} users, {} nodes)\n", o.out.string(),
                   index.corpus.objects.size(), index.users.size(), index.tree.size());
        return kExitOk;
    } catch (...) {
        std::error_code ec;
        if (!existed) {
            fs::remove_all(o.out, ec);
        } else {
            for (const char* name :
                 {"manifest.json", "objects.json", "tree.json", "embeddings.bin", "neighbors.json", "blocks.json"}) {
                fs::remove(o.out / name, ec);
            }
        }
        throw;
    }
}

bool sameEntries(const RankedResult& a, const RankedResult& b) {
    if (a.entries.size() != b.entries.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        if (a.entries[i].object != b.entries[i].object) {
            return false;
        }
    }
    return true;
}

int cmdQuery(const QueryOptions& o, std::ostream& out) {
    const auto time = parseIsoLocal(o.time);
    if (!time) {
        throw UsageError("--time: not an ISO-8601 local date-time: '" + o.time + "'");
    }
    Query q;
    q.user = o.user;
    q.location = {o.lat, o.lon};
    for (auto& w : splitOn(o.keywords, '|')) {
        if (!w.empty()) {
            q.keywords.push_back(std::move(w));
        }
    }
    q.time = *time;
    q.k = o.k;
    q.weights = o.weights;
    const EngineMode mode = parseMode(o.mode);

    const NetrIndex index = loadIndex(o.index);
    const RankedResult result = runQuery(index, q, mode);

    fmt::print(out, "rank,object_id,total,fg,fk,ft,fs\n");
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        const auto& e = result.entries[i];
        const auto& s = e.score;
        fmt::print(out, "{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", i + 1,
                   index.corpus.objects[static_cast<std::size_t>(e.object)].id, s.total, s.fg, s.fk, s.ft, s.fs);
    }
    if (o.explain) {
        const QueryScorer scorer(index, q);
        const auto user = index.findUser(q.user);
        const QueryTerms terms = resolveTerms(index.corpus, q.keywords);
        fmt::print(out, "# mode: {}\n", modeName(mode));
        fmt::print(out, "# interval: {} of {}\n", scorer.interval(), index.corpus.intervalCount);
        fmt::print(out, "# keywords: {} given, {} in vocabulary\n", terms.size, terms.known.size());
        fmt::print(out, "# neighbours: {}\n", index.social.neighbors[static_cast<std::size_t>(*user)].size());
        fmt::print(out, "# node accesses: {} of {}\n", result.stats.nodeAccesses, index.tree.size());
        fmt::print(out, "# candidates scored: {}\n", result.stats.candidatesScored);
        fmt::print(out, "# nodes skipped by time bound: {}\n", result.stats.temporallySkipped.size());
        fmt::print(out, "# elapsed: {:.3f} ms\n", result.stats.elapsedMs);
    }
    if (o.oracle) {
        const bool match = sameEntries(result, bruteForceTopK(index, q));
        fmt::print(out, "oracle: {}\n", match ? "MATCH" : "MISMATCH");
        if (!match) {
            return kExitInvariant;
        }
    }
    return kExitOk;
}

int cmdGen(const GenOptions& o, std::ostream& out) {
    const SynthData data = generateSynthetic(o.synth);
    writeSynthetic(o.out, data);
    fmt::print(out, "wrote {} objects, {} users, {} check-ins, {} friendships, {} queries to {}\n",
               data.objects.size(), o.synth.users, data.checkins.size(), data.friends.size(), data.queries.size(),
               o.out.string());
    return kExitOk;
}

int cmdBench(const BenchCliOptions& o, std::ostream& out) {
    BenchOptions options;
    options.modes = parseModes(o.modes);
    if (!o.sweep.empty()) {
        options.sweep = parseSweep(o.sweep);
    }
    options.seed = o.seed;
    const NetrIndex index = loadIndex(o.index);
    const auto queries = readQueries(o.queries);
    const auto rows = runBench(index, queries, options);
    if (o.report.empty()) {
        writeBenchCsv(out, rows);
    } else {
        std::ofstream file(o.report);
        writeBenchCsv(file, rows);
        if (!file) {
            throw DataError("failed writing " + o.report.string());
        }
        for (const auto& r : rows) {
            if (r.aggregate) {
                fmt::print(out, "{} {} {}: mean {:.3f} ms, {:.1f} node accesses, {:.1f} returned\n", r.sweepParam,
                           r.sweepValue, modeName(r.mode), r.elapsedMs, r.nodeAccesses, r.returned);
            }
        }
    }
    return kExitOk;
}

void setupLogging(const std::string& level) {
    spdlog::set_default_logger(
        std::make_shared<spdlog::logger>("netr", std::make_shared<spdlog::sinks::stderr_sink_st>()));
    spdlog::set_level(spdlog::level::from_str(level));
    spdlog::set_pattern("[%l] %v");
}

} // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"NETR-tree spatial keyword query engine"};
    app.require_subcommand(1);
    std::string logLevel = "info";
    app.add_option("--log-level", logLevel, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    BuildOptions build;
    auto* b = app.add_subcommand("build", "Build an index directory from CSV inputs");
    b->add_option("--objects", build.objects, "objects CSV")->required()->check(CLI::ExistingFile);
    b->add_option("--checkins", build.checkins, "check-ins CSV")->required()->check(CLI::ExistingFile);
    b->add_option("--friends", build.friends, "friendships CSV")->required()->check(CLI::ExistingFile);
    b->add_option("--out", build.out, "output index directory")->required();
    b->add_option("--intervals", build.params.intervalCount, "time intervals per day")
        ->capture_default_str()
        ->check(CLI::Range(1, 24));
    b->add_option("--dim", build.params.social.line.dim, "embedding dimension")->capture_default_str()->check(CLI::Range(2, 4096));
    b->add_option("--epochs", build.params.social.line.epochs, "edge samples per edge")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--fanout", build.params.fanout, "maximum node fanout")->capture_default_str()->check(CLI::Range(2, 1 << 16));
    b->add_option("--eps-km", build.params.social.dbscan.epsKm, "clustering distance")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--eps-hours", build.params.social.dbscan.epsHours, "clustering hour window")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--min-pts", build.params.social.dbscan.minPts, "clustering density")->capture_default_str()->check(CLI::PositiveNumber);
    b->add_option("--min-checkins", build.params.social.minCheckins, "skyline candidate threshold")->capture_default_str()->check(CLI::NonNegativeNumber);
    b->add_option("--seed", build.params.social.line.seed, "embedding seed")->capture_default_str();

    QueryOptions query;
    auto* q = app.add_subcommand("query", "Run one top-k query against an index");
    q->add_option("--index", query.index, "index directory")->required()->check(CLI::ExistingDirectory);
    q->add_option("--user", query.user, "querying user id")->required();
    q->add_option("--lat", query.lat, "query latitude")->required();
    q->add_option("--lon", query.lon, "query longitude")->required();
    q->add_option("--keywords", query.keywords, "'|'-separated keywords")->required();
    q->add_option("--time", query.time, "ISO-8601 local time")->required();
    q->add_option("--k", query.k, "result size")->capture_default_str();
    q->add_option("--radius", query.weights.deltaMaxKm, "search radius in km")->capture_default_str();
    q->add_option("--alpha", query.weights.alpha, "geo-spatial weight")->capture_default_str();
    q->add_option("--beta", query.weights.beta, "keyword weight")->capture_default_str();
    q->add_option("--gamma", query.weights.gamma, "social weight")->capture_default_str();
    q->add_option("--theta", query.weights.theta, "entropy share of the geo-spatial score")->capture_default_str();
    q->add_option("--mode", query.mode, "netr or baseline-ir")->capture_default_str();
    q->add_flag("--oracle", query.oracle, "compare against the brute-force ranking");
    q->add_flag("--explain", query.explain, "print query resolution and search statistics");

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "Generate a synthetic dataset and query batch");
    g->add_option("--out", gen.out, "output directory")->required();
    g->add_option("--objects", gen.synth.objects, "number of objects")->capture_default_str()->check(CLI::PositiveNumber);
    g->add_option("--users", gen.synth.users, "number of users")->capture_default_str()->check(CLI::PositiveNumber);
    g->add_option("--checkins-per-user", gen.synth.checkinsPerUser, "mean check-ins per user")->capture_default_str()->check(CLI::PositiveNumber);
    g->add_option("--queries", gen.synth.queries, "number of queries")->capture_default_str()->check(CLI::NonNegativeNumber);
    g->add_option("--seed", gen.synth.seed, "generator seed")->capture_default_str();

    BenchCliOptions bench;
    auto* be = app.add_subcommand("bench", "Run a query batch and write a CSV report");
    be->add_option("--index", bench.index, "index directory")->required()->check(CLI::ExistingDirectory);
    be->add_option("--queries", bench.queries, "query batch CSV")->required()->check(CLI::ExistingFile);
    be->add_option("--mode", bench.modes, "comma-separated modes")->capture_default_str();
    be->add_option("--sweep", bench.sweep, "k, qw, radius or gamma")->check(CLI::IsMember({"k", "qw", "radius", "gamma"}));
    be->add_option("--report", bench.report, "CSV report path (stdout when omitted)");
    be->add_option("--seed", bench.seed, "seed for keyword padding in the qw sweep")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        setupLogging(logLevel);
        if (*b) {
            return cmdBuild(build, out);
        }
        if (*q) {
            return cmdQuery(query, out);
        }
        if (*g) {
            return cmdGen(gen, out);
        }
        return cmdBench(bench, out);
    } catch (const UsageError& e) {
        fmt::print(err, "usage error: {}\n", e.what());
        return kExitUsage;
    } catch (const DataError& e) {
        fmt::print(err, "data error: {}\n", e.what());
        return kExitData;
    } catch (const InvariantError& e) {
        fmt::print(err, "invariant violation: {}\n", e.what());
        return kExitInvariant;
    } catch (const fs::filesystem_error& e) {
        fmt::print(err, "data error: {}\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        fmt::print(err, "internal error: {}\n", e.what());
        return kExitInvariant;
    }
}

} // namespace netr
