#include "support.hpp"

#include "netr/bench.hpp"
#include "netr/cli.hpp"
#include "netr/csv.hpp"
#include "netr/errors.hpp"
#include "netr/persist.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

using namespace netr;
using namespace netr::test;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), {"netr", "--log-level", "off"});
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = runCli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

// A generated dataset plus a built index, shared by the CLI cases.
const fs::path& builtIndex() {
    static const fs::path dir = [] {
        const auto d = scratchDir("cli-index");
        REQUIRE(cli({"gen", "--out", (d / "data").string(), "--objects", "300", "--users", "60", "--queries", "20",
                     "--seed", "5"})
                    .code == 0);
        REQUIRE(cli({"build", "--objects", (d / "data/objects.csv").string(), "--checkins",
                     (d / "data/checkins.csv").string(), "--friends", (d / "data/friends.csv").string(), "--out",
                     (d / "index").string(), "--fanout", "8", "--epochs", "20"})
                    .code == 0);
        return d;
    }();
    return dir;
}

std::vector<std::string> firstQueryArgs(const fs::path& dir) {
    const auto rows = readQueries(dir / "data/queries.csv");
    const auto& r = rows.front();
    std::string kw;
    for (const auto& w : r.keywords) {
        kw += (kw.empty() ? "" : "|") + w;
    }
    return {"query",  "--index", (dir / "index").string(), "--user", r.user, "--lat", std::to_string(r.location.lat),
            "--lon",  std::to_string(r.location.lon), "--keywords", kw, "--time", formatIso(r.time)};
}

} // namespace

TEST_CASE("save and load reproduce the index exactly") {
    const auto& f = synthetic();
    const auto dir = scratchDir("roundtrip");
    saveIndex(f.index, dir);
    const NetrIndex loaded = loadIndex(dir);

    CHECK(loaded.users == f.index.users);
    CHECK(loaded.corpus.phiMax == f.index.corpus.phiMax);
    REQUIRE(loaded.corpus.objects.size() == f.index.corpus.objects.size());
    for (std::size_t i = 0; i < loaded.corpus.objects.size(); ++i) {
        const auto& a = loaded.corpus.objects[i];
        const auto& b = f.index.corpus.objects[i];
        CHECK(a.location == b.location);
        CHECK(a.keywords == b.keywords);
        CHECK(a.timeDist.prob == b.timeDist.prob);
    }
    REQUIRE(loaded.tree.size() == f.index.tree.size());
    for (std::size_t i = 0; i < loaded.tree.size(); ++i) {
        const auto& a = loaded.tree.nodes[i];
        const auto& b = f.index.tree.nodes[i];
        CHECK(a.mbr == b.mbr);
        CHECK(a.entropyBound == b.entropyBound);
        CHECK(a.timeBound == b.timeBound);
        CHECK(a.keywordSummary == b.keywordSummary);
        CHECK(a.children == b.children);
    }
    CHECK(loaded.social.embeddings == f.index.social.embeddings);
    CHECK(loaded.social.neighbors == f.index.social.neighbors);
    for (std::size_t u = 0; u < loaded.users.size(); ++u) {
        CHECK(loaded.social.blocks[u].objectCounts == f.index.social.blocks[u].objectCounts);
        CHECK(loaded.social.blocks[u].nodeCounts == f.index.social.blocks[u].nodeCounts);
    }
    for (const auto& row : f.data.queries) {
        const auto a = topK(f.index, toQuery(row));
        const auto b = topK(loaded, toQuery(row));
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].object == b.entries[i].object);
            CHECK(a.entries[i].score.total == b.entries[i].score.total);
        }
    }
}

TEST_CASE("corrupted bundles are rejected") {
    const auto& f = synthetic();
    const auto dir = scratchDir("corrupt");
    saveIndex(f.index, dir);
    {
        std::ofstream(dir / "neighbors.json", std::ios::app) << " ";
    }
    CHECK_THROWS_WITH_AS(loadIndex(dir), doctest::Contains("neighbors.json"), DataError);
    fs::remove(dir / "tree.json");
    CHECK_THROWS_AS(loadIndex(dir), DataError);
    CHECK_THROWS_AS(loadIndex(dir / "missing"), DataError);
}

TEST_CASE("embedding file format") {
    const auto dir = scratchDir("emb");
    EmbeddingMatrix m(3, 2);
    m << 0.1, -2.5e-300, 1.0 / 3.0, 7, -0.0, 1e308;
    writeEmbeddings(dir / "e.bin", m);
    const std::string bytes = slurp(dir / "e.bin");
    CHECK(bytes.size() == 16 + 3 * 2 * 8);
    CHECK(bytes.substr(0, 4) == "NEMB");
    CHECK(bytes[4] == 1);
    CHECK(bytes[8] == 3);
    CHECK(bytes[12] == 2);
    const EmbeddingMatrix back = readEmbeddings(dir / "e.bin");
    CHECK(back == m);
    CHECK(std::signbit(back(2, 0)));
    std::ofstream(dir / "bad.bin") << "NOPE0000000000000000";
    CHECK_THROWS_AS(readEmbeddings(dir / "bad.bin"), DataError);
}

TEST_CASE("gen is deterministic and honours the sizes") {
    const auto a = scratchDir("gen-a");
    const auto b = scratchDir("gen-b");
    REQUIRE(cli({"gen", "--out", a.string(), "--objects", "1000", "--users", "200", "--seed", "9"}).code == 0);
    REQUIRE(cli({"gen", "--out", b.string(), "--objects", "1000", "--users", "200", "--seed", "9"}).code == 0);
    for (const char* name : {"objects.csv", "checkins.csv", "friends.csv", "queries.csv"}) {
        CHECK(slurp(a / name) == slurp(b / name));
    }
    const Dataset d = ingest(a / "objects.csv", a / "checkins.csv", a / "friends.csv");
    CHECK(d.corpus.objects.size() == 1000);
    CHECK(d.users.size() == 200);
}

TEST_CASE("generated bar check-ins peak in the evening") {
    SynthParams p;
    p.seed = 4;
    const SynthData data = generateSynthetic(p);
    std::map<std::string, std::string> category;
    for (const auto& o : data.objects) {
        category[o.id] = o.category;
    }
    std::array<int, 24> histogram{};
    for (const auto& c : data.checkins) {
        if (category[c.object] == "bar") {
            ++histogram[static_cast<std::size_t>(c.time.hour)];
        }
    }
    const auto mode = std::max_element(histogram.begin(), histogram.end()) - histogram.begin();
    CHECK(mode >= 18);
    CHECK(mode <= 23);
    CHECK(std::accumulate(histogram.begin(), histogram.end(), 0) > 0);
}

TEST_CASE("build is deterministic and validates its inputs") {
    const auto& dir = builtIndex();
    const auto again = scratchDir("cli-index-again");
    REQUIRE(cli({"build", "--objects", (dir / "data/objects.csv").string(), "--checkins",
                 (dir / "data/checkins.csv").string(), "--friends", (dir / "data/friends.csv").string(), "--out",
                 (again / "index").string(), "--fanout", "8", "--epochs", "20"})
                .code == 0);
    CHECK(slurp(dir / "index/manifest.json") == slurp(again / "index/manifest.json"));
    const auto manifest = readManifest(dir / "index");
    CHECK(manifest["parameters"]["fanout"] == 8);
    CHECK(manifest["parameters"]["intervals"] == 24);
    CHECK(manifest["inputs"]["objects"] == fileHash(dir / "data/objects.csv"));

    const auto missing = cli({"build", "--objects", (dir / "data/objects.csv").string(), "--checkins",
                              (dir / "data/checkins.csv").string(), "--friends", (dir / "nope.csv").string(), "--out",
                              (again / "x").string()});
    CHECK(missing.code == kExitUsage);
    CHECK(missing.err.find("--friends") != std::string::npos);
    CHECK_FALSE(fs::exists(again / "x"));
}

TEST_CASE("failed builds remove partial output") {
    const auto dir = scratchDir("cli-bad-build");
    std::ofstream(dir / "objects.csv") << "id,lat,lon,category,keywords\n1,40,-73,bar,x\n";
    std::ofstream(dir / "checkins.csv") << "user_id,object_id,timestamp\nu,2,2020-01-01T10:00:00\n";
    std::ofstream(dir / "friends.csv") << "user_a,user_b\n";
    const auto r = cli({"build", "--objects", (dir / "objects.csv").string(), "--checkins",
                        (dir / "checkins.csv").string(), "--friends", (dir / "friends.csv").string(), "--out",
                        (dir / "out").string()});
    CHECK(r.code == kExitData);
    CHECK(r.err.find("ingest:") != std::string::npos);
    CHECK(r.err.find("'2'") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("query command") {
    const auto& dir = builtIndex();
    auto args = firstQueryArgs(dir);
    args.insert(args.end(), {"--oracle", "--explain"});
    const auto r = cli(args);
    REQUIRE(r.code == 0);
    const auto out = lines(r.out);
    CHECK(out.front() == "rank,object_id,total,fg,fk,ft,fs");
    CHECK(out.back() == "oracle: MATCH");
    CHECK(r.out.find("# node accesses:") != std::string::npos);

    auto baseline = firstQueryArgs(dir);
    baseline.insert(baseline.end(), {"--mode", "baseline-ir", "--oracle"});
    CHECK(lines(cli(baseline).out).back() == "oracle: MATCH");

    auto absent = firstQueryArgs(dir);
    absent[10] = "nosuchword|another";
    const auto noMatch = cli(absent);
    REQUIRE(noMatch.code == 0);
    for (std::size_t i = 1; i < lines(noMatch.out).size(); ++i) {
        CHECK(splitCsvLine(lines(noMatch.out)[i])[4] == "0.000000");
    }

    auto unknownUser = firstQueryArgs(dir);
    unknownUser[4] = "no-such-user";
    CHECK(cli(unknownUser).code == kExitUsage);
    auto badTime = firstQueryArgs(dir);
    badTime[12] = "noon";
    CHECK(cli(badTime).code == kExitUsage);
    auto badMode = firstQueryArgs(dir);
    badMode.insert(badMode.end(), {"--mode", "fast"});
    CHECK(cli(badMode).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
}

TEST_CASE("single-object index answers k = 1") {
    const auto dir = scratchDir("cli-single");
    std::ofstream(dir / "objects.csv") << "id,lat,lon,category,keywords\nonly,40.7,-73.9,bar,beer\n";
    std::ofstream(dir / "checkins.csv") << "user_id,object_id,timestamp\nu1,only,2020-01-01T21:00:00\n";
    std::ofstream(dir / "friends.csv") << "user_a,user_b\nu1,u2\n";
    REQUIRE(cli({"build", "--objects", (dir / "objects.csv").string(), "--checkins", (dir / "checkins.csv").string(),
                 "--friends", (dir / "friends.csv").string(), "--out", (dir / "index").string()})
                .code == 0);
    const auto r = cli({"query", "--index", (dir / "index").string(), "--user", "u2", "--lat", "40.7", "--lon", "-73.9",
                        "--keywords", "beer", "--time", "2021-06-01T21:30:00", "--k", "1", "--oracle"});
    REQUIRE(r.code == 0);
    const auto out = lines(r.out);
    REQUIRE(out.size() == 3);
    CHECK(out[1].rfind("1,only,", 0) == 0);
}

TEST_CASE("a tampered bundle is a data error") {
    const auto dir = scratchDir("cli-tamper");
    fs::copy(builtIndex() / "index", dir / "index");
    std::ofstream(dir / "index/blocks.json", std::ios::app) << "\n";
    auto args = firstQueryArgs(builtIndex());
    args[2] = (dir / "index").string();
    CHECK(cli(args).code == kExitData);
}

TEST_CASE("bench report") {
    const auto& dir = builtIndex();
    const auto report = dir / "bench.csv";
    REQUIRE(cli({"bench", "--index", (dir / "index").string(), "--queries", (dir / "data/queries.csv").string(),
                 "--mode", "netr,baseline-ir", "--report", report.string()})
                .code == 0);
    const auto rows = lines(slurp(report));
    REQUIRE(!rows.empty());
    CHECK(rows[0] == "row_type,sweep_param,sweep_value,mode,query_id,elapsed_ms,node_accesses,candidates_scored,"
                     "returned");
    CHECK(rows.size() == 1 + 2 * 20 + 2);

    // Aggregate means equal the recomputed means of the query rows.
    std::map<std::string, std::array<double, 3>> sums;
    std::map<std::string, int> counts;
    std::map<std::string, std::array<double, 3>> means;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = splitCsvLine(rows[i]);
        REQUIRE(f.size() == 9);
        const std::array<double, 3> v{std::stod(f[5]), std::stod(f[6]), std::stod(f[8])};
        if (f[0] == "query") {
            for (int j = 0; j < 3; ++j) {
                sums[f[3]][j] += v[j];
            }
            ++counts[f[3]];
        } else {
            CHECK(f[0] == "aggregate");
            means[f[3]] = v;
        }
    }
    CHECK(means.size() == 2);
    for (const auto& [mode, mean] : means) {
        for (int j = 0; j < 3; ++j) {
            CHECK(mean[j] == doctest::Approx(sums[mode][j] / counts[mode]).epsilon(1e-12));
        }
    }

    const auto swept = cli({"bench", "--index", (dir / "index").string(), "--queries",
                            (dir / "data/queries.csv").string(), "--mode", "netr", "--sweep", "k"});
    REQUIRE(swept.code == 0);
    std::set<std::string> groups;
    for (const auto& line : lines(swept.out)) {
        const auto f = splitCsvLine(line);
        if (f[0] == "aggregate") {
            CHECK(f[1] == "k");
            groups.insert(f[2]);
        }
    }
    CHECK(groups == std::set<std::string>{"1", "3", "5", "7", "9"});
    CHECK(cli({"bench", "--index", (dir / "index").string(), "--queries", (dir / "data/queries.csv").string(),
               "--sweep", "colour"})
              .code == kExitUsage);
}

TEST_CASE("qw sweep pads and trims keyword lists deterministically") {
    const auto& f = synthetic();
    std::vector<QueryRow> rows(f.data.queries.begin(), f.data.queries.begin() + 5);
    BenchOptions o;
    o.sweep = SweepParam::QueryWords;
    const auto a = runBench(f.index, rows, o);
    const auto b = runBench(f.index, rows, o);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == 5 * 5 + 5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].returned == b[i].returned);
        CHECK(a[i].nodeAccesses == b[i].nodeAccesses);
    }
}
