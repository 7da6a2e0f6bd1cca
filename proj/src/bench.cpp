#include "netr/bench.hpp"

#include "netr/csv.hpp"
#include "netr/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>

namespace netr {

namespace {

template <class T>
T parseNumber(const CsvReader& csv, std::string_view field, const std::string& text) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        csv.fail(field, "not a number: '" + text + "'");
    }
    return value;
}

std::string joinKeywords(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) {
            out += '|';
        }
        out += w;
    }
    return out;
}

std::string formatValue(SweepParam p, double v) {
    return p == SweepParam::Gamma ? fmt::format("{:.1f}", v) : fmt::format("{}", static_cast<int>(v));
}

// Keyword list of exactly n words: the first n of the row, then distinct
// vocabulary draws from a generator seeded per query.
std::vector<std::string> resizeKeywords(const std::vector<std::string>& words, std::size_t n,
                                        const std::vector<std::string>& vocabulary, std::uint64_t seed) {
    std::vector<std::string> out(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(std::min(n, words.size())));
    std::set<std::string> seen(out.begin(), out.end());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary.empty() ? 0 : vocabulary.size() - 1);
    while (out.size() < n && !vocabulary.empty() && seen.size() < vocabulary.size()) {
        const auto& w = vocabulary[pick(rng)];
        if (seen.insert(w).second) {
            out.push_back(w);
        }
    }
    return out;
}

} // namespace

std::vector<QueryRow> readQueries(const std::filesystem::path& file) {
    CsvReader csv(file, {"user_id", "lat", "lon", "keywords", "timestamp", "k"});
    std::vector<QueryRow> rows;
    std::vector<std::string> f;
    while (csv.next(f)) {
        QueryRow row;
        row.user = f[0];
        row.location = {parseNumber<double>(csv, "lat", f[1]), parseNumber<double>(csv, "lon", f[2])};
        if (!isValid(row.location)) {
            csv.fail("lat", "location out of range");
        }
        for (auto& w : splitOn(f[3], '|')) {
            if (!w.empty()) {
                row.keywords.push_back(std::move(w));
            }
        }
        if (row.keywords.empty()) {
            csv.fail("keywords", "no keywords");
        }
        const auto t = parseIsoLocal(f[4]);
        if (!t) {
            csv.fail("timestamp", "not an ISO-8601 local date-time: '" + f[4] + "'");
        }
        row.time = *t;
        row.k = parseNumber<int>(csv, "k", f[5]);
        if (row.k < 1) {
            csv.fail("k", "must be >= 1");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void writeQueries(const std::filesystem::path& file, const std::vector<QueryRow>& rows) {
    std::ofstream out(file);
    out << "user_id,lat,lon,keywords,timestamp,k\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{}\n", csvEscape(r.user), r.location.lat, r.location.lon,
                           csvEscape(joinKeywords(r.keywords)), formatIso(r.time), r.k);
    }
    if (!out) {
        throw DataError("failed writing " + file.string());
    }
}

Query toQuery(const QueryRow& row, const ScoreWeights& weights) {
    return {row.user, row.location, row.keywords, row.time, row.k, weights};
}

std::string_view modeName(EngineMode mode) { return mode == EngineMode::Netr ? "netr" : "baseline-ir"; }

EngineMode parseMode(std::string_view name) {
    if (name == "netr") {
        return EngineMode::Netr;
    }
    if (name == "baseline-ir") {
        return EngineMode::BaselineIr;
    }
    throw UsageError("unknown mode '" + std::string(name) + "' (expected netr or baseline-ir)");
}

std::vector<EngineMode> parseModes(std::string_view list) {
    std::vector<EngineMode> modes;
    for (const auto& name : splitOn(list, ',')) {
        const EngineMode m = parseMode(name);
        if (std::find(modes.begin(), modes.end(), m) == modes.end()) {
            modes.push_back(m);
        }
    }
    return modes;
}

RankedResult runQuery(const NetrIndex& index, const Query& query, EngineMode mode) {
    return mode == EngineMode::Netr ? topK(index, query) : topKBaselineIr(index, query);
}

std::string_view sweepName(SweepParam p) {
    switch (p) {
    case SweepParam::K:
        return "k";
    case SweepParam::QueryWords:
        return "qw";
    case SweepParam::Radius:
        return "radius";
    case SweepParam::Gamma:
        return "gamma";
    }
    return "";
}

SweepParam parseSweep(std::string_view name) {
    for (const auto p : {SweepParam::K, SweepParam::QueryWords, SweepParam::Radius, SweepParam::Gamma}) {
        if (sweepName(p) == name) {
            return p;
        }
    }
    throw UsageError("unknown sweep '" + std::string(name) + "' (expected k, qw, radius or gamma)");
}

std::vector<double> sweepValues(SweepParam p) {
    switch (p) {
    case SweepParam::K:
    case SweepParam::QueryWords:
        return {1, 3, 5, 7, 9};
    case SweepParam::Radius:
        return {4, 8, 12, 16, 20};
    case SweepParam::Gamma:
        return {0.1, 0.2, 0.3, 0.4, 0.5};
    }
    return {};
}

std::vector<Query> sweepQueries(const NetrIndex& index, const std::vector<QueryRow>& queries, SweepParam p,
                                double value, std::uint64_t seed) {
    std::vector<Query> out;
    out.reserve(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        Query q = toQuery(queries[i]);
        q.k = p == SweepParam::K ? static_cast<int>(value) : 5;
        const std::size_t words = p == SweepParam::QueryWords ? static_cast<std::size_t>(value) : 5;
        q.keywords = resizeKeywords(queries[i].keywords, words, index.corpus.vocabulary, seed + i);
        if (p == SweepParam::Radius) {
            q.weights.deltaMaxKm = value;
        }
        if (p == SweepParam::Gamma) {
            q.weights.gamma = value;
        }
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<BenchRow> runBench(const NetrIndex& index, const std::vector<QueryRow>& queries,
                               const BenchOptions& options) {
    struct Setting {
        std::string value;
        std::vector<Query> queries;
    };
    std::vector<Setting> settings;
    if (!options.sweep) {
        Setting s;
        for (const auto& row : queries) {
            s.queries.push_back(toQuery(row));
        }
        settings.push_back(std::move(s));
    } else {
        for (const double v : sweepValues(*options.sweep)) {
            settings.push_back({formatValue(*options.sweep, v), sweepQueries(index, queries, *options.sweep, v, options.seed)});
        }
    }

    const std::string param = options.sweep ? std::string(sweepName(*options.sweep)) : "none";
    std::vector<BenchRow> rows;
    std::vector<BenchRow> means;
    for (const auto& s : settings) {
        for (const EngineMode mode : options.modes) {
            BenchRow mean{true, param, s.value, mode, "mean"};
            for (std::size_t i = 0; i < s.queries.size(); ++i) {
                const RankedResult r = runQuery(index, s.queries[i], mode);
                BenchRow row{false,
                             param,
                             s.value,
                             mode,
                             std::to_string(i),
                             r.stats.elapsedMs,
                             static_cast<double>(r.stats.nodeAccesses),
                             static_cast<double>(r.stats.candidatesScored),
                             static_cast<double>(r.entries.size())};
                mean.elapsedMs += row.elapsedMs;
                mean.nodeAccesses += row.nodeAccesses;
                mean.candidatesScored += row.candidatesScored;
                mean.returned += row.returned;
                rows.push_back(std::move(row));
            }
            if (!s.queries.empty()) {
                const auto n = static_cast<double>(s.queries.size());
                mean.elapsedMs /= n;
                mean.nodeAccesses /= n;
                mean.candidatesScored /= n;
                mean.returned /= n;
            }
            means.push_back(std::move(mean));
        }
    }
    rows.insert(rows.end(), means.begin(), means.end());
    return rows;
}

void writeBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << kBenchHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.aggregate ? "aggregate" : "query", r.sweepParam,
                           r.sweepValue, modeName(r.mode), r.queryId, r.elapsedMs, r.nodeAccesses, r.candidatesScored,
                           r.returned);
    }
}

} // namespace netr
