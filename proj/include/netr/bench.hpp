#pragma once

#include "netr/query.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace netr {

/// One line of a query batch file: `user_id,lat,lon,keywords,timestamp,k`.
struct QueryRow {
    std::string user;
    GeoPoint location;
    std::vector<std::string> keywords;
    LocalDateTime time;
    int k = 5;
};

std::vector<QueryRow> readQueries(const std::filesystem::path& file);
void writeQueries(const std::filesystem::path& file, const std::vector<QueryRow>& rows);

Query toQuery(const QueryRow& row, const ScoreWeights& weights = {});

enum class EngineMode { Netr, BaselineIr };

std::string_view modeName(EngineMode mode);
/// Parses one mode name ("netr" or "baseline-ir").
EngineMode parseMode(std::string_view name);
/// Parses a comma-separated list of mode names.
std::vector<EngineMode> parseModes(std::string_view list);

RankedResult runQuery(const NetrIndex& index, const Query& query, EngineMode mode);

enum class SweepParam { K, QueryWords, Radius, Gamma };

std::string_view sweepName(SweepParam p);
SweepParam parseSweep(std::string_view name);
/// The values a sweep walks through.
std::vector<double> sweepValues(SweepParam p);

/// Queries for one sweep setting. Parameters other than the swept one take
/// their bench defaults (k 5, five keywords, radius 12 km, gamma 0.3); keyword
/// lists are truncated or padded from the vocabulary with a per-row seed.
std::vector<Query> sweepQueries(const NetrIndex& index, const std::vector<QueryRow>& queries, SweepParam p,
                                double value, std::uint64_t seed = 1);

struct BenchOptions {
    std::vector<EngineMode> modes{EngineMode::Netr};
    std::optional<SweepParam> sweep;
    std::uint64_t seed = 1; ///< pads keyword lists for the qw sweep
};

struct BenchRow {
    bool aggregate = false;
    std::string sweepParam = "none";
    std::string sweepValue; ///< empty when no sweep is active
    EngineMode mode = EngineMode::Netr;
    std::string queryId;    ///< 0-based row number; "mean" for aggregates
    double elapsedMs = 0.0;
    double nodeAccesses = 0.0;
    double candidatesScored = 0.0;
    double returned = 0.0;
};

/// Runs every query once per (sweep value, mode). Per-query rows come first
/// in (sweep value, mode, query) order, followed by one mean row per
/// (sweep value, mode) group.
///
/// Without a sweep each query keeps its own k and default weights. Under a
/// sweep the swept parameter takes each value in turn while the others sit
/// at k = 5, five keywords, 12 km and gamma = 0.3. Keyword lists are cut to
/// the first n words or padded with seeded draws from the vocabulary.
std::vector<BenchRow> runBench(const NetrIndex& index, const std::vector<QueryRow>& queries,
                               const BenchOptions& options);

inline constexpr const char* kBenchHeader =
    "row_type,sweep_param,sweep_value,mode,query_id,elapsed_ms,node_accesses,candidates_scored,returned";

void writeBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows);

} // namespace netr
