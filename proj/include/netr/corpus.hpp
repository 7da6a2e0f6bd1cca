#pragma once

#include "netr/geo.hpp"
#include "netr/time.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netr {

/// Dense indices. Objects and users are numbered in idLess order of their
/// external ids, terms and categories in lexicographic order.
using ObjectIndex = std::int32_t;
using UserIndex = std::int32_t;
using TermId = std::int32_t;
using CategoryId = std::int32_t;

/// Ordering of external ids: all-digit ids first, compared numerically
/// (then by leading zeros), followed by the rest lexicographically.
bool idLess(std::string_view a, std::string_view b);

struct KeywordWeight {
    TermId term = 0;
    double weight = 0.0;

    friend bool operator==(const KeywordWeight&, const KeywordWeight&) = default;
};

/// Sorted-by-term sparse keyword weights; absent terms weigh 0.
double weightOf(const std::vector<KeywordWeight>& weights, TermId term);

struct SpatialObject {
    std::string id;
    GeoPoint location;
    CategoryId category = 0;
    std::vector<std::pair<TermId, int>> termCounts; ///< raw occurrence counts, sorted by term
    std::vector<KeywordWeight> keywords;             ///< TF-IDF weights, sorted by term
    TimeDistribution timeDist;
    int totalCheckins = 0;
};

struct CheckInRecord {
    UserIndex user = 0;
    ObjectIndex object = 0;
    LocalDateTime time;
};

/// Undirected friendship, stored with a < b.
struct FriendEdge {
    UserIndex a = 0;
    UserIndex b = 0;

    friend auto operator<=>(const FriendEdge&, const FriendEdge&) = default;
};

struct Corpus {
    int intervalCount = kDefaultIntervalCount;
    std::vector<SpatialObject> objects;
    std::vector<std::string> categories;
    std::vector<std::string> vocabulary;
    std::vector<int> docFreq; ///< per TermId
    double phiMax = 0.0;

    std::size_t documentCount() const { return objects.size(); }
    std::optional<TermId> findTerm(std::string_view keyword) const;
    std::optional<ObjectIndex> findObject(std::string_view id) const;
};

/// Everything ingested from the three input files.
struct Dataset {
    Corpus corpus;
    std::vector<std::string> users;
    std::vector<CheckInRecord> checkins; ///< ordered by (object, time, user)
    std::vector<FriendEdge> friends;     ///< canonical, sorted, deduplicated

    std::optional<UserIndex> findUser(std::string_view id) const;
};

// Unresolved rows, as read from files or produced by the generator.
struct RawObject {
    std::string id;
    GeoPoint location;
    std::string category;
    std::vector<std::pair<std::string, int>> keywords;
};

struct RawCheckin {
    std::string user;
    std::string object;
    LocalDateTime time;
};

struct RawFriendship {
    std::string a;
    std::string b;
};

/// Resolves ids, orders everything deterministically and fills each object's
/// time distribution and check-in total. Keyword weights are left empty;
/// run computeTfIdf afterwards. Throws DataError on duplicate or unknown ids
/// and on self-friendships.
Dataset makeDataset(std::vector<RawObject> objects, std::vector<RawCheckin> checkins,
                    std::vector<RawFriendship> friendships, int intervalCount = kDefaultIntervalCount);

/// Reads the objects / check-ins / friends CSV files and calls makeDataset.
/// Malformed rows raise DataError naming file, line and field.
Dataset ingest(const std::filesystem::path& objectsFile, const std::filesystem::path& checkinsFile,
               const std::filesystem::path& friendsFile, int intervalCount = kDefaultIntervalCount);

/// weight(o, w) = tf(o, w) * ln(|O| / df(w)); also sets phiMax.
void computeTfIdf(Corpus& corpus);

/// Writers for the same CSV formats ingest reads.
void writeObjectsCsv(const std::filesystem::path& file, const std::vector<RawObject>& objects);
void writeCheckinsCsv(const std::filesystem::path& file, const std::vector<RawCheckin>& checkins);
void writeFriendsCsv(const std::filesystem::path& file, const std::vector<RawFriendship>& friends);

} // namespace netr
