#pragma once

#include "netr/bench.hpp"
#include "netr/corpus.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace netr {

struct SynthParams {
    int objects = 1000;
    int users = 200;
    int checkinsPerUser = 100; ///< mean; every user gets at least one
    int queries = 100;
    int keywordsPerQuery = 5;
    std::uint64_t seed = 42;

    GeoPoint center{40.7300, -73.9900};
    double cityRadiusKm = 8.0;
    int districts = 12;
    double districtSpreadKm = 1.0;
    int vocabulary = 400;
    double zipfExponent = 1.0;
    int communities = 8;
    double friendProbInside = 0.25;
    double friendProbOutside = 0.004;
};

/// A venue category and its relative popularity per hour of day. Zero hours
/// are closing hours: no check-in is ever generated then.
struct CategoryProfile {
    std::string_view name;
    std::array<double, 24> hourly;
};

const std::vector<CategoryProfile>& categoryProfiles();

struct SynthData {
    std::vector<RawObject> objects;
    std::vector<RawCheckin> checkins;
    std::vector<RawFriendship> friends;
    std::vector<QueryRow> queries;
};

/// Deterministic for a fixed parameter set. Object and user ids are the
/// decimal numbers 1..n.
SynthData generateSynthetic(const SynthParams& params);

/// Writes objects.csv, checkins.csv, friends.csv and queries.csv.
void writeSynthetic(const std::filesystem::path& dir, const SynthData& data);

} // namespace netr
