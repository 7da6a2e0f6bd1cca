#pragma once

#include "netr/index.hpp"
#include "netr/synth.hpp"

#include <spdlog/spdlog.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace netr::test {

inline RawObject object(std::string id, double lat, double lon, std::string category,
                        std::vector<std::pair<std::string, int>> keywords = {}) {
    return {std::move(id), {lat, lon}, std::move(category), std::move(keywords)};
}

inline LocalDateTime at(int hour, int day = 1) { return {2023, 5, day, hour, 0, 0}; }

inline RawCheckin checkin(std::string user, std::string object, int hour, int day = 1) {
    return {std::move(user), std::move(object), at(hour, day)};
}

/// Small social parameters so tiny hand-made datasets still form clusters
/// and candidate pools, and training stays fast.
inline BuildParams smallParams(int fanout = 4) {
    BuildParams p;
    p.fanout = fanout;
    p.social.dbscan = {1.0, 2.0, 2};
    p.social.minCheckins = 1;
    p.social.line.dim = 8;
    p.social.line.epochs = 50;
    return p;
}

/// The default synthetic workload (1,000 objects, 200 users, ~20,000
/// check-ins) and its index, built once per process.
struct SyntheticFixture {
    SynthData data;
    NetrIndex index;
};

inline const SyntheticFixture& synthetic() {
    static const SyntheticFixture fixture = [] {
        spdlog::set_level(spdlog::level::warn);
        SynthParams sp;
        sp.seed = 20240601;
        SyntheticFixture f;
        f.data = generateSynthetic(sp);
        f.index = buildIndex(makeDataset(f.data.objects, f.data.checkins, f.data.friends), BuildParams{});
        return f;
    }();
    return fixture;
}

/// A fresh scratch directory under the system temp dir.
inline std::filesystem::path scratchDir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("netr-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace netr::test
