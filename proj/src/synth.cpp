#include "netr/synth.hpp"

#include "netr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

namespace netr {

namespace {

using Rng = std::mt19937_64;

std::array<double, 24> hours(std::initializer_list<std::pair<int, double>> weights) {
    std::array<double, 24> h{};
    for (const auto& [hour, w] : weights) {
        h[static_cast<std::size_t>(hour)] = w;
    }
    return h;
}

GeoPoint offsetKm(const GeoPoint& p, double northKm, double eastKm) {
    const double dLat = northKm / kEarthRadiusKm * 180.0 / std::numbers::pi;
    const double dLon = eastKm / (kEarthRadiusKm * std::cos(p.lat * std::numbers::pi / 180.0)) * 180.0 / std::numbers::pi;
    return {std::clamp(p.lat + dLat, -90.0, 90.0), std::clamp(p.lon + dLon, -180.0, 180.0)};
}

std::string word(int rank) {
    static constexpr const char* kOnsets[] = {"b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t"};
    static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};
    std::string w;
    int r = rank;
    do {
        w += kOnsets[r % 12];
        r /= 12;
        w += kVowels[r % 5];
        r /= 5;
    } while (r > 0);
    return w;
}

LocalDateTime randomDay(Rng& rng, int hour) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    std::uniform_int_distribution<int> month(1, 12);
    const int m = month(rng);
    std::uniform_int_distribution<int> day(1, kDays[m - 1]);
    std::uniform_int_distribution<int> minute(0, 59);
    const int d = day(rng);
    return {2023, m, d, hour, minute(rng), minute(rng)};
}

} // namespace

const std::vector<CategoryProfile>& categoryProfiles() {
    static const std::vector<CategoryProfile> profiles = {
        {"bar", hours({{17, 1}, {18, 2}, {19, 3}, {20, 5}, {21, 7}, {22, 8}, {23, 6}, {0, 4}, {1, 2}})},
        {"nightclub", hours({{22, 3}, {23, 6}, {0, 8}, {1, 7}, {2, 4}, {3, 1}})},
        {"cafe", hours({{6, 2}, {7, 6}, {8, 8}, {9, 7}, {10, 5}, {11, 3}, {12, 2}, {13, 2}, {14, 2}, {15, 1}})},
        {"restaurant", hours({{11, 3}, {12, 7}, {13, 5}, {14, 2}, {17, 2}, {18, 5}, {19, 8}, {20, 6}, {21, 3}})},
        {"museum", hours({{10, 3}, {11, 5}, {12, 5}, {13, 6}, {14, 6}, {15, 5}, {16, 3}})},
        {"gym", hours({{6, 5}, {7, 6}, {8, 3}, {12, 2}, {17, 5}, {18, 7}, {19, 5}, {20, 2}})},
        {"park", hours({{8, 2}, {9, 3}, {10, 4}, {11, 4}, {12, 5}, {13, 5}, {14, 5}, {15, 5}, {16, 4}, {17, 3}, {18, 2}})},
        {"shop", hours({{10, 2}, {11, 3}, {12, 4}, {13, 4}, {14, 5}, {15, 5}, {16, 5}, {17, 5}, {18, 4}, {19, 2}})},
        {"bakery", hours({{6, 4}, {7, 7}, {8, 8}, {9, 6}, {10, 3}, {11, 1}})},
        {"cinema", hours({{14, 1}, {16, 2}, {18, 4}, {19, 6}, {20, 7}, {21, 6}, {22, 3}})},
    };
    return profiles;
}

SynthData generateSynthetic(const SynthParams& p) {
    if (p.objects < 1 || p.users < 1 || p.checkinsPerUser < 1 || p.districts < 1 || p.vocabulary < 1 ||
        p.communities < 1 || p.keywordsPerQuery < 1 || p.queries < 0) {
        throw UsageError("synthetic generator sizes must be positive");
    }
    Rng rng(p.seed);
    const auto& profiles = categoryProfiles();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<GeoPoint> districts;
    for (int d = 0; d < p.districts; ++d) {
        const double r = p.cityRadiusKm * std::sqrt(unit(rng));
        const double a = 2.0 * std::numbers::pi * unit(rng);
        districts.push_back(offsetKm(p.center, r * std::sin(a), r * std::cos(a)));
    }

    std::vector<double> zipf(static_cast<std::size_t>(p.vocabulary));
    for (std::size_t r = 0; r < zipf.size(); ++r) {
        zipf[r] = 1.0 / std::pow(static_cast<double>(r + 1), p.zipfExponent);
    }
    std::discrete_distribution<int> drawWord(zipf.begin(), zipf.end());

    SynthData out;
    std::vector<int> objectDistrict;
    std::vector<std::size_t> objectCategory;
    std::vector<double> popularity;
    std::uniform_int_distribution<int> pickDistrict(0, p.districts - 1);
    std::uniform_int_distribution<std::size_t> pickCategory(0, profiles.size() - 1);
    std::uniform_int_distribution<int> extraWords(1, 5);
    std::lognormal_distribution<double> popularityDist(0.0, 1.0);
    for (int i = 0; i < p.objects; ++i) {
        const int d = pickDistrict(rng);
        const std::size_t c = pickCategory(rng);
        RawObject o;
        o.id = std::to_string(i + 1);
        o.location = offsetKm(districts[static_cast<std::size_t>(d)], p.districtSpreadKm * gauss(rng),
                              p.districtSpreadKm * gauss(rng));
        o.category = std::string(profiles[c].name);
        std::map<std::string, int> words{{o.category, 1}};
        for (int w = extraWords(rng); w > 0; --w) {
            ++words[word(drawWord(rng))];
        }
        o.keywords.assign(words.begin(), words.end());
        out.objects.push_back(std::move(o));
        objectDistrict.push_back(d);
        objectCategory.push_back(c);
        popularity.push_back(popularityDist(rng));
    }

    // Each community favours two districts and three categories.
    struct Community {
        std::set<int> districts;
        std::set<std::size_t> categories;
    };
    std::vector<Community> communities(static_cast<std::size_t>(p.communities));
    for (auto& c : communities) {
        while (c.districts.size() < std::min<std::size_t>(2, static_cast<std::size_t>(p.districts))) {
            c.districts.insert(pickDistrict(rng));
        }
        while (c.categories.size() < 3) {
            c.categories.insert(pickCategory(rng));
        }
    }
    std::uniform_int_distribution<int> pickCommunity(0, p.communities - 1);
    std::vector<int> userCommunity;
    std::vector<GeoPoint> home;
    for (int u = 0; u < p.users; ++u) {
        const int c = pickCommunity(rng);
        const auto& favs = communities[static_cast<std::size_t>(c)].districts;
        auto it = favs.begin();
        std::advance(it, std::uniform_int_distribution<std::size_t>(0, favs.size() - 1)(rng));
        userCommunity.push_back(c);
        home.push_back(offsetKm(districts[static_cast<std::size_t>(*it)], 1.5 * gauss(rng), 1.5 * gauss(rng)));
    }

    for (int a = 0; a < p.users; ++a) {
        for (int b = a + 1; b < p.users; ++b) {
            const double prob = userCommunity[static_cast<std::size_t>(a)] == userCommunity[static_cast<std::size_t>(b)]
                                    ? p.friendProbInside
                                    : p.friendProbOutside;
            if (unit(rng) < prob) {
                out.friends.push_back({std::to_string(a + 1), std::to_string(b + 1)});
            }
        }
    }

    std::vector<std::discrete_distribution<int>> hourOf;
    for (const auto& prof : profiles) {
        hourOf.emplace_back(prof.hourly.begin(), prof.hourly.end());
    }
    std::uniform_int_distribution<int> checkinCount(std::max(1, p.checkinsPerUser / 2),
                                                    std::max(1, p.checkinsPerUser * 3 / 2));
    std::vector<double> weight(static_cast<std::size_t>(p.objects));
    for (int u = 0; u < p.users; ++u) {
        const auto& comm = communities[static_cast<std::size_t>(userCommunity[static_cast<std::size_t>(u)])];
        for (std::size_t o = 0; o < weight.size(); ++o) {
            const double km = haversineKm(home[static_cast<std::size_t>(u)], out.objects[o].location);
            double w = popularity[o] * std::exp(-km / 3.0);
            if (comm.categories.count(objectCategory[o]) != 0) {
                w *= 4.0;
            }
            if (comm.districts.count(objectDistrict[o]) != 0) {
                w *= 2.0;
            }
            weight[o] = w + 1e-9;
        }
        std::discrete_distribution<int> pickObject(weight.begin(), weight.end());
        for (int n = checkinCount(rng); n > 0; --n) {
            const auto o = static_cast<std::size_t>(pickObject(rng));
            const int hour = hourOf[objectCategory[o]](rng);
            out.checkins.push_back({std::to_string(u + 1), out.objects[o].id, randomDay(rng, hour)});
        }
    }

    std::uniform_int_distribution<int> pickUser(0, p.users - 1);
    std::uniform_int_distribution<int> pickObject(0, p.objects - 1);
    std::uniform_int_distribution<int> pickHour(0, 23);
    for (int q = 0; q < p.queries; ++q) {
        QueryRow row;
        row.user = std::to_string(pickUser(rng) + 1);
        row.location = offsetKm(out.objects[static_cast<std::size_t>(pickObject(rng))].location, gauss(rng), gauss(rng));
        std::set<std::string> seen;
        const int wanted = std::min(p.keywordsPerQuery, p.vocabulary);
        while (static_cast<int>(row.keywords.size()) < wanted) {
            std::string w = word(drawWord(rng));
            if (seen.insert(w).second) {
                row.keywords.push_back(std::move(w));
            }
        }
        row.time = randomDay(rng, pickHour(rng));
        row.k = 5;
        out.queries.push_back(std::move(row));
    }
    return out;
}

void writeSynthetic(const std::filesystem::path& dir, const SynthData& data) {
    std::filesystem::create_directories(dir);
    writeObjectsCsv(dir / "objects.csv", data.objects);
    writeCheckinsCsv(dir / "checkins.csv", data.checkins);
    writeFriendsCsv(dir / "friends.csv", data.friends);
    writeQueries(dir / "queries.csv", data.queries);
}

} // namespace netr
