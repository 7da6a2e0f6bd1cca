#include "support.hpp"

#include "netr/csv.hpp"
#include "netr/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <tuple>

using namespace netr;
using namespace netr::test;

namespace {

void writeFile(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string errorOf(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("time distribution of hours 20,20,21,23") {
    const std::vector<int> hours{20, 20, 21, 23};
    const auto d = buildTimeDistribution(hours, 24);
    CHECK(d.prob[20] == doctest::Approx(2.0 / 4));
    CHECK(d.prob[21] == doctest::Approx(1.0 / 4));
    CHECK(d.prob[23] == doctest::Approx(1.0 / 4));
    CHECK(d.prob.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((d.prob.array() > 0).count() == 3);
}

TEST_CASE("time distribution edge cases") {
    const std::vector<int> one{9};
    CHECK(buildTimeDistribution(one, 24).prob[9] == 1.0);

    const auto empty = buildTimeDistribution({}, 24);
    CHECK(empty.prob.size() == 24);
    CHECK(empty.prob.isZero());
    CHECK_FALSE(empty.hasCheckins());
    CHECK(empty.score(3) == 0.0);

    CHECK_THROWS_AS(buildTimeDistribution(one, 0), UsageError);
    const std::vector<int> bad{24};
    CHECK_THROWS_AS(buildTimeDistribution(bad, 24), UsageError);
}

TEST_CASE("time distribution is permutation invariant") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> hour(0, 23);
    std::vector<int> hours(200);
    for (auto& h : hours) {
        h = hour(rng);
    }
    const auto a = buildTimeDistribution(hours, 6);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(hours.begin(), hours.end(), rng);
        CHECK(buildTimeDistribution(hours, 6).prob == a.prob);
    }
}

TEST_CASE("intervals partition the day evenly") {
    for (const int count : {1, 2, 3, 4, 6, 8, 12, 24}) {
        std::vector<int> perInterval(static_cast<std::size_t>(count));
        for (int h = 0; h < 24; ++h) {
            ++perInterval[static_cast<std::size_t>(intervalOfHour(h, count))];
        }
        for (const int n : perInterval) {
            CHECK(n == 24 / count);
        }
    }
    CHECK(intervalOfHour(23, 6) == 5);
    CHECK(toInterval(LocalDateTime{2020, 1, 1, 7, 59, 0}, 24).index == 7);
}

TEST_CASE("ISO timestamps") {
    const auto t = parseIsoLocal("2010-05-01T20:13:00");
    REQUIRE(t);
    CHECK(t->hour == 20);
    CHECK(t->minute == 13);
    CHECK(formatIso(*t) == "2010-05-01T20:13:00");
    CHECK(parseIsoLocal("2010-05-01 20:13")->hour == 20);
    CHECK(parseIsoLocal("2010-05-01T20:13:05.250Z")->second == 5);
    CHECK(parseIsoLocal("2010-05-01T23:10:00-07:00")->hour == 23);
    CHECK_FALSE(parseIsoLocal("2010-13-01T20:13:00"));
    CHECK_FALSE(parseIsoLocal("2010-05-01T24:00:00"));
    CHECK_FALSE(parseIsoLocal("yesterday"));
}

TEST_CASE("id ordering puts numeric ids first in numeric order") {
    std::vector<std::string> ids{"b", "10", "a", "9", "010", "100"};
    std::sort(ids.begin(), ids.end(), [](const auto& x, const auto& y) { return idLess(x, y); });
    CHECK(ids == std::vector<std::string>{"9", "010", "10", "100", "a", "b"});
}

TEST_CASE("tf-idf weights") {
    SUBCASE("keyword unique to one object among 100") {
        std::vector<RawObject> objects;
        for (int i = 0; i < 100; ++i) {
            objects.push_back(object(std::to_string(i), 40.0, -73.0, "cafe", {{"common", 1}}));
        }
        objects[0].keywords.push_back({"rare", 1});
        Dataset d = makeDataset(objects, {}, {});
        computeTfIdf(d.corpus);
        const TermId rare = *d.corpus.findTerm("rare");
        const TermId common = *d.corpus.findTerm("common");
        const double expected = 1.0 * std::log(100.0 / 1.0);
        CHECK(weightOf(d.corpus.objects[0].keywords, rare) == doctest::Approx(expected));
        CHECK(expected == doctest::Approx(4.605).epsilon(1e-4));
        CHECK(weightOf(d.corpus.objects[0].keywords, common) == 0.0);
        CHECK(d.corpus.phiMax == doctest::Approx(expected));
        CHECK(d.corpus.docFreq[static_cast<std::size_t>(common)] == 100);
    }
    SUBCASE("raw counts scale the weight") {
        Dataset d = makeDataset({object("1", 0, 0, "a", {{"x", 3}}), object("2", 0, 0, "a", {{"y", 1}})}, {}, {});
        computeTfIdf(d.corpus);
        CHECK(weightOf(d.corpus.objects[0].keywords, *d.corpus.findTerm("x")) == doctest::Approx(3 * std::log(2.0)));
    }
    SUBCASE("single object corpus has zero weights") {
        Dataset d = makeDataset({object("1", 0, 0, "a", {{"x", 2}})}, {}, {});
        computeTfIdf(d.corpus);
        CHECK(d.corpus.phiMax == 0.0);
        CHECK(d.corpus.objects[0].keywords.front().weight == 0.0);
    }
    SUBCASE("phiMax is the exhaustive maximum") {
        const auto& f = synthetic();
        double best = 0.0;
        for (const auto& o : f.index.corpus.objects) {
            for (const auto& kw : o.keywords) {
                CHECK(kw.weight >= 0.0);
                best = std::max(best, kw.weight);
            }
        }
        CHECK(f.index.corpus.phiMax == best);
    }
}

TEST_CASE("makeDataset resolves and orders records") {
    Dataset d = makeDataset({object("b", 1, 1, "bar"), object("2", 0, 0, "cafe"), object("10", 0, 0, "bar")},
                            {checkin("u2", "b", 20), checkin("u1", "2", 9), checkin("u1", "b", 21),
                             checkin("u2", "10", 20), checkin("u1", "b", 23)},
                            {{"u3", "u1"}, {"u1", "u3"}});
    CHECK(d.corpus.objects[0].id == "2");
    CHECK(d.corpus.objects[1].id == "10");
    CHECK(d.corpus.objects[2].id == "b");
    CHECK(d.users == std::vector<std::string>{"u1", "u2", "u3"});
    CHECK(d.friends.size() == 1);
    int total = 0;
    for (const auto& o : d.corpus.objects) {
        total += o.totalCheckins;
    }
    CHECK(total == 5);
    CHECK(d.corpus.objects[2].totalCheckins == 3);
    CHECK(d.corpus.objects[2].timeDist.prob[21] == doctest::Approx(1.0 / 3));
    CHECK(std::is_sorted(d.checkins.begin(), d.checkins.end(), [](const auto& a, const auto& b) {
        return std::tie(a.object, a.time, a.user) < std::tie(b.object, b.time, b.user);
    }));

    CHECK_THROWS_AS(makeDataset({object("1", 0, 0, "a"), object("1", 0, 0, "a")}, {}, {}), DataError);
    CHECK_THROWS_WITH_AS(makeDataset({object("1", 0, 0, "a")}, {checkin("u", "7", 1)}, {}),
                         doctest::Contains("'7'"), DataError);
    CHECK_THROWS_AS(makeDataset({object("1", 0, 0, "a")}, {}, {{"u", "u"}}), DataError);
}

TEST_CASE("ingest from CSV files") {
    const auto dir = scratchDir("ingest");
    const auto objects = dir / "objects.csv";
    const auto checkins = dir / "checkins.csv";
    const auto friends = dir / "friends.csv";
    writeFile(objects, "id,lat,lon,category,keywords\n"
                       "1,40.1,-73.9,bar,beer|wine:2\n"
                       "2,40.2,-73.8,cafe,\"coffee|cake\"\n"
                       "3,40.3,-73.7,cafe,coffee\n");
    writeFile(friends, "user_a,user_b\nu1,u2\nu2,u1\n");

    SUBCASE("empty check-ins give zero distributions") {
        writeFile(checkins, "user_id,object_id,timestamp\n");
        const Dataset d = ingest(objects, checkins, friends);
        for (const auto& o : d.corpus.objects) {
            CHECK(o.timeDist.prob.isZero());
            CHECK(o.totalCheckins == 0);
        }
        CHECK(d.corpus.objects[0].termCounts.size() == 2);
        CHECK(d.users.size() == 2);
    }
    SUBCASE("five check-ins are conserved") {
        writeFile(checkins, "user_id,object_id,timestamp\n"
                            "u1,1,2010-05-01T20:13:00\nu1,1,2010-05-02T21:00:00\nu2,2,2010-05-01T08:00:00\r\n"
                            "u3,3,2010-05-01T09:30:00\n\nu3,3,2010-05-03T09:45:00\n");
        const Dataset d = ingest(objects, checkins, friends);
        int total = 0;
        for (const auto& o : d.corpus.objects) {
            total += o.totalCheckins;
            CHECK(o.timeDist.prob.sum() == doctest::Approx(1.0).epsilon(1e-9));
        }
        CHECK(total == 5);
        CHECK(d.users.size() == 3);
    }
    SUBCASE("ingestion is deterministic") {
        writeFile(checkins, "user_id,object_id,timestamp\nu1,3,2010-05-01T20:13:00\nu2,1,2010-05-01T10:00:00\n");
        const Dataset a = ingest(objects, checkins, friends);
        const Dataset b = ingest(objects, checkins, friends);
        REQUIRE(a.corpus.objects.size() == b.corpus.objects.size());
        for (std::size_t i = 0; i < a.corpus.objects.size(); ++i) {
            CHECK(a.corpus.objects[i].id == b.corpus.objects[i].id);
            CHECK(a.corpus.objects[i].termCounts == b.corpus.objects[i].termCounts);
            CHECK(a.corpus.objects[i].timeDist.prob == b.corpus.objects[i].timeDist.prob);
        }
        CHECK(a.users == b.users);
        CHECK(a.friends == b.friends);
    }
    SUBCASE("latitude out of range names file, line and field") {
        writeFile(objects, "id,lat,lon,category,keywords\n1,40,-73,bar,x\n2,91,-73,bar,x\n");
        writeFile(checkins, "user_id,object_id,timestamp\n");
        const std::string msg = errorOf([&] { ingest(objects, checkins, friends); });
        CHECK(msg.find("objects.csv:3") != std::string::npos);
        CHECK(msg.find("'lat'") != std::string::npos);
    }
    SUBCASE("unknown object id is named") {
        writeFile(checkins, "user_id,object_id,timestamp\nu1,99,2010-05-01T20:13:00\n");
        const std::string msg = errorOf([&] { ingest(objects, checkins, friends); });
        CHECK(msg.find("checkins.csv:2") != std::string::npos);
        CHECK(msg.find("'99'") != std::string::npos);
    }
    SUBCASE("malformed rows") {
        writeFile(checkins, "user_id,object_id,timestamp\nu1,1,not-a-time\n");
        CHECK(errorOf([&] { ingest(objects, checkins, friends); }).find("'timestamp'") != std::string::npos);
        writeFile(checkins, "user_id,object_id,timestamp\nu1,1\n");
        CHECK(errorOf([&] { ingest(objects, checkins, friends); }).find("checkins.csv:2") != std::string::npos);
        writeFile(checkins, "user,object,time\n");
        CHECK_FALSE(errorOf([&] { ingest(objects, checkins, friends); }).empty());
        writeFile(objects, "id,lat,lon,category,keywords\n1,40,-73,bar,beer:zero\n");
        writeFile(checkins, "user_id,object_id,timestamp\n");
        CHECK(errorOf([&] { ingest(objects, checkins, friends); }).find("'keywords'") != std::string::npos);
    }
}

TEST_CASE("CSV writers round-trip through ingest") {
    const auto dir = scratchDir("csv-roundtrip");
    SynthParams sp;
    sp.objects = 60;
    sp.users = 15;
    sp.checkinsPerUser = 10;
    sp.seed = 3;
    const SynthData data = generateSynthetic(sp);
    writeSynthetic(dir, data);
    const Dataset fromFiles = ingest(dir / "objects.csv", dir / "checkins.csv", dir / "friends.csv");
    const Dataset inMemory = makeDataset(data.objects, data.checkins, data.friends);
    REQUIRE(fromFiles.corpus.objects.size() == inMemory.corpus.objects.size());
    for (std::size_t i = 0; i < inMemory.corpus.objects.size(); ++i) {
        CHECK(fromFiles.corpus.objects[i].location == inMemory.corpus.objects[i].location);
        CHECK(fromFiles.corpus.objects[i].termCounts == inMemory.corpus.objects[i].termCounts);
    }
    CHECK(fromFiles.checkins.size() == inMemory.checkins.size());
    CHECK(fromFiles.friends == inMemory.friends);
}

TEST_CASE("CSV field splitting") {
    CHECK(splitCsvLine("a,\"b,c\",\"d\"\"e\"") == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(splitOn("a|b||c", '|') == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(csvEscape("x,y") == "\"x,y\"");
}

TEST_CASE("geo distances") {
    const GeoPoint a{40.0, -73.0};
    const GeoPoint b{40.5, -73.5};
    CHECK(haversineKm(a, a) == 0.0);
    CHECK(haversineKm(a, b) == haversineKm(b, a));
    CHECK(haversineKm({0, 0}, {0, 1}) == doctest::Approx(kEarthRadiusKm * std::numbers::pi / 180).epsilon(1e-9));
    CHECK_FALSE(isValid({91, 0}));
    CHECK_FALSE(isValid({0, -180.5}));
}
