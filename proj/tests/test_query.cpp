#include "support.hpp"

#include "netr/bench.hpp"
#include "netr/errors.hpp"
#include "netr/query.hpp"

#include <doctest.h>

#include <algorithm>

using namespace netr;
using namespace netr::test;

namespace {

std::vector<ObjectIndex> ids(const RankedResult& r) {
    std::vector<ObjectIndex> out;
    for (const auto& e : r.entries) {
        out.push_back(e.object);
    }
    return out;
}

// Twenty venues spread over ~25 km east-west, all open at 10:00, plus one
// venue only ever visited at night.
NetrIndex smallIndex() {
    std::vector<RawObject> objects;
    std::vector<RawCheckin> checkins;
    for (int i = 0; i < 20; ++i) {
        const std::string id = std::to_string(i + 1);
        objects.push_back(object(id, 40.70, -74.00 + i * 0.015, i % 2 ? "cafe" : "bar",
                                 {{"coffee", 1 + i % 3}, {"w" + std::to_string(i % 5), 1}}));
        checkins.push_back(checkin("u" + std::to_string(i % 4), id, 10));
        checkins.push_back(checkin("u" + std::to_string((i + 1) % 4), id, 11 + i % 3));
    }
    objects.push_back(object("night", 40.70, -74.00, "club", {{"coffee", 1}}));
    checkins.push_back(checkin("u1", "night", 23));
    return buildIndex(makeDataset(objects, checkins, {{"u0", "u1"}, {"u2", "u3"}}), smallParams(4));
}

Query makeQuery(GeoPoint where, double radiusKm, int k, int hour = 10) {
    Query q;
    q.user = "u0";
    q.location = where;
    q.keywords = {"coffee", "w1"};
    q.time = at(hour);
    q.k = k;
    q.weights.deltaMaxKm = radiusKm;
    return q;
}

} // namespace

TEST_CASE("only one object within the radius") {
    const NetrIndex idx = smallIndex();
    const Query q = makeQuery({40.70, -74.00 + 19 * 0.015}, 0.5, 5);
    const auto r = topK(idx, q);
    REQUIRE(r.entries.size() == 1);
    CHECK(idx.corpus.objects[static_cast<std::size_t>(r.entries[0].object)].id == "20");
    CHECK(ids(bruteForceTopK(idx, q)) == ids(r));
}

TEST_CASE("k at least the number of in-radius objects returns all of them") {
    const NetrIndex idx = smallIndex();
    const Query q = makeQuery({40.70, -73.90}, 100, 50);
    const auto r = topK(idx, q);
    CHECK(r.entries.size() == 20); // the night venue is closed at 10:00
    CHECK(ids(r) == ids(bruteForceTopK(idx, q)));
    for (std::size_t i = 1; i < r.entries.size(); ++i) {
        CHECK(r.entries[i - 1].score.total >= r.entries[i].score.total);
    }
}

TEST_CASE("venues never visited in the query interval are not returned") {
    const NetrIndex idx = smallIndex();
    const ObjectIndex night = *idx.corpus.findObject("night");
    const auto day = ids(topK(idx, makeQuery({40.70, -74.00}, 3, 30, 10)));
    CHECK(std::find(day.begin(), day.end(), night) == day.end());
    const auto late = topK(idx, makeQuery({40.70, -74.00}, 3, 30, 23));
    REQUIRE(late.entries.size() == 1);
    CHECK(late.entries[0].object == night);
    CHECK(ids(late) == ids(bruteForceTopK(idx, makeQuery({40.70, -74.00}, 3, 30, 23))));
}

TEST_CASE("empty radius gives an empty result") {
    const NetrIndex idx = smallIndex();
    const Query q = makeQuery({10.0, 10.0}, 5, 5);
    CHECK(topK(idx, q).entries.empty());
    CHECK(bruteForceTopK(idx, q).entries.empty());
    CHECK(topKBaselineIr(idx, q).entries.empty());
}

TEST_CASE("identical scores are ordered by object index") {
    std::vector<RawObject> objects{object("5", 40.7, -73.9, "bar", {{"x", 1}}),
                                   object("3", 40.7, -73.9, "bar", {{"x", 1}}),
                                   object("9", 40.8, -73.9, "cafe", {{"y", 1}})};
    const std::vector<RawCheckin> checkins{checkin("a", "5", 10), checkin("a", "3", 10), checkin("q", "9", 12)};
    const NetrIndex idx = buildIndex(makeDataset(objects, checkins, {}), smallParams(4));
    Query q;
    q.user = "q";
    q.location = {40.7, -73.9};
    q.keywords = {"x"};
    q.time = at(10);
    q.k = 2;
    const auto r = topK(idx, q);
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].score.total == r.entries[1].score.total);
    CHECK(r.entries[0].object < r.entries[1].object);
    CHECK(ids(r) == ids(bruteForceTopK(idx, q)));
}

TEST_CASE("query validation") {
    const NetrIndex idx = smallIndex();
    Query q = makeQuery({40.7, -74.0}, 5, 5);
    q.user = "nobody";
    CHECK_THROWS_AS(topK(idx, q), UsageError);
    q = makeQuery({40.7, -74.0}, 5, 0);
    CHECK_THROWS_AS(topK(idx, q), UsageError);
    q = makeQuery({40.7, -74.0}, 5, 5);
    q.keywords.clear();
    CHECK_THROWS_AS(bruteForceTopK(idx, q), UsageError);
    q = makeQuery({40.7, -74.0}, 5, 5);
    q.weights.gamma = 0.9;
    CHECK_THROWS_AS(topKBaselineIr(idx, q), UsageError);
}

TEST_CASE("engines agree with the oracle on the synthetic workload") {
    const auto& f = synthetic();
    for (const auto& row : f.data.queries) {
        for (const double radius : {4.0, 12.0}) {
            Query q = toQuery(row);
            q.weights.deltaMaxKm = radius;
            const auto brute = bruteForceTopK(f.index, q);
            const auto netr = topK(f.index, q);
            const auto base = topKBaselineIr(f.index, q);
            CHECK(ids(netr) == ids(brute));
            CHECK(ids(base) == ids(brute));
            CHECK(netr.stats.nodeAccesses <= f.index.tree.size());
            for (std::size_t i = 0; i < netr.entries.size(); ++i) {
                CHECK(netr.entries[i].score.total == brute.entries[i].score.total);
            }
        }
    }
}

TEST_CASE("repeated queries are deterministic") {
    const auto& f = synthetic();
    const Query q = toQuery(f.data.queries[3]);
    const auto a = topK(f.index, q);
    const auto b = topK(f.index, q);
    CHECK(ids(a) == ids(b));
    CHECK(a.stats.nodeAccesses == b.stats.nodeAccesses);
    CHECK(a.stats.candidatesScored == b.stats.candidatesScored);
    CHECK(a.stats.temporallySkipped == b.stats.temporallySkipped);
}

TEST_CASE("temporally skipped nodes hold no object open at the query time") {
    const auto& f = synthetic();
    std::size_t skipped = 0;
    for (const auto& row : f.data.queries) {
        const Query q = toQuery(row);
        const int tau = toInterval(q.time, f.index.corpus.intervalCount).index;
        const auto r = topK(f.index, q);
        for (const NodeId n : r.stats.temporallySkipped) {
            ++skipped;
            for (const ObjectIndex o : descendantObjects(f.index.tree, n)) {
                CHECK(f.index.corpus.objects[static_cast<std::size_t>(o)].timeDist.score(tau) == 0.0);
            }
        }
    }
    MESSAGE("skipped nodes checked: " << skipped);
}
