#include "netr/query.hpp"

#include "netr/errors.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <queue>
#include <set>

namespace netr {

QueryScorer::QueryScorer(const NetrIndex& index, const Query& query) : index_(index), query_(query) {
    const auto user = index.findUser(query.user);
    if (!user) {
        throw UsageError("unknown user '" + query.user + "'");
    }
    if (query.k < 1) {
        throw UsageError("k must be >= 1");
    }
    if (query.keywords.empty()) {
        throw UsageError("query needs at least one keyword");
    }
    if (!isValid(query.location)) {
        throw UsageError("query location out of range");
    }
    query.weights.validate();
    interval_ = toInterval(query.time, index.corpus.intervalCount).index;
    terms_ = resolveTerms(index.corpus, query.keywords);
    influences_ = neighborInfluences(*user, index.social);
}

bool QueryScorer::eligible(ObjectIndex o) const {
    const auto& obj = index_.corpus.objects[static_cast<std::size_t>(o)];
    return obj.timeDist.score(interval_) > 0.0 &&
           haversineKm(query_.location, obj.location) <= query_.weights.deltaMaxKm;
}

ScoreBreakdown QueryScorer::scoreObject(ObjectIndex o) const {
    const auto& obj = index_.corpus.objects[static_cast<std::size_t>(o)];
    const auto& w = query_.weights;
    const double fg = geoSpatialScore(0.0, locationProximity(query_.location, obj.location, w.deltaMaxKm), w.theta);
    const double fk = keywordsSimilarity(terms_, obj.keywords, index_.corpus.phiMax);
    const double ft = visitingTimeScore(obj.timeDist, interval_);
    const double fs = socialEffectLeaf(influences_, o, index_.tree.objectLeaf[static_cast<std::size_t>(o)]);
    return rankingScore(fg, fk, fs, ft, w);
}

bool QueryScorer::nodeInRange(NodeId n) const {
    return minDistanceKm(query_.location, index_.tree.node(n).mbr) <= query_.weights.deltaMaxKm;
}

ScoreBreakdown QueryScorer::scoreNode(NodeId n) const {
    const auto& node = index_.tree.node(n);
    const auto& w = query_.weights;
    const double fg = geoSpatialScore(node.entropyBound, locationProximity(query_.location, node.mbr, w.deltaMaxKm), w.theta);
    const double fk = keywordsSimilarity(terms_, node.keywordSummary, index_.corpus.phiMax);
    const double ft = visitingTimeScore(node, interval_);
    const double fs = socialEffectBound(influences_, n);
    return rankingScore(fg, fk, fs, ft, w);
}

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct HeapEntry {
    double key = 0.0;
    bool isObject = false;
    std::int32_t id = 0;
    ScoreBreakdown score;
};

// Max-heap order: key desc, objects before nodes, id asc.
struct LowerPriority {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (a.key != b.key) {
            return a.key < b.key;
        }
        if (a.isObject != b.isObject) {
            return b.isObject;
        }
        return a.id > b.id;
    }
};

bool resultOrder(const RankedEntry& a, const RankedEntry& b) {
    if (a.score.total != b.score.total) {
        return a.score.total > b.score.total;
    }
    return a.object < b.object;
}

// True when at least `needed` stored object scores strictly exceed `bound`.
bool enoughBetter(const std::multiset<double>& objectScores, double bound, std::size_t needed) {
    std::size_t count = 0;
    for (auto it = objectScores.rbegin(); it != objectScores.rend() && count < needed && *it > bound; ++it) {
        ++count;
    }
    return count >= needed;
}

void rankAndTruncate(std::vector<RankedEntry>& entries, int k) {
    std::sort(entries.begin(), entries.end(), resultOrder);
    if (entries.size() > static_cast<std::size_t>(k)) {
        entries.resize(static_cast<std::size_t>(k));
    }
}

} // namespace

RankedResult topK(const NetrIndex& index, const Query& query) {
    const auto start = Clock::now();
    const QueryScorer scorer(index, query);
    const auto k = static_cast<std::size_t>(query.k);
    const int tau = scorer.interval();
    RankedResult result;
    NodeAccessCounter accesses;

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, LowerPriority> heap;
    std::multiset<double> objectScores;
    heap.push({std::numeric_limits<double>::infinity(), false, index.tree.rootId(), {}});

    while (!heap.empty()) {
        const HeapEntry top = heap.top();
        heap.pop();
        if (top.isObject) {
            objectScores.erase(std::prev(objectScores.end()));
            result.entries.push_back({top.id, top.score});
            if (result.entries.size() >= k) {
                break;
            }
            continue;
        }
        const auto& node = index.tree.node(top.id);
        if (node.timeBound[tau] == 0.0) {
            result.stats.temporallySkipped.push_back(node.id);
            continue;
        }
        accesses.visit();
        const std::size_t needed = k - result.entries.size();
        for (const auto ref : node.children) {
            if (node.isLeaf()) {
                if (!scorer.eligible(ref)) {
                    continue;
                }
                const ScoreBreakdown s = scorer.scoreObject(ref);
                ++result.stats.candidatesScored;
                if (!enoughBetter(objectScores, s.total, needed)) {
                    heap.push({s.total, true, ref, s});
                    objectScores.insert(s.total);
                }
            } else {
                if (!scorer.nodeInRange(ref)) {
                    continue;
                }
                const double bound = scorer.scoreNode(ref).total + kBoundSlack;
                if (!enoughBetter(objectScores, bound, needed)) {
                    heap.push({bound, false, ref, {}});
                }
            }
        }
    }
    result.stats.nodeAccesses = accesses.count;
    result.stats.elapsedMs = msSince(start);
    return result;
}

RankedResult bruteForceTopK(const NetrIndex& index, const Query& query) {
    const auto start = Clock::now();
    const QueryScorer scorer(index, query);
    RankedResult result;
    for (std::size_t i = 0; i < index.corpus.objects.size(); ++i) {
        const auto o = static_cast<ObjectIndex>(i);
        if (scorer.eligible(o)) {
            result.entries.push_back({o, scorer.scoreObject(o)});
        }
    }
    result.stats.candidatesScored = result.entries.size();
    rankAndTruncate(result.entries, query.k);
    result.stats.elapsedMs = msSince(start);
    return result;
}

RankedResult topKBaselineIr(const NetrIndex& index, const Query& query) {
    const auto start = Clock::now();
    const QueryScorer scorer(index, query);
    const auto& w = query.weights;
    auto spatioTextual = [&](const ScoreBreakdown& s) { return w.alpha * s.fg + w.beta * s.fk; };
    RankedResult result;
    NodeAccessCounter accesses;

    // Retrieval ignores time and social information entirely.
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, LowerPriority> heap;
    heap.push({std::numeric_limits<double>::infinity(), false, index.tree.rootId(), {}});
    std::vector<ObjectIndex> candidates;
    while (!heap.empty()) {
        const HeapEntry top = heap.top();
        heap.pop();
        if (top.isObject) {
            candidates.push_back(top.id);
            continue;
        }
        const auto& node = index.tree.node(top.id);
        accesses.visit();
        for (const auto ref : node.children) {
            if (node.isLeaf()) {
                const auto& obj = index.corpus.objects[static_cast<std::size_t>(ref)];
                if (haversineKm(query.location, obj.location) <= w.deltaMaxKm) {
                    heap.push({spatioTextual(scorer.scoreObject(ref)), true, ref, {}});
                }
            } else if (scorer.nodeInRange(ref)) {
                heap.push({spatioTextual(scorer.scoreNode(ref)) + kBoundSlack, false, ref, {}});
            }
        }
    }

    for (const ObjectIndex o : candidates) {
        ++result.stats.candidatesScored;
        if (scorer.eligible(o)) {
            result.entries.push_back({o, scorer.scoreObject(o)});
        }
    }
    rankAndTruncate(result.entries, query.k);
    result.stats.nodeAccesses = accesses.count;
    result.stats.elapsedMs = msSince(start);
    return result;
}

} // namespace netr
