#pragma once

#include "netr/index.hpp"
#include "netr/scoring.hpp"

#include <string>
#include <vector>

namespace netr {

struct Query {
    std::string user;
    GeoPoint location;
    std::vector<std::string> keywords;
    LocalDateTime time;
    int k = 5;
    ScoreWeights weights;
};

struct RankedEntry {
    ObjectIndex object = 0;
    ScoreBreakdown score;
};

struct QueryStats {
    std::size_t nodeAccesses = 0;     ///< nodes whose entries were read
    std::size_t candidatesScored = 0; ///< objects given an exact score
    double elapsedMs = 0.0;
    std::vector<NodeId> temporallySkipped; ///< nodes dropped by the zero time bound rule
};

/// Entries ordered by total descending, then object index ascending.
struct RankedResult {
    std::vector<RankedEntry> entries;
    QueryStats stats;
};

/// Everything a single query needs, resolved once: interval, query terms and
/// the querying user's neighbour influences. Scores objects exactly and
/// nodes by their admissible bounds.
///
/// An object is eligible for a result iff it lies within deltaMaxKm of the
/// query point and its visiting time score at the query time is nonzero; an
/// object never visited in that interval is treated as closed.
class QueryScorer {
  public:
    /// Throws UsageError for an unknown user, k < 1, no keywords, bad weights.
    QueryScorer(const NetrIndex& index, const Query& query);

    int interval() const { return interval_; }
    const Query& query() const { return query_; }

    bool eligible(ObjectIndex o) const;
    ScoreBreakdown scoreObject(ObjectIndex o) const;
    /// Whether any object under the node can lie within the radius.
    bool nodeInRange(NodeId n) const;
    ScoreBreakdown scoreNode(NodeId n) const;

  private:
    const NetrIndex& index_;
    const Query& query_;
    int interval_ = 0;
    QueryTerms terms_;
    std::vector<NeighborInfluence> influences_;
};

/// Best-first search over the tree: pops the highest-keyed heap entry,
/// emits objects, drops nodes whose time bound is zero at the query
/// interval, and inserts a child only while fewer than (k - found) heap
/// objects strictly outscore its bound.
RankedResult topK(const NetrIndex& index, const Query& query);

/// Scores every eligible object and keeps the best k.
RankedResult bruteForceTopK(const NetrIndex& index, const Query& query);

/// IR-tree style baseline: best-first retrieval of every in-radius object by
/// the spatio-textual part of the score only, then a full re-rank.
RankedResult topKBaselineIr(const NetrIndex& index, const Query& query);

/// Bound slack added to node keys so floating-point noise in the spherical
/// distance bound can never order a node after one of its own objects.
inline constexpr double kBoundSlack = 1e-12;

} // namespace netr
