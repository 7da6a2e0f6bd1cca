#pragma once

#include "netr/corpus.hpp"
#include "netr/geo.hpp"
#include "netr/social.hpp"
#include "netr/tr_tree.hpp"

#include <span>
#include <vector>

namespace netr {

/// Weights of the ranking function. The time component receives whatever
/// alpha, beta and gamma leave over.
struct ScoreWeights {
    double alpha = 0.25;
    double beta = 0.25;
    double gamma = 0.3;
    double theta = 0.5;
    double deltaMaxKm = 12.0;

    double timeWeight() const { return 1.0 - alpha - beta - gamma; }
    /// Throws UsageError unless every weight is in [0, 1],
    /// alpha + beta + gamma <= 1 and deltaMaxKm > 0.
    void validate() const;
};

struct ScoreBreakdown {
    double fg = 0.0; ///< geo-spatial
    double fk = 0.0; ///< keywords
    double ft = 0.0; ///< visiting time
    double fs = 0.0; ///< social
    double total = 0.0;
};

/// 1 - distance / deltaMax. Negative beyond the radius; callers filter.
inline double locationProximity(double distanceKm, double deltaMaxKm) { return 1.0 - distanceKm / deltaMaxKm; }

inline double locationProximity(const GeoPoint& q, const GeoPoint& object, double deltaMaxKm) {
    return locationProximity(haversineKm(q, object), deltaMaxKm);
}

inline double locationProximity(const GeoPoint& q, const Mbr& box, double deltaMaxKm) {
    return locationProximity(minDistanceKm(q, box), deltaMaxKm);
}

/// theta * entropy + (1 - theta) * proximity. Objects carry entropy 0.
inline double geoSpatialScore(double entropy, double proximity, double theta) {
    return theta * entropy + (1.0 - theta) * proximity;
}

/// Query keywords resolved against the vocabulary. `size` counts every
/// distinct query keyword, including ones the corpus never uses.
struct QueryTerms {
    std::vector<TermId> known; ///< ascending
    std::size_t size = 0;
};

QueryTerms resolveTerms(const Corpus& corpus, std::span<const std::string> keywords);

/// sum_w weight(w) / (phiMax * |q.W|); 0 when phiMax == 0 or q.W is empty.
/// Works for object weights and node keyword summaries alike.
double keywordsSimilarity(const QueryTerms& terms, const std::vector<KeywordWeight>& weights, double phiMax);

/// Exact visiting time score of an object in one interval.
inline double visitingTimeScore(const TimeDistribution& dist, int interval) { return dist.score(interval); }

/// Precomputed bound of a node in one interval.
inline double visitingTimeScore(const TrTreeNode& node, int interval) { return node.timeBound[interval]; }

/// One selected neighbour of the querying user: the neighbour's value block
/// and the cosine between the two embedding vectors.
struct NeighborInfluence {
    const UserValueBlock* block = nullptr;
    double cosine = 0.0;
};

std::vector<NeighborInfluence> neighborInfluences(UserIndex user, const SocialLayer& social);

/// (1/|Nrs|) sum cos_i * C(u_i, o) / max_{brothers} C(u_i, o_j). Brothers are
/// the objects sharing o's leaf node, so the denominator is the block entry
/// of that leaf. Neighbours with no check-in among the brothers add 0.
double socialEffectLeaf(std::span<const NeighborInfluence> neighbors, ObjectIndex object, NodeId leafOfObject);

/// (1/|Nrs|) sum over neighbours with any check-in under the node of
/// max(cos_i, 0). Dominates socialEffectLeaf of every descendant object.
double socialEffectBound(std::span<const NeighborInfluence> neighbors, NodeId node);

/// alpha fg + beta fk + gamma fs + (1 - alpha - beta - gamma) ft.
ScoreBreakdown rankingScore(double fg, double fk, double fs, double ft, const ScoreWeights& weights);

} // namespace netr
