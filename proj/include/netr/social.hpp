#pragma once

#include "netr/corpus.hpp"
#include "netr/errors.hpp"
#include "netr/tr_tree.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace netr {

/// Undirected, unweighted friendship graph over dense user indices.
class SocialGraph {
  public:
    SocialGraph() = default;
    /// Throws DataError on self-loops or out-of-range endpoints; duplicates
    /// and orientation are normalised.
    SocialGraph(std::size_t userCount, std::vector<FriendEdge> edges);

    std::size_t userCount() const { return adjacency_.size(); }
    const std::vector<FriendEdge>& edges() const { return edges_; }
    const std::vector<UserIndex>& friendsOf(UserIndex u) const { return adjacency_[static_cast<std::size_t>(u)]; }
    std::size_t degree(UserIndex u) const { return friendsOf(u).size(); }
    bool areFriends(UserIndex a, UserIndex b) const;

  private:
    std::vector<FriendEdge> edges_;
    std::vector<std::vector<UserIndex>> adjacency_;
};

// ---------------------------------------------------------------------------
// Spatio-temporal clustering of check-ins

inline constexpr int kNoise = -1;

struct StDbscanParams {
    double epsKm = 0.5;
    double epsHours = 2.0;
    int minPts = 10;
};

struct ClusterPoint {
    GeoPoint location;
    double hourOfDay = 0.0;
};

/// Circular distance between two hours of day, in [0, 12].
double circularHourDistance(double a, double b);

/// DBSCAN where two points are neighbours iff they are within epsKm
/// (haversine) AND within epsHours on the 24h clock. A point's
/// neighbourhood includes itself. Returns a cluster id (0-based, in
/// discovery order) or kNoise per point; deterministic for a given order.
std::vector<int> stDbscanClusters(std::span<const ClusterPoint> points, const StDbscanParams& params);

/// Cluster labels for the dataset's check-ins, in dataset order.
std::vector<int> clusterCheckins(const Dataset& data, const StDbscanParams& params);

// ---------------------------------------------------------------------------
// Preference features and neighbour selection

struct CheckinFeatureVectors {
    Eigen::SparseVector<double> areaVec; ///< check-ins per cluster (noise excluded)
    Eigen::VectorXd timeVec;             ///< check-ins per interval
    Eigen::VectorXd categoryVec;         ///< check-ins per category
    int total = 0;
};

/// Feature vectors of one user. `clusterOfCheckin` is parallel to
/// data.checkins.
CheckinFeatureVectors buildFeatureVectors(UserIndex user, const Dataset& data,
                                          std::span<const int> clusterOfCheckin, int clusterCount);

/// Feature vectors of every user in one pass.
std::vector<CheckinFeatureVectors> buildAllFeatureVectors(const Dataset& data, std::span<const int> clusterOfCheckin,
                                                          int clusterCount);

/// Cosine similarity of two Eigen vectors (dense or sparse); 0 when either
/// is all-zero. Throws UsageError on a dimension mismatch.
template <class A, class B>
double cosine(const A& a, const B& b) {
    if (a.size() != b.size()) {
        throw UsageError("cosine: dimension mismatch");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

struct SkylineCandidate {
    UserIndex user = 0;
    std::array<double, 3> sim{}; ///< (area, time, category) cosines against the target
};

/// a >= b everywhere and a > b somewhere.
bool dominates(const std::array<double, 3>& a, const std::array<double, 3>& b);

/// Users whose similarity triple no other candidate dominates, ascending.
/// Sort-filter-skyline: a dominator always has a strictly larger coordinate
/// sum, so one pass over the sum-descending order suffices.
std::vector<UserIndex> skyline(std::span<const SkylineCandidate> candidates);

/// Candidates for `target`: every other user with at least minCheckins
/// check-ins, scored by the three feature cosines. Empty when the target has
/// no check-ins (no preference signal to compare against).
std::vector<SkylineCandidate> similarityCandidates(UserIndex target, std::span<const CheckinFeatureVectors> features,
                                                   int minCheckins);

/// skyline(similarityCandidates) united with the target's friends, ascending,
/// never containing the target.
std::vector<UserIndex> selectNeighbors(UserIndex target, std::span<const CheckinFeatureVectors> features,
                                       const SocialGraph& graph, int minCheckins);

// ---------------------------------------------------------------------------
// First-order LINE embedding

using EmbeddingMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LineParams {
    int dim = 32;
    int epochs = 100; ///< edge samples = epochs * |E|
    int negSamples = 5;
    double lr0 = 0.025;
    std::uint64_t seed = 1;
};

struct LineResult {
    EmbeddingMatrix vectors;     ///< one row per user
    std::vector<double> lossLog; ///< mean objective loss per tenth of training
    std::size_t isolatedUsers = 0;
};

/// Edge-sampling SGD on the first-order objective
///   log s(v_i . v_j) + sum_n log s(-v_i . v_n),  n ~ degree^0.75,
/// learning rate decaying linearly from lr0 to lr0/100. Single-threaded and
/// bit-reproducible for a fixed seed. Isolated users keep their random
/// initialisation.
LineResult embedLine(const SocialGraph& graph, const LineParams& params);

// ---------------------------------------------------------------------------
// User-inverted value blocks

/// Check-in counts of one user: raw counts per visited object, and per tree
/// node the maximum count over the objects beneath it.
struct UserValueBlock {
    std::vector<std::pair<ObjectIndex, int>> objectCounts; ///< sorted by object
    std::vector<std::pair<NodeId, int>> nodeCounts;        ///< sorted by node

    int objectCount(ObjectIndex o) const;
    int nodeCount(NodeId n) const;
    bool empty() const { return objectCounts.empty(); }
};

/// Bottom-up construction: each visited object's count is pushed along its
/// ancestor path, keeping the max at every node. Throws DataError if a
/// check-in references an object outside the tree.
std::vector<UserValueBlock> buildUserBlocks(std::size_t userCount, const TrTree& tree,
                                            std::span<const CheckInRecord> checkins);

// ---------------------------------------------------------------------------

struct SocialParams {
    StDbscanParams dbscan;
    int minCheckins = 5;
    LineParams line;
};

/// The complete user layer.
struct SocialLayer {
    SocialGraph graph;
    EmbeddingMatrix embeddings;
    std::vector<std::vector<UserIndex>> neighbors;
    std::vector<UserValueBlock> blocks;
    int clusterCount = 0;
};

SocialLayer buildSocialLayer(const Dataset& data, const TrTree& tree, const SocialParams& params);

} // namespace netr
