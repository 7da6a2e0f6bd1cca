#pragma once

#include "netr/corpus.hpp"
#include "netr/geo.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace netr {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;
inline constexpr int kDefaultFanout = 32;

enum class NodeKind : std::uint8_t { Leaf, Internal };

/// One node of the time-aware R-tree. Leaf nodes hold object entries,
/// internal nodes hold child nodes. Every summary field is an envelope of the
/// node's subtree, so a node's bound dominates every descendant's score.
struct TrTreeNode {
    NodeId id = kNoNode;
    NodeKind kind = NodeKind::Leaf;
    int level = 0; ///< 0 for leaves, parent level = child level + 1
    NodeId parent = kNoNode;
    Mbr mbr;
    double entropyBound = 0.0;                 ///< in [0, 1]
    std::vector<KeywordWeight> keywordSummary; ///< max descendant weight per term
    Eigen::VectorXd timeBound;                 ///< max descendant visiting time score per interval
    std::vector<std::int32_t> children;        ///< NodeIds (internal) or ObjectIndices (leaf)
    std::int32_t subtreeObjectCount = 0;

    bool isLeaf() const { return kind == NodeKind::Leaf; }
};

/// Flat node array. Ids equal positions; children always have smaller ids
/// than their parent and the root is the last node.
struct TrTree {
    std::vector<TrTreeNode> nodes;
    std::vector<NodeId> objectLeaf; ///< leaf node holding each object
    int maxFanout = kDefaultFanout;
    int minFanout = kDefaultFanout / 2;

    NodeId rootId() const { return static_cast<NodeId>(nodes.size()) - 1; }
    const TrTreeNode& root() const { return nodes.back(); }
    const TrTreeNode& node(NodeId id) const { return nodes[static_cast<std::size_t>(id)]; }
    std::size_t size() const { return nodes.size(); }
    /// Number of node levels (a lone leaf root has height 1).
    int height() const { return nodes.empty() ? 0 : root().level + 1; }
};

/// Sort-tile-recursive packing. Group sizes are balanced so every non-root
/// node holds between maxFanout/2 and maxFanout entries. Computes MBRs and
/// object counts; summaries are filled by computeNodeSummaries.
/// Throws UsageError on an empty corpus or maxFanout < 2.
TrTree bulkLoad(const Corpus& corpus, int maxFanout = kDefaultFanout);

/// Shannon entropy (base 2) of the category histogram, normalised by
/// log2(categoryCount); 0 when categoryCount == 1.
/// Throws UsageError for negative or all-zero counts.
double rawCategoryEntropy(std::span<const int> categoryCounts, int categoryCount);

/// Fills entropyBound, keywordSummary and timeBound bottom-up.
void computeNodeSummaries(TrTree& tree, const Corpus& corpus);

/// bulkLoad followed by computeNodeSummaries.
TrTree buildTrTree(const Corpus& corpus, int maxFanout = kDefaultFanout);

/// Checks every structural and envelope invariant; throws InvariantError
/// describing the first violation.
void validateTree(const TrTree& tree, const Corpus& corpus);

/// Objects under `node`, in tree order.
std::vector<ObjectIndex> descendantObjects(const TrTree& tree, NodeId node);

/// Node accesses of one query; the I/O proxy.
struct NodeAccessCounter {
    std::size_t count = 0;

    void visit() { ++count; }
    void reset() { count = 0; }
};

} // namespace netr
