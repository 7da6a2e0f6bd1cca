#include "netr/tr_tree.hpp"

#include "netr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace netr {

namespace {

// Balanced group sizes: n items into ceil(n / maxFanout) groups.
std::vector<std::size_t> groupSizes(std::size_t n, std::size_t maxFanout) {
    const std::size_t groups = (n + maxFanout - 1) / maxFanout;
    std::vector<std::size_t> sizes(groups, n / groups);
    for (std::size_t i = 0; i < n % groups; ++i) {
        ++sizes[i];
    }
    return sizes;
}

struct Item {
    GeoPoint center;
    std::int32_t ref;
};

// One STR pass: returns the groups of refs forming the next level's nodes.
std::vector<std::vector<std::int32_t>> strPack(std::vector<Item> items, std::size_t maxFanout) {
    if (items.size() <= maxFanout) {
        std::vector<std::int32_t> all;
        for (const auto& it : items) {
            all.push_back(it.ref);
        }
        return {all};
    }
    const auto sizes = groupSizes(items.size(), maxFanout);
    const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(sizes.size()))));
    std::vector<std::size_t> perSlice(slices, sizes.size() / slices);
    for (std::size_t i = 0; i < sizes.size() % slices; ++i) {
        ++perSlice[i];
    }

    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return std::tie(a.center.lon, a.center.lat, a.ref) < std::tie(b.center.lon, b.center.lat, b.ref);
    });

    std::vector<std::vector<std::int32_t>> groups;
    std::size_t pos = 0;
    std::size_t g = 0;
    for (const std::size_t leaves : perSlice) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < leaves; ++j) {
            count += sizes[g + j];
        }
        const auto first = items.begin() + static_cast<std::ptrdiff_t>(pos);
        std::sort(first, first + static_cast<std::ptrdiff_t>(count), [](const Item& a, const Item& b) {
            return std::tie(a.center.lat, a.center.lon, a.ref) < std::tie(b.center.lat, b.center.lon, b.ref);
        });
        for (std::size_t j = 0; j < leaves; ++j, ++g) {
            std::vector<std::int32_t> group;
            for (std::size_t k = 0; k < sizes[g]; ++k) {
                group.push_back(items[pos++].ref);
            }
            groups.push_back(std::move(group));
        }
    }
    return groups;
}

// Elementwise max of two term-sorted sparse weight lists.
std::vector<KeywordWeight> mergeMax(const std::vector<KeywordWeight>& a, const std::vector<KeywordWeight>& b) {
    std::vector<KeywordWeight> out;
    out.reserve(std::max(a.size(), b.size()));
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() || j != b.end()) {
        if (j == b.end() || (i != a.end() && i->term < j->term)) {
            out.push_back(*i++);
        } else if (i == a.end() || j->term < i->term) {
            out.push_back(*j++);
        } else {
            out.push_back({i->term, std::max(i->weight, j->weight)});
            ++i;
            ++j;
        }
    }
    return out;
}

[[noreturn]] void violated(NodeId id, const std::string& what) {
    throw InvariantError("tree node " + std::to_string(id) + ": " + what);
}

} // namespace

TrTree bulkLoad(const Corpus& corpus, int maxFanout) {
    if (corpus.objects.empty()) {
        throw UsageError("empty corpus");
    }
    if (maxFanout < 2) {
        throw UsageError("maxFanout must be >= 2");
    }
    TrTree tree;
    tree.maxFanout = maxFanout;
    tree.minFanout = maxFanout / 2;
    tree.objectLeaf.assign(corpus.objects.size(), kNoNode);

    std::vector<Item> items;
    items.reserve(corpus.objects.size());
    for (std::size_t i = 0; i < corpus.objects.size(); ++i) {
        items.push_back({corpus.objects[i].location, static_cast<std::int32_t>(i)});
    }

    int level = 0;
    while (true) {
        const auto groups = strPack(std::move(items), static_cast<std::size_t>(maxFanout));
        items.clear();
        for (const auto& group : groups) {
            TrTreeNode node;
            node.id = static_cast<NodeId>(tree.nodes.size());
            node.kind = level == 0 ? NodeKind::Leaf : NodeKind::Internal;
            node.level = level;
            node.children = group;
            for (const auto ref : group) {
                if (level == 0) {
                    node.mbr.expand(corpus.objects[static_cast<std::size_t>(ref)].location);
                    tree.objectLeaf[static_cast<std::size_t>(ref)] = node.id;
                    ++node.subtreeObjectCount;
                } else {
                    auto& child = tree.nodes[static_cast<std::size_t>(ref)];
                    child.parent = node.id;
                    node.mbr.expand(child.mbr);
                    node.subtreeObjectCount += child.subtreeObjectCount;
                }
            }
            items.push_back({node.mbr.center(), node.id});
            tree.nodes.push_back(std::move(node));
        }
        if (groups.size() == 1) {
            break;
        }
        ++level;
    }
    return tree;
}

double rawCategoryEntropy(std::span<const int> categoryCounts, int categoryCount) {
    if (categoryCount < 1) {
        throw UsageError("category count must be >= 1");
    }
    double total = 0.0;
    for (const int c : categoryCounts) {
        if (c < 0) {
            throw UsageError("negative category count");
        }
        total += c;
    }
    if (total == 0.0) {
        throw UsageError("category counts are all zero");
    }
    if (categoryCount == 1) {
        return 0.0;
    }
    double h = 0.0;
    for (const int c : categoryCounts) {
        if (c > 0) {
            const double p = c / total;
            h -= p * std::log2(p);
        }
    }
    return std::clamp(h / std::log2(static_cast<double>(categoryCount)), 0.0, 1.0);
}

void computeNodeSummaries(TrTree& tree, const Corpus& corpus) {
    const int intervals = corpus.intervalCount;
    const auto cats = static_cast<int>(corpus.categories.size());
    std::vector<std::vector<int>> categoryCounts(tree.nodes.size(), std::vector<int>(static_cast<std::size_t>(cats), 0));

    // Children precede parents, so one forward pass is bottom-up.
    for (auto& node : tree.nodes) {
        auto& counts = categoryCounts[static_cast<std::size_t>(node.id)];
        node.timeBound = Eigen::VectorXd::Zero(intervals);
        node.keywordSummary.clear();
        double childEntropy = 0.0;
        for (const auto ref : node.children) {
            if (node.isLeaf()) {
                const auto& o = corpus.objects[static_cast<std::size_t>(ref)];
                ++counts[static_cast<std::size_t>(o.category)];
                node.keywordSummary = mergeMax(node.keywordSummary, o.keywords);
                for (int t = 0; t < intervals; ++t) {
                    node.timeBound[t] = std::max(node.timeBound[t], o.timeDist.score(t));
                }
            } else {
                const auto& child = tree.nodes[static_cast<std::size_t>(ref)];
                const auto& childCounts = categoryCounts[static_cast<std::size_t>(ref)];
                for (int c = 0; c < cats; ++c) {
                    counts[static_cast<std::size_t>(c)] += childCounts[static_cast<std::size_t>(c)];
                }
                node.keywordSummary = mergeMax(node.keywordSummary, child.keywordSummary);
                node.timeBound = node.timeBound.cwiseMax(child.timeBound);
                childEntropy = std::max(childEntropy, child.entropyBound);
            }
        }
        node.entropyBound = std::max(rawCategoryEntropy(counts, cats), childEntropy);
    }
}

TrTree buildTrTree(const Corpus& corpus, int maxFanout) {
    TrTree tree = bulkLoad(corpus, maxFanout);
    computeNodeSummaries(tree, corpus);
    return tree;
}

std::vector<ObjectIndex> descendantObjects(const TrTree& tree, NodeId node) {
    std::vector<ObjectIndex> out;
    std::vector<NodeId> stack{node};
    while (!stack.empty()) {
        const auto& n = tree.node(stack.back());
        stack.pop_back();
        if (n.isLeaf()) {
            out.insert(out.end(), n.children.begin(), n.children.end());
        } else {
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
                stack.push_back(*it);
            }
        }
    }
    return out;
}

void validateTree(const TrTree& tree, const Corpus& corpus) {
    if (tree.nodes.empty()) {
        throw InvariantError("tree has no nodes");
    }
    if (tree.objectLeaf.size() != corpus.objects.size()) {
        throw InvariantError("objectLeaf size does not match corpus");
    }
    std::vector<int> seen(corpus.objects.size(), 0);
    for (const auto& node : tree.nodes) {
        const bool isRoot = node.id == tree.rootId();
        if (node.id != static_cast<NodeId>(&node - tree.nodes.data())) {
            violated(node.id, "id does not match position");
        }
        if (isRoot != (node.parent == kNoNode)) {
            violated(node.id, "parent link inconsistent with root position");
        }
        const auto n = static_cast<int>(node.children.size());
        if (n == 0 || n > tree.maxFanout || (!isRoot && n < tree.minFanout)) {
            violated(node.id, "entry count " + std::to_string(n) + " outside fanout bounds");
        }
        if (node.entropyBound < 0.0 || node.entropyBound > 1.0) {
            violated(node.id, "entropy bound outside [0, 1]");
        }
        if (node.timeBound.size() != corpus.intervalCount || node.timeBound.minCoeff() < 0.0 ||
            node.timeBound.maxCoeff() > 1.0) {
            violated(node.id, "time bound malformed or outside [0, 1]");
        }
        std::int32_t count = 0;
        for (const auto ref : node.children) {
            if (node.isLeaf()) {
                if (ref < 0 || static_cast<std::size_t>(ref) >= corpus.objects.size()) {
                    violated(node.id, "object entry out of range");
                }
                const auto& o = corpus.objects[static_cast<std::size_t>(ref)];
                ++seen[static_cast<std::size_t>(ref)];
                ++count;
                if (tree.objectLeaf[static_cast<std::size_t>(ref)] != node.id) {
                    violated(node.id, "objectLeaf mismatch for object " + o.id);
                }
                if (!node.mbr.contains(o.location)) {
                    violated(node.id, "mbr does not enclose object " + o.id);
                }
                for (const auto& kw : o.keywords) {
                    if (weightOf(node.keywordSummary, kw.term) < kw.weight) {
                        violated(node.id, "keyword summary below object " + o.id);
                    }
                }
                for (int t = 0; t < corpus.intervalCount; ++t) {
                    if (node.timeBound[t] < o.timeDist.score(t)) {
                        violated(node.id, "time bound below object " + o.id);
                    }
                }
            } else {
                if (ref < 0 || ref >= node.id) {
                    violated(node.id, "child id must precede parent");
                }
                const auto& child = tree.node(ref);
                if (child.parent != node.id || child.level + 1 != node.level) {
                    violated(node.id, "child link or level inconsistent");
                }
                count += child.subtreeObjectCount;
                if (!node.mbr.contains(child.mbr)) {
                    violated(node.id, "mbr does not enclose child");
                }
                if (node.entropyBound < child.entropyBound) {
                    violated(node.id, "entropy envelope below child");
                }
                for (const auto& kw : child.keywordSummary) {
                    if (weightOf(node.keywordSummary, kw.term) < kw.weight) {
                        violated(node.id, "keyword summary below child");
                    }
                }
                if ((node.timeBound.array() < child.timeBound.array()).any()) {
                    violated(node.id, "time bound below child");
                }
            }
        }
        if (node.isLeaf() != (node.level == 0)) {
            violated(node.id, "leaf kind inconsistent with level");
        }
        if (count != node.subtreeObjectCount) {
            violated(node.id, "subtree object count mismatch");
        }
    }
    if (tree.root().subtreeObjectCount != static_cast<std::int32_t>(corpus.objects.size())) {
        throw InvariantError("root does not cover the corpus");
    }
    if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) {
        throw InvariantError("some object is not reachable exactly once");
    }
}

} // namespace netr
