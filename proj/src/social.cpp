#include "netr/social.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

namespace netr {

SocialGraph::SocialGraph(std::size_t userCount, std::vector<FriendEdge> edges) : adjacency_(userCount) {
    for (auto& e : edges) {
        if (e.a == e.b) {
            throw DataError("social graph: self-loop on user " + std::to_string(e.a));
        }
        if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(std::max(e.a, e.b)) >= userCount) {
            throw DataError("social graph: edge references unknown user");
        }
        if (e.a > e.b) {
            std::swap(e.a, e.b);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& e : edges) {
        adjacency_[static_cast<std::size_t>(e.a)].push_back(e.b);
        adjacency_[static_cast<std::size_t>(e.b)].push_back(e.a);
    }
    for (auto& adj : adjacency_) {
        std::sort(adj.begin(), adj.end());
    }
    edges_ = std::move(edges);
}

bool SocialGraph::areFriends(UserIndex a, UserIndex b) const {
    const auto& adj = friendsOf(a);
    return std::binary_search(adj.begin(), adj.end(), b);
}

// ---------------------------------------------------------------------------

double circularHourDistance(double a, double b) {
    const double d = std::fmod(std::abs(a - b), 24.0);
    return std::min(d, 24.0 - d);
}

std::vector<int> stDbscanClusters(std::span<const ClusterPoint> points, const StDbscanParams& params) {
    if (params.epsKm <= 0.0 || params.epsHours <= 0.0 || params.minPts < 1) {
        throw UsageError("ST-DBSCAN parameters must be positive");
    }
    const std::size_t n = points.size();
    // Great-circle distance is at least R * |dLat|, so a latitude band bounds
    // every neighbourhood.
    const double bandDeg = params.epsKm / kEarthRadiusKm * 180.0 / std::numbers::pi * (1.0 + 1e-9);
    std::vector<std::size_t> byLat(n);
    std::iota(byLat.begin(), byLat.end(), std::size_t{0});
    std::sort(byLat.begin(), byLat.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(points[a].location.lat, a) < std::tie(points[b].location.lat, b);
    });
    std::vector<double> lats(n);
    for (std::size_t i = 0; i < n; ++i) {
        lats[i] = points[byLat[i]].location.lat;
    }

    auto regionQuery = [&](std::size_t p, std::vector<std::size_t>& out) {
        out.clear();
        const auto& pp = points[p];
        auto it = std::lower_bound(lats.begin(), lats.end(), pp.location.lat - bandDeg);
        for (auto i = static_cast<std::size_t>(it - lats.begin()); i < n && lats[i] <= pp.location.lat + bandDeg; ++i) {
            const std::size_t q = byLat[i];
            if (circularHourDistance(pp.hourOfDay, points[q].hourOfDay) <= params.epsHours &&
                haversineKm(pp.location, points[q].location) <= params.epsKm) {
                out.push_back(q);
            }
        }
        std::sort(out.begin(), out.end());
    };

    constexpr int kUnvisited = -2;
    std::vector<int> label(n, kUnvisited);
    std::vector<std::size_t> neighbours;
    std::vector<std::size_t> seeds;
    int cluster = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (label[p] != kUnvisited) {
            continue;
        }
        regionQuery(p, neighbours);
        if (neighbours.size() < static_cast<std::size_t>(params.minPts)) {
            label[p] = kNoise;
            continue;
        }
        label[p] = cluster;
        seeds = neighbours;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const std::size_t q = seeds[s];
            if (label[q] == kNoise) {
                label[q] = cluster;
            }
            if (label[q] != kUnvisited) {
                continue;
            }
            label[q] = cluster;
            regionQuery(q, neighbours);
            if (neighbours.size() >= static_cast<std::size_t>(params.minPts)) {
                seeds.insert(seeds.end(), neighbours.begin(), neighbours.end());
            }
        }
        ++cluster;
    }
    return label;
}

std::vector<int> clusterCheckins(const Dataset& data, const StDbscanParams& params) {
    std::vector<ClusterPoint> points;
    points.reserve(data.checkins.size());
    for (const auto& c : data.checkins) {
        points.push_back({data.corpus.objects[static_cast<std::size_t>(c.object)].location, c.time.hourOfDay()});
    }
    return stDbscanClusters(points, params);
}

// ---------------------------------------------------------------------------

namespace {

CheckinFeatureVectors emptyFeatures(const Dataset& data, int clusterCount) {
    CheckinFeatureVectors f;
    f.areaVec.resize(clusterCount);
    f.timeVec = Eigen::VectorXd::Zero(data.corpus.intervalCount);
    f.categoryVec = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.corpus.categories.size()));
    return f;
}

void accumulate(CheckinFeatureVectors& f, const Dataset& data, const CheckInRecord& c, int cluster) {
    if (cluster != kNoise) {
        f.areaVec.coeffRef(cluster) += 1.0;
    }
    f.timeVec[intervalOfHour(c.time.hour, data.corpus.intervalCount)] += 1.0;
    f.categoryVec[data.corpus.objects[static_cast<std::size_t>(c.object)].category] += 1.0;
    ++f.total;
}

} // namespace

CheckinFeatureVectors buildFeatureVectors(UserIndex user, const Dataset& data, std::span<const int> clusterOfCheckin,
                                          int clusterCount) {
    auto f = emptyFeatures(data, clusterCount);
    for (std::size_t i = 0; i < data.checkins.size(); ++i) {
        if (data.checkins[i].user == user) {
            accumulate(f, data, data.checkins[i], clusterOfCheckin[i]);
        }
    }
    return f;
}

std::vector<CheckinFeatureVectors> buildAllFeatureVectors(const Dataset& data, std::span<const int> clusterOfCheckin,
                                                          int clusterCount) {
    std::vector<CheckinFeatureVectors> all(data.users.size(), emptyFeatures(data, clusterCount));
    for (std::size_t i = 0; i < data.checkins.size(); ++i) {
        const auto& c = data.checkins[i];
        accumulate(all[static_cast<std::size_t>(c.user)], data, c, clusterOfCheckin[i]);
    }
    return all;
}

bool dominates(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    bool strictly = false;
    for (std::size_t i = 0; i < 3; ++i) {
        if (a[i] < b[i]) {
            return false;
        }
        strictly = strictly || a[i] > b[i];
    }
    return strictly;
}

std::vector<UserIndex> skyline(std::span<const SkylineCandidate> candidates) {
    std::vector<const SkylineCandidate*> order;
    order.reserve(candidates.size());
    for (const auto& c : candidates) {
        order.push_back(&c);
    }
    auto sum = [](const SkylineCandidate* c) { return c->sim[0] + c->sim[1] + c->sim[2]; };
    std::stable_sort(order.begin(), order.end(),
                     [&](const SkylineCandidate* a, const SkylineCandidate* b) { return sum(a) > sum(b); });

    std::vector<const SkylineCandidate*> window;
    for (const auto* c : order) {
        const bool dominated =
            std::any_of(window.begin(), window.end(), [&](const SkylineCandidate* w) { return dominates(w->sim, c->sim); });
        if (!dominated) {
            window.push_back(c);
        }
    }
    std::vector<UserIndex> out;
    out.reserve(window.size());
    for (const auto* w : window) {
        out.push_back(w->user);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<SkylineCandidate> similarityCandidates(UserIndex target, std::span<const CheckinFeatureVectors> features,
                                                   int minCheckins) {
    std::vector<SkylineCandidate> out;
    const auto& t = features[static_cast<std::size_t>(target)];
    if (t.total == 0) {
        return out;
    }
    for (std::size_t u = 0; u < features.size(); ++u) {
        const auto& f = features[u];
        if (static_cast<UserIndex>(u) == target || f.total < minCheckins) {
            continue;
        }
        out.push_back({static_cast<UserIndex>(u),
                       {cosine(t.areaVec, f.areaVec), cosine(t.timeVec, f.timeVec),
                        cosine(t.categoryVec, f.categoryVec)}});
    }
    return out;
}

std::vector<UserIndex> selectNeighbors(UserIndex target, std::span<const CheckinFeatureVectors> features,
                                       const SocialGraph& graph, int minCheckins) {
    const auto pool = similarityCandidates(target, features, minCheckins);
    std::vector<UserIndex> out = skyline(pool);
    const auto& friends = graph.friendsOf(target);
    out.insert(out.end(), friends.begin(), friends.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::erase(out, target);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

double logSigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double sigmoid(double x) {
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

LineResult embedLine(const SocialGraph& graph, const LineParams& params) {
    if (params.dim < 2) {
        throw UsageError("embedding dimension must be >= 2");
    }
    if (params.epochs < 0 || params.negSamples < 0 || !(params.lr0 > 0.0)) {
        throw UsageError("invalid LINE training parameters");
    }
    const auto n = static_cast<Eigen::Index>(graph.userCount());
    const Eigen::Index d = params.dim;
    std::mt19937_64 rng(params.seed);

    LineResult result;
    result.vectors.resize(n, d);
    std::uniform_real_distribution<double> init(-0.5 / params.dim, 0.5 / params.dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            result.vectors(i, j) = init(rng);
        }
    }
    for (Eigen::Index u = 0; u < n; ++u) {
        if (graph.degree(static_cast<UserIndex>(u)) == 0) {
            ++result.isolatedUsers;
        }
    }
    if (result.isolatedUsers > 0) {
        spdlog::warn("LINE: {} user(s) without friends keep their random initialisation", result.isolatedUsers);
    }
    const auto& edges = graph.edges();
    if (edges.empty()) {
        return result;
    }

    std::vector<double> negWeights(static_cast<std::size_t>(n));
    for (Eigen::Index u = 0; u < n; ++u) {
        negWeights[static_cast<std::size_t>(u)] = std::pow(static_cast<double>(graph.degree(static_cast<UserIndex>(u))), 0.75);
    }
    std::discrete_distribution<UserIndex> negative(negWeights.begin(), negWeights.end());
    std::uniform_int_distribution<std::size_t> pickArc(0, 2 * edges.size() - 1);

    auto& V = result.vectors;
    const std::uint64_t total = static_cast<std::uint64_t>(params.epochs) * edges.size();
    const std::uint64_t logEvery = std::max<std::uint64_t>(1, total / 10);
    Eigen::VectorXd err(d);
    Eigen::VectorXd source(d);
    double lossSum = 0.0;
    std::uint64_t lossCount = 0;
    for (std::uint64_t s = 0; s < total; ++s) {
        const double lr = params.lr0 * (1.0 - 0.99 * static_cast<double>(s) / static_cast<double>(total));
        const std::size_t arc = pickArc(rng);
        const auto& e = edges[arc / 2];
        const UserIndex u = arc % 2 == 0 ? e.a : e.b;
        const UserIndex v = arc % 2 == 0 ? e.b : e.a;

        err.setZero();
        source = V.row(u).transpose();
        double sampleLoss = 0.0;
        for (int k = 0; k <= params.negSamples; ++k) {
            UserIndex target = v;
            double label = 1.0;
            if (k > 0) {
                target = negative(rng);
                label = 0.0;
                if (target == u || target == v) {
                    continue;
                }
            }
            const double f = source.dot(V.row(target));
            sampleLoss -= label > 0 ? logSigmoid(f) : logSigmoid(-f);
            const double g = (label - sigmoid(f)) * lr;
            err.noalias() += g * V.row(target).transpose();
            V.row(target) += g * source.transpose();
        }
        V.row(u) += err.transpose();

        lossSum += sampleLoss;
        ++lossCount;
        if ((s + 1) % logEvery == 0 || s + 1 == total) {
            result.lossLog.push_back(lossSum / static_cast<double>(lossCount));
            spdlog::debug("LINE: {:.0f}% samples, loss {:.6f}", 100.0 * static_cast<double>(s + 1) / total,
                          result.lossLog.back());
            lossSum = 0.0;
            lossCount = 0;
        }
    }
    if (!V.allFinite()) {
        throw InvariantError("LINE produced non-finite embedding entries");
    }
    return result;
}

// ---------------------------------------------------------------------------

namespace {

template <class Key>
int lookupCount(const std::vector<std::pair<Key, int>>& entries, Key key) {
    const auto it = std::lower_bound(entries.begin(), entries.end(), key,
                                     [](const std::pair<Key, int>& e, Key k) { return e.first < k; });
    return it != entries.end() && it->first == key ? it->second : 0;
}

} // namespace

int UserValueBlock::objectCount(ObjectIndex o) const { return lookupCount(objectCounts, o); }

int UserValueBlock::nodeCount(NodeId n) const { return lookupCount(nodeCounts, n); }

std::vector<UserValueBlock> buildUserBlocks(std::size_t userCount, const TrTree& tree,
                                            std::span<const CheckInRecord> checkins) {
    std::vector<std::map<ObjectIndex, int>> visits(userCount);
    for (const auto& c : checkins) {
        if (c.object < 0 || static_cast<std::size_t>(c.object) >= tree.objectLeaf.size()) {
            throw DataError("check-in references object " + std::to_string(c.object) + " absent from the tree");
        }
        if (c.user < 0 || static_cast<std::size_t>(c.user) >= userCount) {
            throw DataError("check-in references unknown user " + std::to_string(c.user));
        }
        ++visits[static_cast<std::size_t>(c.user)][c.object];
    }

    std::vector<UserValueBlock> blocks(userCount);
    std::map<NodeId, int> nodeCounts;
    for (std::size_t u = 0; u < userCount; ++u) {
        auto& block = blocks[u];
        nodeCounts.clear();
        for (const auto& [object, count] : visits[u]) {
            block.objectCounts.emplace_back(object, count);
            // Walk to the root: insert missing ancestors, raise smaller ones.
            for (NodeId node = tree.objectLeaf[static_cast<std::size_t>(object)]; node != kNoNode;
                 node = tree.node(node).parent) {
                auto [it, inserted] = nodeCounts.try_emplace(node, count);
                if (!inserted && it->second < count) {
                    it->second = count;
                }
            }
        }
        block.nodeCounts.assign(nodeCounts.begin(), nodeCounts.end());
    }
    return blocks;
}

// ---------------------------------------------------------------------------

SocialLayer buildSocialLayer(const Dataset& data, const TrTree& tree, const SocialParams& params) {
    SocialLayer layer;
    layer.graph = SocialGraph(data.users.size(), data.friends);

    const auto labels = clusterCheckins(data, params.dbscan);
    for (const int l : labels) {
        layer.clusterCount = std::max(layer.clusterCount, l + 1);
    }
    spdlog::info("ST-DBSCAN: {} clusters over {} check-ins", layer.clusterCount, labels.size());

    const auto features = buildAllFeatureVectors(data, labels, layer.clusterCount);
    layer.neighbors.resize(data.users.size());
    std::size_t totalNeighbors = 0;
    for (std::size_t u = 0; u < data.users.size(); ++u) {
        layer.neighbors[u] = selectNeighbors(static_cast<UserIndex>(u), features, layer.graph, params.minCheckins);
        totalNeighbors += layer.neighbors[u].size();
    }
    spdlog::info("neighbours: {:.2f} per user", data.users.empty() ? 0.0 : double(totalNeighbors) / data.users.size());

    layer.embeddings = embedLine(layer.graph, params.line).vectors;
    layer.blocks = buildUserBlocks(data.users.size(), tree, data.checkins);
    return layer;
}

} // namespace netr
