#include "netr/scoring.hpp"

#include "netr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace netr {

void ScoreWeights::validate() const {
    for (const double w : {alpha, beta, gamma, theta}) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw UsageError("score weights must lie in [0, 1]");
        }
    }
    if (alpha + beta + gamma > 1.0 + 1e-12) {
        throw UsageError("alpha + beta + gamma must not exceed 1");
    }
    if (!(deltaMaxKm > 0.0) || !std::isfinite(deltaMaxKm)) {
        throw UsageError("search radius must be positive");
    }
}

QueryTerms resolveTerms(const Corpus& corpus, std::span<const std::string> keywords) {
    const std::set<std::string> distinct(keywords.begin(), keywords.end());
    QueryTerms terms;
    terms.size = distinct.size();
    for (const auto& k : distinct) {
        if (const auto t = corpus.findTerm(k)) {
            terms.known.push_back(*t);
        }
    }
    std::sort(terms.known.begin(), terms.known.end());
    return terms;
}

double keywordsSimilarity(const QueryTerms& terms, const std::vector<KeywordWeight>& weights, double phiMax) {
    if (phiMax <= 0.0 || terms.size == 0) {
        return 0.0;
    }
    double sum = 0.0;
    for (const TermId t : terms.known) {
        sum += weightOf(weights, t);
    }
    return sum / (phiMax * static_cast<double>(terms.size));
}

std::vector<NeighborInfluence> neighborInfluences(UserIndex user, const SocialLayer& social) {
    std::vector<NeighborInfluence> out;
    const auto self = social.embeddings.row(user);
    for (const UserIndex n : social.neighbors[static_cast<std::size_t>(user)]) {
        out.push_back({&social.blocks[static_cast<std::size_t>(n)], cosine(social.embeddings.row(n), self)});
    }
    return out;
}

double socialEffectLeaf(std::span<const NeighborInfluence> neighbors, ObjectIndex object, NodeId leafOfObject) {
    if (neighbors.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& n : neighbors) {
        const int c = n.block->objectCount(object);
        if (c == 0) {
            continue;
        }
        const int brotherMax = n.block->nodeCount(leafOfObject);
        sum += n.cosine * (static_cast<double>(c) / brotherMax);
    }
    return sum / static_cast<double>(neighbors.size());
}

double socialEffectBound(std::span<const NeighborInfluence> neighbors, NodeId node) {
    if (neighbors.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& n : neighbors) {
        if (n.block->nodeCount(node) > 0) {
            sum += std::max(n.cosine, 0.0);
        }
    }
    return sum / static_cast<double>(neighbors.size());
}

ScoreBreakdown rankingScore(double fg, double fk, double fs, double ft, const ScoreWeights& weights) {
    ScoreBreakdown s{fg, fk, ft, fs, 0.0};
    s.total = weights.alpha * fg + weights.beta * fk + weights.gamma * fs + weights.timeWeight() * ft;
    return s;
}

} // namespace netr
