#pragma once

#include "netr/corpus.hpp"
#include "netr/social.hpp"
#include "netr/tr_tree.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netr {

struct BuildParams {
    int intervalCount = kDefaultIntervalCount;
    int fanout = kDefaultFanout;
    SocialParams social;
};

/// The two-layer index: the location layer (corpus + TR-tree) and the user
/// layer (embeddings, neighbour sets, value blocks). Immutable once built.
struct NetrIndex {
    BuildParams params;
    Corpus corpus;
    std::vector<std::string> users; ///< external ids in idLess order
    TrTree tree;
    SocialLayer social; ///< graph is only populated for freshly built indexes

    std::optional<UserIndex> findUser(std::string_view id) const;
};

/// Full pipeline: TF-IDF, bulk load, summaries, clustering, neighbour
/// selection, embedding and value blocks. Stage timings go to the log.
NetrIndex buildIndex(Dataset data, const BuildParams& params);

} // namespace netr
