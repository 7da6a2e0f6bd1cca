#include "netr/index.hpp"

#include "netr/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>

namespace netr {

std::optional<UserIndex> NetrIndex::findUser(std::string_view id) const {
    const auto it = std::lower_bound(users.begin(), users.end(), id,
                                     [](const std::string& u, std::string_view key) { return idLess(u, key); });
    if (it == users.end() || *it != id) {
        return std::nullopt;
    }
    return static_cast<UserIndex>(it - users.begin());
}

namespace {

class StageTimer {
  public:
    explicit StageTimer(const char* name) : name_(name), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
        spdlog::info("stage {}: {:.1f} ms", name_, ms);
    }
    StageTimer(const StageTimer&) = delete;
    StageTimer& operator=(const StageTimer&) = delete;

  private:
    const char* name_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace

NetrIndex buildIndex(Dataset data, const BuildParams& params) {
    if (data.corpus.intervalCount != params.intervalCount) {
        throw UsageError("dataset interval count does not match build parameters");
    }
    NetrIndex index;
    index.params = params;
    {
        StageTimer t("tf-idf");
        computeTfIdf(data.corpus);
    }
    {
        StageTimer t("tr-tree");
        index.tree = buildTrTree(data.corpus, params.fanout);
        validateTree(index.tree, data.corpus);
    }
    {
        StageTimer t("user layer");
        index.social = buildSocialLayer(data, index.tree, params.social);
    }
    index.corpus = std::move(data.corpus);
    index.users = std::move(data.users);
    spdlog::info("index: {} objects, {} users, {} nodes, height {}", index.corpus.objects.size(), index.users.size(),
                 index.tree.size(), index.tree.height());
    return index;
}

} // namespace netr
