#include "netr/persist.hpp"

#include "netr/errors.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace netr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kArtifacts[] = {"objects.json", "tree.json", "embeddings.bin", "neighbors.json", "blocks.json"};

json toJson(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

Eigen::VectorXd vectorFromJson(const json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    }
    return v;
}

json toJson(const std::vector<KeywordWeight>& weights) {
    json a = json::array();
    for (const auto& kw : weights) {
        a.push_back({kw.term, kw.weight});
    }
    return a;
}

std::vector<KeywordWeight> weightsFromJson(const json& a) {
    std::vector<KeywordWeight> out;
    out.reserve(a.size());
    for (const auto& e : a) {
        out.push_back({e.at(0).get<TermId>(), e.at(1).get<double>()});
    }
    return out;
}

void writeJson(const fs::path& file, const json& j, int indent = -1) {
    std::ofstream out(file, std::ios::binary);
    out << j.dump(indent) << '\n';
    if (!out) {
        throw DataError("failed writing " + file.string());
    }
}

json readJson(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw DataError(file.string() + ": cannot open file");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(file.string() + ": " + e.what());
    }
}

json corpusToJson(const Corpus& c) {
    json objects = json::array();
    for (const auto& o : c.objects) {
        json terms = json::array();
        for (const auto& [t, n] : o.termCounts) {
            terms.push_back({t, n});
        }
        objects.push_back({{"id", o.id},
                           {"lat", o.location.lat},
                           {"lon", o.location.lon},
                           {"category", o.category},
                           {"terms", terms},
                           {"keywords", toJson(o.keywords)},
                           {"time_dist", toJson(o.timeDist.prob)},
                           {"total_checkins", o.totalCheckins}});
    }
    return {{"interval_count", c.intervalCount}, {"categories", c.categories}, {"vocabulary", c.vocabulary},
            {"doc_freq", c.docFreq},             {"phi_max", c.phiMax},         {"objects", objects}};
}

Corpus corpusFromJson(const json& j) {
    Corpus c;
    c.intervalCount = j.at("interval_count").get<int>();
    c.categories = j.at("categories").get<std::vector<std::string>>();
    c.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    c.docFreq = j.at("doc_freq").get<std::vector<int>>();
    c.phiMax = j.at("phi_max").get<double>();
    for (const auto& o : j.at("objects")) {
        SpatialObject obj;
        obj.id = o.at("id").get<std::string>();
        obj.location = {o.at("lat").get<double>(), o.at("lon").get<double>()};
        obj.category = o.at("category").get<CategoryId>();
        for (const auto& t : o.at("terms")) {
            obj.termCounts.emplace_back(t.at(0).get<TermId>(), t.at(1).get<int>());
        }
        obj.keywords = weightsFromJson(o.at("keywords"));
        obj.timeDist.prob = vectorFromJson(o.at("time_dist"));
        obj.totalCheckins = o.at("total_checkins").get<int>();
        if (obj.timeDist.prob.size() != c.intervalCount) {
            throw DataError("objects.json: object '" + obj.id + "' has a malformed time distribution");
        }
        c.objects.push_back(std::move(obj));
    }
    return c;
}

json treeToJson(const TrTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back({{"id", n.id},
                         {"kind", n.isLeaf() ? "leaf" : "internal"},
                         {"level", n.level},
                         {"parent", n.parent},
                         {"mbr", {n.mbr.minLat, n.mbr.maxLat, n.mbr.minLon, n.mbr.maxLon}},
                         {"entropy_bound", n.entropyBound},
                         {"keywords", toJson(n.keywordSummary)},
                         {"time_bound", toJson(n.timeBound)},
                         {"children", n.children},
                         {"subtree_object_count", n.subtreeObjectCount}});
    }
    return {{"max_fanout", tree.maxFanout}, {"min_fanout", tree.minFanout}, {"nodes", nodes}};
}

TrTree treeFromJson(const json& j, std::size_t objectCount) {
    TrTree tree;
    tree.maxFanout = j.at("max_fanout").get<int>();
    tree.minFanout = j.at("min_fanout").get<int>();
    tree.objectLeaf.assign(objectCount, kNoNode);
    for (const auto& e : j.at("nodes")) {
        TrTreeNode n;
        n.id = e.at("id").get<NodeId>();
        const auto kind = e.at("kind").get<std::string>();
        if (kind != "leaf" && kind != "internal") {
            throw DataError("tree.json: unknown node kind '" + kind + "'");
        }
        n.kind = kind == "leaf" ? NodeKind::Leaf : NodeKind::Internal;
        n.level = e.at("level").get<int>();
        n.parent = e.at("parent").get<NodeId>();
        const auto& m = e.at("mbr");
        n.mbr = {m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>(), m.at(3).get<double>()};
        n.entropyBound = e.at("entropy_bound").get<double>();
        n.keywordSummary = weightsFromJson(e.at("keywords"));
        n.timeBound = vectorFromJson(e.at("time_bound"));
        n.children = e.at("children").get<std::vector<std::int32_t>>();
        n.subtreeObjectCount = e.at("subtree_object_count").get<std::int32_t>();
        if (n.isLeaf()) {
            for (const auto o : n.children) {
                if (o < 0 || static_cast<std::size_t>(o) >= objectCount) {
                    throw DataError("tree.json: node " + std::to_string(n.id) + " references a missing object");
                }
                tree.objectLeaf[static_cast<std::size_t>(o)] = n.id;
            }
        }
        tree.nodes.push_back(std::move(n));
    }
    return tree;
}

void putU32(std::ostream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.put(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
}

std::uint32_t getU32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char*>(b.data()), 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

std::string fileHash(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw DataError(file.string() + ": cannot open file");
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void writeEmbeddings(const fs::path& file, const EmbeddingMatrix& vectors) {
    std::ofstream out(file, std::ios::binary);
    out.write("NEMB", 4);
    putU32(out, kEmbeddingFormatVersion);
    putU32(out, static_cast<std::uint32_t>(vectors.rows()));
    putU32(out, static_cast<std::uint32_t>(vectors.cols()));
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
        for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
            std::uint64_t bits = 0;
            const double v = vectors(i, j);
            std::memcpy(&bits, &v, sizeof bits);
            for (int b = 0; b < 8; ++b) {
                out.put(static_cast<char>((bits >> (8 * b)) & 0xFFu));
            }
        }
    }
    if (!out) {
        throw DataError("failed writing " + file.string());
    }
}

EmbeddingMatrix readEmbeddings(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw DataError(file.string() + ": cannot open file");
    }
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "NEMB", 4) != 0) {
        throw DataError(file.string() + ": bad magic");
    }
    const std::uint32_t version = getU32(in);
    const std::uint32_t n = getU32(in);
    const std::uint32_t d = getU32(in);
    if (!in || version != kEmbeddingFormatVersion) {
        throw DataError(file.string() + ": unsupported header");
    }
    EmbeddingMatrix m(n, d);
    std::array<unsigned char, 8> b{};
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < d; ++j) {
            if (!in.read(reinterpret_cast<char*>(b.data()), 8)) {
                throw DataError(file.string() + ": truncated");
            }
            std::uint64_t bits = 0;
            for (int k = 7; k >= 0; --k) {
                bits = (bits << 8) | b[static_cast<std::size_t>(k)];
            }
            double v = 0.0;
            std::memcpy(&v, &bits, sizeof v);
            m(i, j) = v;
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw DataError(file.string() + ": trailing bytes");
    }
    return m;
}

void saveIndex(const NetrIndex& index, const fs::path& dir, const std::map<std::string, std::string>& inputHashes,
               const json& queryDefaults) {
    fs::create_directories(dir);
    writeJson(dir / "objects.json", corpusToJson(index.corpus));
    writeJson(dir / "tree.json", treeToJson(index.tree));
    writeEmbeddings(dir / "embeddings.bin", index.social.embeddings);

    json neighbors = json::object();
    json blocks = json::object();
    for (std::size_t u = 0; u < index.users.size(); ++u) {
        json list = json::array();
        for (const UserIndex n : index.social.neighbors[u]) {
            list.push_back(index.users[static_cast<std::size_t>(n)]);
        }
        neighbors[index.users[u]] = list;

        const auto& block = index.social.blocks[u];
        json objects = json::array();
        for (const auto& [o, c] : block.objectCounts) {
            objects.push_back({index.corpus.objects[static_cast<std::size_t>(o)].id, c});
        }
        json nodes = json::array();
        for (const auto& [n, c] : block.nodeCounts) {
            nodes.push_back({n, c});
        }
        blocks[index.users[u]] = {{"objects", objects}, {"nodes", nodes}};
    }
    writeJson(dir / "neighbors.json", neighbors);
    writeJson(dir / "blocks.json", blocks);

    const auto& p = index.params;
    json manifest;
    manifest["format"] = "netr-index";
    manifest["version"] = kIndexFormatVersion;
    manifest["parameters"] = {{"intervals", p.intervalCount},
                              {"fanout", p.fanout},
                              {"dim", p.social.line.dim},
                              {"epochs", p.social.line.epochs},
                              {"neg_samples", p.social.line.negSamples},
                              {"lr0", p.social.line.lr0},
                              {"seed", p.social.line.seed},
                              {"eps_km", p.social.dbscan.epsKm},
                              {"eps_hours", p.social.dbscan.epsHours},
                              {"min_pts", p.social.dbscan.minPts},
                              {"min_checkins", p.social.minCheckins}};
    manifest["query_defaults"] = queryDefaults;
    manifest["inputs"] = inputHashes;
    manifest["counts"] = {{"objects", index.corpus.objects.size()},
                          {"users", index.users.size()},
                          {"nodes", index.tree.size()},
                          {"height", index.tree.height()}};
    json artifacts = json::object();
    for (const char* name : kArtifacts) {
        artifacts[name] = fileHash(dir / name);
    }
    manifest["artifacts"] = artifacts;
    writeJson(dir / "manifest.json", manifest, 2);
}

json readManifest(const fs::path& dir) { return readJson(dir / "manifest.json"); }

NetrIndex loadIndex(const fs::path& dir) {
    const json manifest = readManifest(dir);
    try {
        if (manifest.at("format") != "netr-index" || manifest.at("version").get<int>() != kIndexFormatVersion) {
            throw DataError(dir.string() + ": unsupported index format");
        }
        for (const char* name : kArtifacts) {
            if (fileHash(dir / name) != manifest.at("artifacts").at(name).get<std::string>()) {
                throw DataError(dir.string() + ": " + name + " does not match its manifest hash");
            }
        }

        NetrIndex index;
        const auto& p = manifest.at("parameters");
        index.params.intervalCount = p.at("intervals").get<int>();
        index.params.fanout = p.at("fanout").get<int>();
        index.params.social.line.dim = p.at("dim").get<int>();
        index.params.social.line.epochs = p.at("epochs").get<int>();
        index.params.social.line.negSamples = p.at("neg_samples").get<int>();
        index.params.social.line.lr0 = p.at("lr0").get<double>();
        index.params.social.line.seed = p.at("seed").get<std::uint64_t>();
        index.params.social.dbscan.epsKm = p.at("eps_km").get<double>();
        index.params.social.dbscan.epsHours = p.at("eps_hours").get<double>();
        index.params.social.dbscan.minPts = p.at("min_pts").get<int>();
        index.params.social.minCheckins = p.at("min_checkins").get<int>();

        index.corpus = corpusFromJson(readJson(dir / "objects.json"));
        index.tree = treeFromJson(readJson(dir / "tree.json"), index.corpus.objects.size());
        validateTree(index.tree, index.corpus);
        index.social.embeddings = readEmbeddings(dir / "embeddings.bin");

        const json neighbors = readJson(dir / "neighbors.json");
        for (const auto& [user, list] : neighbors.items()) {
            index.users.push_back(user);
        }
        std::sort(index.users.begin(), index.users.end(), [](const auto& a, const auto& b) { return idLess(a, b); });
        if (static_cast<std::size_t>(index.social.embeddings.rows()) != index.users.size()) {
            throw DataError(dir.string() + ": embeddings.bin row count does not match the user list");
        }
        auto userIndex = [&](const std::string& id) {
            const auto u = index.findUser(id);
            if (!u) {
                throw DataError(dir.string() + ": unknown user id '" + id + "'");
            }
            return *u;
        };
        index.social.neighbors.resize(index.users.size());
        index.social.blocks.resize(index.users.size());
        for (std::size_t u = 0; u < index.users.size(); ++u) {
            for (const auto& n : neighbors.at(index.users[u])) {
                index.social.neighbors[u].push_back(userIndex(n.get<std::string>()));
            }
        }
        const json blocks = readJson(dir / "blocks.json");
        for (const auto& [user, block] : blocks.items()) {
            auto& b = index.social.blocks[static_cast<std::size_t>(userIndex(user))];
            for (const auto& e : block.at("objects")) {
                const auto o = index.corpus.findObject(e.at(0).get<std::string>());
                if (!o) {
                    throw DataError(dir.string() + ": blocks.json references unknown object");
                }
                b.objectCounts.emplace_back(*o, e.at(1).get<int>());
            }
            for (const auto& e : block.at("nodes")) {
                b.nodeCounts.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<int>());
            }
            std::sort(b.objectCounts.begin(), b.objectCounts.end());
            std::sort(b.nodeCounts.begin(), b.nodeCounts.end());
        }
        return index;
    } catch (const json::exception& e) {
        throw DataError(dir.string() + ": malformed index bundle: " + e.what());
    }
}

} // namespace netr
