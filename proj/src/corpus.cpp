#include "netr/corpus.hpp"

#include "netr/csv.hpp"
#include "netr/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <tuple>
#include <unordered_set>

namespace netr {

namespace {

bool isDigits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view stripZeros(std::string_view s) {
    const auto pos = s.find_first_not_of('0');
    return pos == std::string_view::npos ? std::string_view{} : s.substr(pos);
}

struct IdLessFn {
    bool operator()(std::string_view a, std::string_view b) const { return idLess(a, b); }
};

template <class Sorted>
std::optional<std::int32_t> findSorted(const Sorted& ids, std::string_view id) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id,
                                     [](const auto& elem, std::string_view key) { return idLess(elem, key); });
    if (it == ids.end() || *it != id) {
        return std::nullopt;
    }
    return static_cast<std::int32_t>(it - ids.begin());
}

double parseDouble(const CsvReader& csv, std::string_view field, std::string_view text) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        csv.fail(field, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::pair<std::string, int>> parseKeywords(const CsvReader& csv, std::string_view text) {
    std::vector<std::pair<std::string, int>> out;
    if (text.empty()) {
        return out;
    }
    for (const auto& token : splitOn(text, '|')) {
        if (token.empty()) {
            csv.fail("keywords", "empty keyword token");
        }
        const auto colon = token.rfind(':');
        if (colon == std::string::npos) {
            out.emplace_back(token, 1);
            continue;
        }
        int count = 0;
        const std::string_view digits = std::string_view(token).substr(colon + 1);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
        if (colon == 0 || ec != std::errc{} || ptr != digits.data() + digits.size() || count < 1) {
            csv.fail("keywords", "bad token '" + token + "' (expected word[:count], count >= 1)");
        }
        out.emplace_back(token.substr(0, colon), count);
    }
    return out;
}

} // namespace

bool idLess(std::string_view a, std::string_view b) {
    const bool da = isDigits(a);
    const bool db = isDigits(b);
    if (da != db) {
        return da;
    }
    if (da) {
        const auto sa = stripZeros(a);
        const auto sb = stripZeros(b);
        if (sa.size() != sb.size()) {
            return sa.size() < sb.size();
        }
        if (sa != sb) {
            return sa < sb;
        }
    }
    return a < b;
}

double weightOf(const std::vector<KeywordWeight>& weights, TermId term) {
    const auto it = std::lower_bound(weights.begin(), weights.end(), term,
                                     [](const KeywordWeight& kw, TermId t) { return kw.term < t; });
    return it != weights.end() && it->term == term ? it->weight : 0.0;
}

std::optional<TermId> Corpus::findTerm(std::string_view keyword) const {
    const auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), keyword);
    if (it == vocabulary.end() || *it != keyword) {
        return std::nullopt;
    }
    return static_cast<TermId>(it - vocabulary.begin());
}

std::optional<ObjectIndex> Corpus::findObject(std::string_view id) const {
    const auto it = std::lower_bound(objects.begin(), objects.end(), id,
                                     [](const SpatialObject& o, std::string_view key) { return idLess(o.id, key); });
    if (it == objects.end() || it->id != id) {
        return std::nullopt;
    }
    return static_cast<ObjectIndex>(it - objects.begin());
}

std::optional<UserIndex> Dataset::findUser(std::string_view id) const { return findSorted(users, id); }

Dataset makeDataset(std::vector<RawObject> objects, std::vector<RawCheckin> checkins,
                    std::vector<RawFriendship> friendships, int intervalCount) {
    intervalOfHour(0, intervalCount);
    Dataset ds;
    Corpus& corpus = ds.corpus;
    corpus.intervalCount = intervalCount;

    std::sort(objects.begin(), objects.end(),
              [](const RawObject& x, const RawObject& y) { return idLess(x.id, y.id); });
    std::set<std::string> categories;
    std::set<std::string> vocabulary;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const RawObject& o = objects[i];
        if (o.id.empty()) {
            throw DataError("object with empty id");
        }
        if (i > 0 && objects[i - 1].id == o.id) {
            throw DataError("duplicate object id '" + o.id + "'");
        }
        if (!isValid(o.location)) {
            throw DataError("object '" + o.id + "': location out of range");
        }
        if (o.category.empty()) {
            throw DataError("object '" + o.id + "': empty category");
        }
        categories.insert(o.category);
        for (const auto& [word, count] : o.keywords) {
            if (word.empty() || count < 1) {
                throw DataError("object '" + o.id + "': bad keyword entry");
            }
            vocabulary.insert(word);
        }
    }
    corpus.categories.assign(categories.begin(), categories.end());
    corpus.vocabulary.assign(vocabulary.begin(), vocabulary.end());
    corpus.docFreq.assign(corpus.vocabulary.size(), 0);

    corpus.objects.reserve(objects.size());
    for (auto& raw : objects) {
        SpatialObject o;
        o.id = std::move(raw.id);
        o.location = raw.location;
        o.category = static_cast<CategoryId>(
            std::lower_bound(corpus.categories.begin(), corpus.categories.end(), raw.category) -
            corpus.categories.begin());
        std::map<TermId, int> counts;
        for (const auto& [word, count] : raw.keywords) {
            counts[*corpus.findTerm(word)] += count;
        }
        o.termCounts.assign(counts.begin(), counts.end());
        for (const auto& [term, count] : o.termCounts) {
            ++corpus.docFreq[term];
        }
        corpus.objects.push_back(std::move(o));
    }

    std::set<std::string, IdLessFn> users;
    for (const auto& c : checkins) {
        users.insert(c.user);
    }
    for (const auto& f : friendships) {
        users.insert(f.a);
        users.insert(f.b);
    }
    if (users.count("")) {
        throw DataError("empty user id");
    }
    ds.users.assign(users.begin(), users.end());

    ds.checkins.reserve(checkins.size());
    for (const auto& c : checkins) {
        const auto obj = corpus.findObject(c.object);
        if (!obj) {
            throw DataError("check-in references unknown object id '" + c.object + "'");
        }
        ds.checkins.push_back({*ds.findUser(c.user), *obj, c.time});
    }
    std::stable_sort(ds.checkins.begin(), ds.checkins.end(), [](const CheckInRecord& x, const CheckInRecord& y) {
        return std::tie(x.object, x.time, x.user) < std::tie(y.object, y.time, y.user);
    });

    for (const auto& f : friendships) {
        if (f.a == f.b) {
            throw DataError("self-friendship for user '" + f.a + "'");
        }
        UserIndex a = *ds.findUser(f.a);
        UserIndex b = *ds.findUser(f.b);
        ds.friends.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(ds.friends.begin(), ds.friends.end());
    ds.friends.erase(std::unique(ds.friends.begin(), ds.friends.end()), ds.friends.end());

    std::vector<std::vector<int>> hours(corpus.objects.size());
    for (const auto& c : ds.checkins) {
        hours[c.object].push_back(c.time.hour);
    }
    for (std::size_t i = 0; i < corpus.objects.size(); ++i) {
        corpus.objects[i].timeDist = buildTimeDistribution(hours[i], intervalCount);
        corpus.objects[i].totalCheckins = static_cast<int>(hours[i].size());
    }
    return ds;
}

Dataset ingest(const std::filesystem::path& objectsFile, const std::filesystem::path& checkinsFile,
               const std::filesystem::path& friendsFile, int intervalCount) {
    std::vector<RawObject> objects;
    std::unordered_set<std::string> objectIds;
    std::vector<std::string> f;
    {
        CsvReader csv(objectsFile, {"id", "lat", "lon", "category", "keywords"});
        while (csv.next(f)) {
            RawObject o;
            o.id = f[0];
            if (o.id.empty()) {
                csv.fail("id", "empty");
            }
            if (!objectIds.insert(o.id).second) {
                csv.fail("id", "duplicate object id '" + o.id + "'");
            }
            o.location.lat = parseDouble(csv, "lat", f[1]);
            if (o.location.lat < -90.0 || o.location.lat > 90.0) {
                csv.fail("lat", "out of range [-90, 90]: " + f[1]);
            }
            o.location.lon = parseDouble(csv, "lon", f[2]);
            if (o.location.lon < -180.0 || o.location.lon > 180.0) {
                csv.fail("lon", "out of range [-180, 180]: " + f[2]);
            }
            o.category = f[3];
            if (o.category.empty()) {
                csv.fail("category", "empty");
            }
            o.keywords = parseKeywords(csv, f[4]);
            objects.push_back(std::move(o));
        }
    }

    std::vector<RawCheckin> checkins;
    {
        CsvReader csv(checkinsFile, {"user_id", "object_id", "timestamp"});
        while (csv.next(f)) {
            if (f[0].empty()) {
                csv.fail("user_id", "empty");
            }
            if (!objectIds.count(f[1])) {
                csv.fail("object_id", "unknown object id '" + f[1] + "'");
            }
            const auto t = parseIsoLocal(f[2]);
            if (!t) {
                csv.fail("timestamp", "not an ISO-8601 local date-time: '" + f[2] + "'");
            }
            checkins.push_back({f[0], f[1], *t});
        }
    }

    std::vector<RawFriendship> friends;
    {
        CsvReader csv(friendsFile, {"user_a", "user_b"});
        while (csv.next(f)) {
            if (f[0].empty()) {
                csv.fail("user_a", "empty");
            }
            if (f[1].empty()) {
                csv.fail("user_b", "empty");
            }
            if (f[0] == f[1]) {
                csv.fail("user_b", "self-friendship for user '" + f[0] + "'");
            }
            friends.push_back({f[0], f[1]});
        }
    }
    return makeDataset(std::move(objects), std::move(checkins), std::move(friends), intervalCount);
}

void computeTfIdf(Corpus& corpus) {
    const double n = static_cast<double>(corpus.documentCount());
    corpus.phiMax = 0.0;
    for (auto& o : corpus.objects) {
        o.keywords.clear();
        o.keywords.reserve(o.termCounts.size());
        for (const auto& [term, tf] : o.termCounts) {
            const double idf = std::log(n / corpus.docFreq[term]);
            const double w = tf * std::max(idf, 0.0);
            o.keywords.push_back({term, w});
            corpus.phiMax = std::max(corpus.phiMax, w);
        }
    }
}

void writeObjectsCsv(const std::filesystem::path& file, const std::vector<RawObject>& objects) {
    std::ofstream out(file);
    out.precision(17);
    out << "id,lat,lon,category,keywords\n";
    for (const auto& o : objects) {
        std::string kw;
        for (const auto& [word, count] : o.keywords) {
            kw += (kw.empty() ? "" : "|") + word + (count == 1 ? "" : ":" + std::to_string(count));
        }
        out << csvEscape(o.id) << ',' << o.location.lat << ',' << o.location.lon << ','
            << csvEscape(o.category) << ',' << csvEscape(kw) << '\n';
    }
    if (!out) {
        throw DataError("failed writing " + file.string());
    }
}

void writeCheckinsCsv(const std::filesystem::path& file, const std::vector<RawCheckin>& checkins) {
    std::ofstream out(file);
    out << "user_id,object_id,timestamp\n";
    for (const auto& c : checkins) {
        out << csvEscape(c.user) << ',' << csvEscape(c.object) << ',' << formatIso(c.time) << '\n';
    }
    if (!out) {
        throw DataError("failed writing " + file.string());
    }
}

void writeFriendsCsv(const std::filesystem::path& file, const std::vector<RawFriendship>& friends) {
    std::ofstream out(file);
    out << "user_a,user_b\n";
    for (const auto& f : friends) {
        out << csvEscape(f.a) << ',' << csvEscape(f.b) << '\n';
    }
    if (!out) {
        throw DataError("failed writing " + file.string());
    }
}

} // namespace netr
