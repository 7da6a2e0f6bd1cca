#include "netr/time.hpp"

#include "netr/errors.hpp"

#include <charconv>
#include <cstdio>

namespace netr {

namespace {

bool readInt(std::string_view text, std::size_t pos, std::size_t width, int& out) {
    if (pos + width > text.size()) {
        return false;
    }
    const char* first = text.data() + pos;
    const char* last = first + width;
    for (const char* c = first; c != last; ++c) {
        if (*c < '0' || *c > '9') {
            return false;
        }
    }
    return std::from_chars(first, last, out).ec == std::errc{};
}

bool isLeap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int daysInMonth(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && isLeap(y) ? 29 : kDays[m - 1];
}

bool validOffset(std::string_view rest) {
    if (rest.empty() || rest == "Z") {
        return true;
    }
    if (rest.size() != 6 || (rest[0] != '+' && rest[0] != '-') || rest[3] != ':') {
        return false;
    }
    int hh = 0;
    int mm = 0;
    return readInt(rest, 1, 2, hh) && readInt(rest, 4, 2, mm) && hh <= 23 && mm <= 59;
}

} // namespace

std::optional<LocalDateTime> parseIsoLocal(std::string_view text) {
    LocalDateTime t;
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':') {
        return std::nullopt;
    }
    if (!readInt(text, 0, 4, t.year) || !readInt(text, 5, 2, t.month) || !readInt(text, 8, 2, t.day) ||
        !readInt(text, 11, 2, t.hour) || !readInt(text, 14, 2, t.minute)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        if (!readInt(text, pos + 1, 2, t.second)) {
            return std::nullopt;
        }
        pos += 3;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            const std::size_t digits = pos;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
                ++pos;
            }
            if (pos == digits) {
                return std::nullopt;
            }
        }
    }
    if (!validOffset(text.substr(pos))) {
        return std::nullopt;
    }
    if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > daysInMonth(t.year, t.month) ||
        t.hour > 23 || t.minute > 59 || t.second > 59) {
        return std::nullopt;
    }
    return t;
}

std::string formatIso(const LocalDateTime& t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", t.year, t.month, t.day, t.hour,
                  t.minute, t.second);
    return buf;
}

int intervalOfHour(int hour, int intervalCount) {
    if (intervalCount < 1 || intervalCount > 24) {
        throw UsageError("interval count must be in [1, 24], got " + std::to_string(intervalCount));
    }
    if (hour < 0 || hour > 23) {
        throw UsageError("hour of day out of range: " + std::to_string(hour));
    }
    return hour * intervalCount / 24;
}

TimeDistribution buildTimeDistribution(std::span<const int> checkinHours, int intervalCount) {
    intervalOfHour(0, intervalCount); // validates intervalCount
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(intervalCount);
    for (const int hour : checkinHours) {
        counts[intervalOfHour(hour, intervalCount)] += 1.0;
    }
    if (!checkinHours.empty()) {
        counts /= static_cast<double>(checkinHours.size());
    }
    return {std::move(counts)};
}

} // namespace netr
