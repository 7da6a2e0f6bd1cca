#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace netr {

inline constexpr int kDefaultIntervalCount = 24;

/// Wall-clock timestamp in the dataset's local time. Only the hour of day
/// feeds any score; the date is kept for ordering and validation.
struct LocalDateTime {
    int year = 1970;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;

    double hourOfDay() const { return hour + minute / 60.0 + second / 3600.0; }

    friend auto operator<=>(const LocalDateTime&, const LocalDateTime&) = default;
};

/// Parses `YYYY-MM-DDTHH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM]` (a space may replace
/// the `T`). A trailing UTC offset is accepted and ignored: the written
/// wall-clock time is already local. Returns nullopt on any malformation.
std::optional<LocalDateTime> parseIsoLocal(std::string_view text);

std::string formatIso(const LocalDateTime& t);

/// One slot of an even partition of the day.
struct TimeInterval {
    int index = 0;
    int count = kDefaultIntervalCount;
};

/// Interval holding `hour` (0..23) when the day is cut into `intervalCount`
/// even slots. `intervalCount` must be in [1, 24].
int intervalOfHour(int hour, int intervalCount);

inline TimeInterval toInterval(const LocalDateTime& t, int intervalCount) {
    return {intervalOfHour(t.hour, intervalCount), intervalCount};
}

/// Per-interval check-in probability of one object.
struct TimeDistribution {
    Eigen::VectorXd prob;

    /// Largest per-interval probability; 0 for an object without check-ins.
    double peak() const { return prob.size() == 0 ? 0.0 : prob.maxCoeff(); }
    bool hasCheckins() const { return peak() > 0.0; }

    /// Visiting time score of one interval: prob[interval] / peak, or 0 for an
    /// object without check-ins.
    double score(int interval) const {
        const double p = peak();
        return p > 0.0 ? prob[interval] / p : 0.0;
    }
};

/// prob[tau] = (#check-ins in tau) / (#check-ins). All zeros for no input.
/// Throws UsageError if intervalCount is outside [1, 24] or an hour is
/// outside [0, 23].
TimeDistribution buildTimeDistribution(std::span<const int> checkinHours, int intervalCount);

} // namespace netr
