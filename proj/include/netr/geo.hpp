#pragma once

#include <algorithm>
#include <limits>

namespace netr {

inline constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
    double lat = 0.0; ///< degrees, [-90, 90]
    double lon = 0.0; ///< degrees, [-180, 180]

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// True when both coordinates are finite and inside their degree ranges.
bool isValid(const GeoPoint& p);

/// Great-circle distance in kilometres (haversine form, stable for short
/// distances).
double haversineKm(const GeoPoint& a, const GeoPoint& b);

/// Axis-aligned latitude/longitude rectangle. Rectangles never wrap the
/// antimeridian.
struct Mbr {
    double minLat = std::numeric_limits<double>::infinity();
    double maxLat = -std::numeric_limits<double>::infinity();
    double minLon = std::numeric_limits<double>::infinity();
    double maxLon = -std::numeric_limits<double>::infinity();

    static Mbr of(const GeoPoint& p) { return {p.lat, p.lat, p.lon, p.lon}; }

    bool empty() const { return minLat > maxLat || minLon > maxLon; }

    void expand(const GeoPoint& p) {
        minLat = std::min(minLat, p.lat);
        maxLat = std::max(maxLat, p.lat);
        minLon = std::min(minLon, p.lon);
        maxLon = std::max(maxLon, p.lon);
    }

    void expand(const Mbr& o) {
        minLat = std::min(minLat, o.minLat);
        maxLat = std::max(maxLat, o.maxLat);
        minLon = std::min(minLon, o.minLon);
        maxLon = std::max(maxLon, o.maxLon);
    }

    bool contains(const GeoPoint& p) const {
        return p.lat >= minLat && p.lat <= maxLat && p.lon >= minLon && p.lon <= maxLon;
    }

    bool contains(const Mbr& o) const {
        return o.minLat >= minLat && o.maxLat <= maxLat && o.minLon >= minLon &&
               o.maxLon <= maxLon;
    }

    GeoPoint center() const { return {(minLat + maxLat) / 2, (minLon + maxLon) / 2}; }

    friend bool operator==(const Mbr&, const Mbr&) = default;
};

/// Smallest great-circle distance (km) from `q` to any point of `box`.
///
/// When q's longitude falls inside the box this is the meridian distance to
/// the clamped latitude. Otherwise the nearest point lies on one of the two
/// bounding meridians, and it is not in general at q's latitude (meridians
/// converge towards the poles), so each edge is minimised analytically.
/// The result never exceeds haversineKm(q, p) for any p inside the box.
double minDistanceKm(const GeoPoint& q, const Mbr& box);

} // namespace netr
