#include "netr/geo.hpp"

#include <cmath>
#include <numbers>

namespace netr {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Latitude (degrees) in [lo, hi] on meridian `lonDeg` closest to q.
double closestLatitudeOnMeridian(const GeoPoint& q, double lonDeg, double lo, double hi) {
    // cos(d) = A sin(phi) + B cos(phi) = C cos(phi - phi0); maximise over [lo, hi].
    const double phiQ = q.lat * kDegToRad;
    const double dLon = (lonDeg - q.lon) * kDegToRad;
    const double a = std::sin(phiQ);
    const double b = std::cos(phiQ) * std::cos(dLon);
    auto closeness = [&](double latDeg) {
        const double phi = latDeg * kDegToRad;
        return a * std::sin(phi) + b * std::cos(phi);
    };

    double best = lo;
    double bestVal = closeness(lo);
    if (const double v = closeness(hi); v > bestVal) {
        best = hi;
        bestVal = v;
    }
    if (a != 0.0 || b != 0.0) {
        const double peak = std::atan2(a, b) / kDegToRad;
        if (peak > lo && peak < hi && closeness(peak) > bestVal) {
            best = peak;
        }
    }
    return best;
}

} // namespace

bool isValid(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

double haversineKm(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double sinDLat = std::sin((phi2 - phi1) / 2);
    const double sinDLon = std::sin((b.lon - a.lon) * kDegToRad / 2);
    const double h = sinDLat * sinDLat + std::cos(phi1) * std::cos(phi2) * sinDLon * sinDLon;
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

double minDistanceKm(const GeoPoint& q, const Mbr& box) {
    if (q.lon >= box.minLon && q.lon <= box.maxLon) {
        return haversineKm(q, {std::clamp(q.lat, box.minLat, box.maxLat), q.lon});
    }
    double best = std::numeric_limits<double>::infinity();
    for (const double edge : {box.minLon, box.maxLon}) {
        const double lat = closestLatitudeOnMeridian(q, edge, box.minLat, box.maxLat);
        best = std::min(best, haversineKm(q, {lat, edge}));
    }
    return best;
}

} // namespace netr
