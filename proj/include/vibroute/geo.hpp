#pragma once

#include <cmath>

namespace vibroute {

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const GeoPoint&) const = default;
};

constexpr double kEarthRadiusM = 6371000.0;

/// Great-circle distance in meters (haversine).
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
    const double lat1 = a.lat * kDegToRad;
    const double lat2 = b.lat * kDegToRad;
    const double dlat = (b.lat - a.lat) * kDegToRad;
    const double dlon = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace vibroute
