#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "citynet/error.hpp"

namespace citynet {

inline constexpr double kEarthRadiusKm = 6371.0;

struct LatLon {
    double lat = 0.0;  // degrees
    double lon = 0.0;  // degrees

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline bool in_range(const LatLon& p) {
    return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

/// Haversine distance in km.
inline double great_circle(const LatLon& a, const LatLon& b) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double dlat = (b.lat - a.lat) * rad;
    const double dlon = (b.lon - a.lon) * rad;
    const double s = std::sin(dlat / 2.0);
    const double t = std::sin(dlon / 2.0);
    double h = s * s + std::cos(a.lat * rad) * std::cos(b.lat * rad) * t * t;
    h = std::min(1.0, std::max(0.0, h));
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

/// Mean great-circle distance from each place to the places' centroid, with the
/// centroid taken as the plain mean of latitudes and of longitudes.
inline double geographic_span(std::span<const LatLon> places) {
    if (places.empty()) throw InvalidArgument("geographic span of an empty place set");
    LatLon c;
    for (const auto& p : places) {
        c.lat += p.lat;
        c.lon += p.lon;
    }
    c.lat /= static_cast<double>(places.size());
    c.lon /= static_cast<double>(places.size());
    double sum = 0.0;
    for (const auto& p : places) sum += great_circle(p, c);
    return sum / static_cast<double>(places.size());
}

}  // namespace citynet
