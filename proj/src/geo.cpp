#include "feedql/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace feedql::geo {

namespace {

constexpr double radians(double deg) { return deg * std::numbers::pi / 180.0; }

} // namespace

double haversine_km(LatLon a, LatLon b)
{
    double dlat = radians(b.lat - a.lat);
    double dlon = radians(b.lon - a.lon);
    double s1 = std::sin(dlat / 2.0);
    double s2 = std::sin(dlon / 2.0);
    double h = s1 * s1 + std::cos(radians(a.lat)) * std::cos(radians(b.lat)) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

bool contains(const Region& region, LatLon point)
{
    if (const auto* r = std::get_if<Radius>(&region))
        return haversine_km(r->center, point) <= r->km;
    const auto& box = std::get<Box>(region);
    if (point.lat < box.southwest.lat || point.lat > box.northeast.lat)
        return false;
    if (box.southwest.lon <= box.northeast.lon)
        return point.lon >= box.southwest.lon && point.lon <= box.northeast.lon;
    return point.lon >= box.southwest.lon || point.lon <= box.northeast.lon;
}

} // namespace feedql::geo
