#pragma once

#include "feedql/atom.hpp"

#include <variant>

namespace feedql::geo {

inline constexpr double kEarthRadiusKm = 6371.0088;

/// Great-circle distance on a sphere of mean Earth radius.
double haversine_km(LatLon a, LatLon b);

struct Radius {
    LatLon center;
    double km = 0;

    friend bool operator==(const Radius&, const Radius&) = default;
};

/// Southwest/northeast corners; a west edge east of the east edge wraps the
/// antimeridian.
struct Box {
    LatLon southwest;
    LatLon northeast;

    friend bool operator==(const Box&, const Box&) = default;
};

using Region = std::variant<Radius, Box>;

bool contains(const Region& region, LatLon point);

} // namespace feedql::geo
