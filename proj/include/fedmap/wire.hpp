#pragma once

#include "fedmap/map_service.hpp"
#include "json.hpp"

namespace fedmap::wire {

using nlohmann::json;

json point_json(const Point2& p);
Point2 point_from(const json& j);

json endpoint_json(const Endpoint& e);
Endpoint endpoint_from(const json& j);

json path_json(const Path& p);
Path path_from(const json& j);

json geocode_json(const GeocodeHit& h, const std::optional<GeoPoint>& coarse);
json reverse_json(const ReverseHit& h);
json search_json(const SearchHit& h);
SearchHit search_from(const json& j);
json portal_costs_json(const PortalCosts& pc);
PortalCosts portal_costs_from(const json& j);
json pose_json(const PoseEstimate& p);
PoseEstimate pose_from(const json& j);
json feature_json(const TileFeature& f);
TileFeature feature_from(const json& j);
json tile_json(const VectorTile& t);

json geo_json(const GeoPoint& g);
GeoPoint geo_from(const json& j);

}  // namespace fedmap::wire
