#include "fedmap/wire.hpp"

#include "fedmap/error.hpp"

namespace fedmap::wire {

json point_json(const Point2& p) { return json::array({p.x, p.y}); }

Point2 point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json geo_json(const GeoPoint& g) { return {{"lat", g.lat()}, {"lon", g.lon()}}; }

GeoPoint geo_from(const json& j) { return GeoPoint(j.at("lat").get<double>(), j.at("lon").get<double>()); }

json endpoint_json(const Endpoint& e) {
  if (const auto* id = std::get_if<std::string>(&e)) return *id;
  const QueryPoint& q = std::get<QueryPoint>(e);
  json j{{"x", q.p.x}, {"y", q.p.y}};
  if (q.geo) j["frame"] = "geo";
  return j;
}

Endpoint endpoint_from(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (!j.is_object()) throw ParseError("endpoint must be a node id or {x, y}");
  return QueryPoint{{j.at("x").get<double>(), j.at("y").get<double>()},
                    j.value("frame", std::string()) == "geo"};
}

json path_json(const Path& p) {
  return {{"nodes", p.nodes}, {"cost_cm", p.cost}, {"cost_m", p.cost_m()}};
}

Path path_from(const json& j) {
  return {j.at("nodes").get<std::vector<std::string>>(), j.at("cost_cm").get<Cost>()};
}

json geocode_json(const GeocodeHit& h, const std::optional<GeoPoint>& coarse) {
  json j{{"node_id", h.node_id},
         {"position", point_json(h.position)},
         {"full_address", h.full_address},
         {"exact", h.exact},
         {"extra_components", h.extra_components}};
  j["geo"] = coarse ? geo_json(*coarse) : json(nullptr);
  return j;
}

json reverse_json(const ReverseHit& h) {
  return {{"node_id", h.node_id}, {"position", point_json(h.position)}, {"distance_m", h.distance_m}};
}

json search_json(const SearchHit& h) {
  return {{"node_id", h.node_id},
          {"position", point_json(h.position)},
          {"score", h.score},
          {"distance_m", h.distance_m},
          {"matched", h.matched}};
}

SearchHit search_from(const json& j) {
  return {j.at("node_id").get<std::string>(), point_from(j.at("position")),
          j.at("score").get<double>(), j.at("distance_m").get<double>(), j.at("matched").get<int>()};
}

json portal_costs_json(const PortalCosts& pc) {
  json portals = json::object();
  for (const auto& [id, c] : pc.portals) {
    json e = path_json(c.path);
    e["position"] = point_json(c.position);
    e["geo"] = c.geo ? geo_json(*c.geo) : json(nullptr);
    portals[id] = std::move(e);
  }
  return {{"entry", {{"node_id", pc.entry.node_id}, {"snap_distance_m", pc.entry.snap_distance_m}}},
          {"portals", std::move(portals)}};
}

PortalCosts portal_costs_from(const json& j) {
  PortalCosts pc;
  pc.entry.node_id = j.at("entry").at("node_id").get<std::string>();
  pc.entry.snap_distance_m = j.at("entry").at("snap_distance_m").get<double>();
  for (const auto& [id, e] : j.at("portals").items()) {
    std::optional<GeoPoint> geo;
    if (e.contains("geo") && !e["geo"].is_null()) geo = geo_from(e["geo"]);
    pc.portals.emplace(id, PortalCost{path_from(e), point_from(e.at("position")), geo});
  }
  return pc;
}

json pose_json(const PoseEstimate& p) {
  json j{{"frame_id", p.frame_id}, {"position", point_json(p.position)}, {"confidence", p.confidence}};
  j["heading_deg"] = p.heading_deg ? json(*p.heading_deg) : json(nullptr);
  return j;
}

PoseEstimate pose_from(const json& j) {
  PoseEstimate p;
  p.frame_id = j.at("frame_id").get<std::string>();
  p.position = point_from(j.at("position"));
  p.confidence = j.at("confidence").get<double>();
  if (j.contains("heading_deg") && !j["heading_deg"].is_null()) p.heading_deg = j["heading_deg"].get<double>();
  return p;
}

json feature_json(const TileFeature& f) {
  json geometry = json::array();
  for (const auto& line : f.geometry) {
    json l = json::array();
    for (const Point2& p : line) l.push_back(point_json(p));
    geometry.push_back(std::move(l));
  }
  return {{"id", f.id},
          {"kind", f.is_way ? "way" : "node"},
          {"geometry", std::move(geometry)},
          {"tags", f.tags},
          {"map_id", f.map_id}};
}

TileFeature feature_from(const json& j) {
  TileFeature f;
  f.id = j.at("id").get<std::string>();
  f.is_way = j.at("kind").get<std::string>() == "way";
  for (const auto& line : j.at("geometry")) {
    std::vector<Point2> l;
    for (const auto& p : line) l.push_back(point_from(p));
    f.geometry.push_back(std::move(l));
  }
  f.tags = j.at("tags").get<Tags>();
  f.map_id = j.at("map_id").get<std::string>();
  return f;
}

json tile_json(const VectorTile& t) {
  json features = json::array();
  for (const TileFeature& f : t.features) features.push_back(feature_json(f));
  return {{"cell", t.cell.token()}, {"features", std::move(features)}};
}

}  // namespace fedmap::wire
