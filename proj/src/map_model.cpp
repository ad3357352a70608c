#include "fedmap/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "fedmap/error.hpp"
#include "json.hpp"

namespace fedmap {

using nlohmann::json;

const MapNode* MapDocument::find_node(std::string_view id) const {
  auto it = node_index_.find(std::string(id));
  return it == node_index_.end() ? nullptr : &nodes[it->second];
}

const MapWay* MapDocument::find_way(std::string_view id) const {
  auto it = way_index_.find(std::string(id));
  return it == way_index_.end() ? nullptr : &ways[it->second];
}

bool MapDocument::same_content(const MapDocument& other) const {
  return map_id == other.map_id && frame == other.frame &&
         address_prefix == other.address_prefix && boundary == other.boundary &&
         nodes == other.nodes && ways == other.ways && relations == other.relations;
}

namespace {

bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void check_relation_cycles(const MapDocument& doc) {
  std::unordered_map<std::string, const MapRelation*> by_id;
  for (const MapRelation& r : doc.relations) by_id.emplace(r.id, &r);
  // 0 = unvisited, 1 = on stack, 2 = done
  std::unordered_map<std::string, int> state;
  std::function<void(const MapRelation&)> visit = [&](const MapRelation& r) {
    state[r.id] = 1;
    for (const RelationMember& m : r.members) {
      auto it = by_id.find(m.ref);
      if (it == by_id.end()) continue;
      const int s = state[m.ref];
      if (s == 1) {
        throw IntegrityError("relation cycle through '" + r.id + "' and '" + m.ref + "'");
      }
      if (s == 0) visit(*it->second);
    }
    state[r.id] = 2;
  };
  for (const MapRelation& r : doc.relations) {
    if (state[r.id] == 0) visit(r);
  }
}

}  // namespace

void validate_map_document(MapDocument& doc) {
  doc.warnings.clear();
  doc.node_index_.clear();
  doc.way_index_.clear();

  if (doc.map_id.empty()) throw IntegrityError("map_id must be non-empty");
  if (doc.frame.frame_id.empty()) throw IntegrityError("frame_id must be non-empty");
  if (doc.frame.is_geo() && doc.frame.anchor) {
    throw IntegrityError("the geo frame cannot carry an anchor");
  }
  if (doc.frame.anchor && !(doc.frame.anchor->uncertainty_m >= 0.0 &&
                            std::isfinite(doc.frame.anchor->uncertainty_m))) {
    throw IntegrityError("anchor uncertainty must be finite and >= 0");
  }

  for (const Point2& v : doc.boundary) {
    if (!finite(v)) throw IntegrityError("boundary vertex is not finite");
  }
  if (!is_simple_polygon(doc.boundary)) {
    throw IntegrityError("boundary of '" + doc.map_id + "' is not a simple polygon");
  }

  std::unordered_set<std::string> ids;
  auto claim = [&](const std::string& id, std::string_view kind) {
    if (id.empty()) throw IntegrityError(std::string(kind) + " with empty id");
    if (!ids.insert(id).second) throw IntegrityError("duplicate element id '" + id + "'");
  };

  for (std::size_t i = 0; i < doc.nodes.size(); ++i) {
    const MapNode& n = doc.nodes[i];
    claim(n.id, "node");
    if (!finite(n.position)) throw IntegrityError("node '" + n.id + "' has non-finite position");
    if (doc.frame.is_geo() && (n.position.y < -90.0 || n.position.y > 90.0 ||
                               n.position.x < -180.0 || n.position.x > 180.0)) {
      throw IntegrityError("node '" + n.id + "' lies outside geographic range");
    }
    doc.node_index_.emplace(n.id, i);
  }

  std::unordered_set<std::string> in_way;
  for (std::size_t i = 0; i < doc.ways.size(); ++i) {
    const MapWay& w = doc.ways[i];
    claim(w.id, "way");
    if (w.node_ids.size() < 2) throw IntegrityError("way '" + w.id + "' has fewer than 2 nodes");
    for (std::size_t k = 0; k < w.node_ids.size(); ++k) {
      const std::string& ref = w.node_ids[k];
      if (!doc.node_index_.contains(ref)) {
        throw IntegrityError("way '" + w.id + "' references missing node '" + ref + "'");
      }
      if (k > 0 && w.node_ids[k - 1] == ref) {
        throw IntegrityError("way '" + w.id + "' repeats node '" + ref + "' consecutively");
      }
      in_way.insert(ref);
    }
    doc.way_index_.emplace(w.id, i);
  }

  for (const MapRelation& r : doc.relations) claim(r.id, "relation");
  for (const MapRelation& r : doc.relations) {
    for (const RelationMember& m : r.members) {
      if (!ids.contains(m.ref)) {
        throw IntegrityError("relation '" + r.id + "' references missing element '" + m.ref + "'");
      }
    }
  }
  check_relation_cycles(doc);

  for (const MapNode& n : doc.nodes) {
    if (n.is_portal && !in_way.contains(n.id)) {
      throw IntegrityError("portal node '" + n.id + "' is not part of any way");
    }
    if (!zone_contains(doc, n.position)) {
      doc.warnings.push_back("node '" + n.id + "' lies outside the boundary of '" + doc.map_id +
                             "'");
    }
  }
}

namespace {

template <typename T>
T field(const json& obj, const char* key, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string(where) + ": missing key '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(where) + ": key '" + key + "' has the wrong type");
  }
}

const json& array_field(const json& obj, const char* key, std::string_view where, bool required) {
  static const json kEmpty = json::array();
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw ParseError(std::string(where) + ": missing key '" + key + "'");
    return kEmpty;
  }
  if (!it->is_array()) throw ParseError(std::string(where) + ": '" + key + "' must be an array");
  return *it;
}

Tags parse_tags(const json& obj, std::string_view where) {
  Tags tags;
  auto it = obj.find("tags");
  if (it == obj.end() || it->is_null()) return tags;
  if (!it->is_object()) throw ParseError(std::string(where) + ": tags must be an object");
  for (auto& [k, v] : it->items()) {
    if (!v.is_string()) {
      throw ParseError(std::string(where) + ": tag '" + k + "' must be a string");
    }
    tags.emplace(k, v.get<std::string>());
  }
  return tags;
}

Point2 parse_xy_pair(const json& v, std::string_view where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(std::string(where) + ": expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

MapDocument parse_document(const json& j) {
  if (!j.is_object()) throw ParseError("map document must be a JSON object");
  MapDocument doc;
  doc.map_id = field<std::string>(j, "map_id", "document");
  doc.address_prefix = j.contains("address_prefix")
                           ? field<std::string>(j, "address_prefix", "document")
                           : std::string{};

  const json& frame = j.contains("frame") ? j.at("frame") : throw ParseError("missing 'frame'");
  if (!frame.is_object()) throw ParseError("frame must be an object");
  doc.frame.frame_id = field<std::string>(frame, "frame_id", "frame");
  if (auto a = frame.find("anchor"); a != frame.end() && !a->is_null()) {
    if (!a->is_object()) throw ParseError("frame.anchor must be an object");
    const double lat = field<double>(*a, "lat", "anchor");
    const double lon = field<double>(*a, "lon", "anchor");
    FrameAnchor anchor;
    try {
      anchor.position = GeoPoint(lat, lon);
    } catch (const ContractViolation& e) {
      throw ParseError(std::string("anchor: ") + e.what());
    }
    anchor.uncertainty_m = a->contains("uncertainty_m")
                               ? field<double>(*a, "uncertainty_m", "anchor")
                               : 0.0;
    doc.frame.anchor = anchor;
  }

  for (const json& v : array_field(j, "boundary", "document", true)) {
    doc.boundary.push_back(parse_xy_pair(v, "boundary"));
  }
  if (doc.boundary.size() > 3 && doc.boundary.front() == doc.boundary.back()) {
    doc.boundary.pop_back();
  }

  for (const json& n : array_field(j, "nodes", "document", true)) {
    if (!n.is_object()) throw ParseError("node entries must be objects");
    MapNode node;
    node.id = field<std::string>(n, "id", "node");
    const std::string where = "node '" + node.id + "'";
    node.position = {field<double>(n, "x", where), field<double>(n, "y", where)};
    node.tags = parse_tags(n, where);
    if (n.contains("portal")) node.is_portal = field<bool>(n, "portal", where);
    doc.nodes.push_back(std::move(node));
  }

  for (const json& w : array_field(j, "ways", "document", false)) {
    if (!w.is_object()) throw ParseError("way entries must be objects");
    MapWay way;
    way.id = field<std::string>(w, "id", "way");
    const std::string where = "way '" + way.id + "'";
    way.node_ids = field<std::vector<std::string>>(w, "nodes", where);
    way.tags = parse_tags(w, where);
    doc.ways.push_back(std::move(way));
  }

  for (const json& r : array_field(j, "relations", "document", false)) {
    if (!r.is_object()) throw ParseError("relation entries must be objects");
    MapRelation rel;
    rel.id = field<std::string>(r, "id", "relation");
    const std::string where = "relation '" + rel.id + "'";
    for (const json& m : array_field(r, "members", where, true)) {
      if (!m.is_object()) throw ParseError(where + ": members must be objects");
      rel.members.push_back({field<std::string>(m, "ref", where),
                             m.contains("role") ? field<std::string>(m, "role", where) : ""});
    }
    rel.tags = parse_tags(r, where);
    doc.relations.push_back(std::move(rel));
  }
  return doc;
}

}  // namespace

MapDocument load_map_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  MapDocument doc = parse_document(j);
  validate_map_document(doc);
  return doc;
}

MapDocument load_map_document_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open map document '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_map_document(ss.str());
}

std::string serialize_map_document(const MapDocument& doc, int indent) {
  nlohmann::ordered_json j;
  j["map_id"] = doc.map_id;
  nlohmann::ordered_json frame;
  frame["frame_id"] = doc.frame.frame_id;
  if (doc.frame.anchor) {
    frame["anchor"] = {{"lat", doc.frame.anchor->position.lat()},
                       {"lon", doc.frame.anchor->position.lon()},
                       {"uncertainty_m", doc.frame.anchor->uncertainty_m}};
  }
  j["frame"] = frame;
  j["address_prefix"] = doc.address_prefix;
  j["boundary"] = nlohmann::ordered_json::array();
  for (const Point2& v : doc.boundary) j["boundary"].push_back({v.x, v.y});
  j["nodes"] = nlohmann::ordered_json::array();
  for (const MapNode& n : doc.nodes) {
    nlohmann::ordered_json node;
    node["id"] = n.id;
    node["x"] = n.position.x;
    node["y"] = n.position.y;
    node["tags"] = n.tags;
    if (n.is_portal) node["portal"] = true;
    j["nodes"].push_back(std::move(node));
  }
  j["ways"] = nlohmann::ordered_json::array();
  for (const MapWay& w : doc.ways) {
    j["ways"].push_back({{"id", w.id}, {"nodes", w.node_ids}, {"tags", w.tags}});
  }
  j["relations"] = nlohmann::ordered_json::array();
  for (const MapRelation& r : doc.relations) {
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (const RelationMember& m : r.members) members.push_back({{"ref", m.ref}, {"role", m.role}});
    j["relations"].push_back({{"id", r.id}, {"members", members}, {"tags", r.tags}});
  }
  return j.dump(indent);
}

bool zone_contains(const MapDocument& doc, const Point2& p) {
  return polygon_contains(doc.boundary, p, doc.boundary_eps());
}

Polygon registration_polygon(const MapDocument& doc) {
  if (doc.frame.is_geo()) return doc.boundary;
  if (!doc.frame.anchor) {
    throw IntegrityError("local frame '" + doc.frame.frame_id + "' of '" + doc.map_id +
                         "' has no anchor and cannot be registered");
  }
  const FrameAnchor& a = *doc.frame.anchor;
  const double radius_m = std::max(a.uncertainty_m, 1.0);
  const double dlat = radius_m / kMetersPerDegree;
  const double cos_lat = std::cos(a.position.lat() * std::numbers::pi / 180.0);
  const double dlon = std::min(179.0, radius_m / (kMetersPerDegree * std::max(cos_lat, 1e-9)));
  const double lat_lo = std::max(-90.0, a.position.lat() - dlat);
  const double lat_hi = std::min(90.0, a.position.lat() + dlat);
  const double lon_lo = std::max(-180.0, a.position.lon() - dlon);
  const double lon_hi = std::min(180.0, a.position.lon() + dlon);
  return {{lon_lo, lat_lo}, {lon_hi, lat_lo}, {lon_hi, lat_hi}, {lon_lo, lat_hi}};
}

std::optional<GeoPoint> coarse_geo_position(const MapDocument& doc, const Point2& p) {
  if (doc.frame.is_geo()) return GeoPoint(p.y, p.x);
  if (doc.frame.anchor) return doc.frame.anchor->position;
  return std::nullopt;
}

}  // namespace fedmap
