#include "fedmap/map_service.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "fedmap/error.hpp"

namespace fedmap {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

int component_count(std::string_view s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '/')) + 1;
}

}  // namespace

std::string_view auth_mode_name(AuthMode m) noexcept {
  switch (m) {
    case AuthMode::open: return "open";
    case AuthMode::user: return "user";
    case AuthMode::service: return "service";
    case AuthMode::application: return "application";
  }
  return "open";
}

std::optional<AuthMode> auth_mode_from_name(std::string_view name) noexcept {
  for (AuthMode m : {AuthMode::open, AuthMode::user, AuthMode::service, AuthMode::application}) {
    if (auth_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

void validate_policy(const AuthPolicy& p) {
  if (p.mode == AuthMode::user && p.allowed_users.empty()) {
    throw ContractViolation("user-mode policy needs at least one allowed user");
  }
  if (p.mode == AuthMode::application && p.allowed_apps.empty()) {
    throw ContractViolation("application-mode policy needs at least one allowed app");
  }
}

AuthDecision authorize(const AuthPolicy& policy, const Credentials& creds) {
  const auto user_in = [&] {
    return creds.user_token && policy.allowed_users.contains(*creds.user_token);
  };
  switch (policy.mode) {
    case AuthMode::open:
      return {};
    case AuthMode::user:
      return user_in() ? AuthDecision{} : AuthDecision{false, "user"};
    case AuthMode::service:
      return user_in() ? AuthDecision{} : AuthDecision{false, "service"};
    case AuthMode::application:
      if (creds.app_token && policy.allowed_apps.contains(*creds.app_token)) return {};
      return {false, "application"};
  }
  return {false, "unknown policy"};
}

std::set<ServiceKind> ServerConfig::services() const {
  std::set<ServiceKind> out;
  for (const auto& [s, p] : auth) out.insert(s);
  return out;
}

void validate_config(const ServerConfig& cfg) {
  if (cfg.auth.empty()) throw ContractViolation("server '" + cfg.server_id + "' advertises no service");
  for (const auto& [s, p] : cfg.auth) validate_policy(p);
  if (cfg.registration_level < 0 || cfg.registration_level > kMaxCellLevel) {
    throw LevelOutOfRange("registration level " + std::to_string(cfg.registration_level));
  }
  if (cfg.search_limit == 0) throw ContractViolation("search limit must be positive");
  for (const BeaconFingerprint& f : cfg.fingerprints) {
    if (f.rssi_by_beacon.empty()) throw ContractViolation("fingerprint without beacons");
  }
}

std::optional<std::string> full_address(const MapDocument& doc, const MapNode& n) {
  auto it = n.tags.find("addr");
  if (it == n.tags.end()) return std::nullopt;
  if (doc.address_prefix.empty()) return it->second;
  return doc.address_prefix + "/" + it->second;
}

MapService::MapService(MapDocument doc, ServerConfig cfg)
    : doc_(std::move(doc)), cfg_(std::move(cfg)), graph_(doc_) {
  validate_config(cfg_);
}

MapServerRecord MapService::record(const std::string& endpoint) const {
  MapServerRecord r;
  r.server_id = cfg_.server_id;
  r.endpoint = endpoint;
  r.services = cfg_.services();
  r.localization_techs = cfg_.localization_techs;
  r.priority = cfg_.priority;
  r.ttl_s = cfg_.ttl_s;
  return r;
}

AuthDecision MapService::authorize(ServiceKind s, const Credentials& creds) const {
  auto it = cfg_.auth.find(s);
  if (it == cfg_.auth.end()) return {false, "service not offered"};
  return fedmap::authorize(it->second, creds);
}

std::optional<GeoPoint> MapService::coarse_position(const Point2& p) const {
  return coarse_geo_position(doc_, p);
}

std::vector<GeocodeHit> MapService::geocode(const std::string& address) const {
  if (address.empty()) throw ContractViolation("empty address");
  const std::string query = lower(address);
  const int query_parts = component_count(address);
  std::vector<GeocodeHit> out;
  for (const MapNode& n : doc_.nodes) {
    const auto full = full_address(doc_, n);
    if (!full) continue;
    const std::string lf = lower(*full);
    const bool exact = *full == address;
    const bool suffix = lf.size() >= query.size() &&
                        lf.compare(lf.size() - query.size(), query.size(), query) == 0 &&
                        (lf.size() == query.size() || lf[lf.size() - query.size() - 1] == '/');
    if (!exact && !suffix) continue;
    out.push_back({n.id, n.position, *full, exact, component_count(*full) - query_parts});
  }
  std::sort(out.begin(), out.end(), [](const GeocodeHit& a, const GeocodeHit& b) {
    if (a.exact != b.exact) return a.exact;
    if (a.extra_components != b.extra_components) return a.extra_components < b.extra_components;
    return a.node_id < b.node_id;
  });
  return out;
}

std::vector<ReverseHit> MapService::reverse_geocode(const Point2& p, double radius_m) const {
  if (!(radius_m > 0)) throw ContractViolation("radius must be positive");
  std::vector<ReverseHit> out;
  for (const MapNode& n : doc_.nodes) {
    const double d = frame_distance_m(p, n.position, is_geo());
    if (d <= radius_m) out.push_back({n.id, n.position, d});
  }
  std::sort(out.begin(), out.end(), [](const ReverseHit& a, const ReverseHit& b) {
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    return a.node_id < b.node_id;
  });
  return out;
}

double MapService::distance_from(const QueryPoint& q, const Point2& node_pos) const {
  if (q.geo && !is_geo()) {
    return frame_distance_m(q.p, to_point(doc_.frame.anchor->position), true);
  }
  return frame_distance_m(q.p, node_pos, is_geo());
}

std::vector<SearchHit> MapService::search(const std::vector<std::string>& keywords,
                                          const QueryPoint& center, double radius_m) const {
  if (keywords.empty()) throw ContractViolation("search needs at least one keyword");
  if (!(radius_m >= 0)) throw ContractViolation("radius must be non-negative");
  if (center.geo && !is_geo() && !doc_.frame.anchor) return {};
  std::vector<std::string> needles;
  for (const auto& k : keywords) needles.push_back(lower(k));
  std::vector<SearchHit> out;
  for (const MapNode& n : doc_.nodes) {
    int matched = 0;
    for (const std::string& k : needles) {
      const bool hit = std::any_of(n.tags.begin(), n.tags.end(), [&](const auto& kv) {
        return lower(kv.second).find(k) != std::string::npos;
      });
      matched += hit ? 1 : 0;
    }
    if (matched == 0) continue;
    const double d = distance_from(center, n.position);
    if (d > radius_m) continue;
    out.push_back({n.id, n.position, matched / (1.0 + d), d, matched});
  }
  std::sort(out.begin(), out.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node_id < b.node_id;
  });
  if (out.size() > cfg_.search_limit) out.resize(cfg_.search_limit);
  return out;
}

SnappedEntry MapService::resolve_endpoint(const Endpoint& e) const {
  if (const auto* id = std::get_if<std::string>(&e)) {
    if (!graph_.index_of(*id)) throw UnknownNode("unknown node '" + *id + "'");
    return {*id, 0.0};
  }
  const QueryPoint& q = std::get<QueryPoint>(e);
  if (q.geo && !is_geo()) throw SnapFailed("geo point cannot snap into local frame '" + frame_id() + "'");
  const MapNode* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < doc_.nodes.size(); ++i) {
    if (!graph_.has_edges(static_cast<int>(i))) continue;
    const MapNode& n = doc_.nodes[i];
    const double d = frame_distance_m(q.p, n.position, is_geo());
    if (d < best_d || (d == best_d && best && n.id < best->id)) {
      best = &n;
      best_d = d;
    }
  }
  if (!best || best_d > kSnapRadiusM) {
    throw SnapFailed("no routable node within " + std::to_string(int(kSnapRadiusM)) + " m");
  }
  return {best->id, best_d};
}

Path MapService::route(const Endpoint& src, const Endpoint& dst) const {
  const SnappedEntry s = resolve_endpoint(src);
  const SnappedEntry d = resolve_endpoint(dst);
  const int si = *graph_.index_of(s.node_id);
  const int di = *graph_.index_of(d.node_id);
  const RouteGraph::Tree t = graph_.shortest_paths(si);
  if (!t.reached(di)) throw Unreachable("'" + d.node_id + "' is unreachable from '" + s.node_id + "'");
  return graph_.extract(t, di);
}

PortalCosts MapService::portal_costs(const Endpoint& entry) const {
  PortalCosts out;
  out.entry = resolve_endpoint(entry);
  const RouteGraph::Tree t = graph_.shortest_paths(*graph_.index_of(out.entry.node_id));
  for (std::size_t i = 0; i < doc_.nodes.size(); ++i) {
    const MapNode& n = doc_.nodes[i];
    if (!n.is_portal || !t.reached(static_cast<int>(i))) continue;
    out.portals.emplace(n.id, PortalCost{graph_.extract(t, static_cast<int>(i)), n.position,
                                         coarse_position(n.position)});
  }
  return out;
}

PoseEstimate MapService::localize(const std::map<std::string, double>& cues) const {
  if (cues.empty()) throw ContractViolation("localize needs at least one beacon reading");
  const BeaconFingerprint* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const BeaconFingerprint& f : cfg_.fingerprints) {
    const bool shares = std::any_of(cues.begin(), cues.end(), [&](const auto& kv) {
      return f.rssi_by_beacon.contains(kv.first);
    });
    if (!shares) continue;
    double sum = 0.0;
    for (const auto& [beacon, rssi] : cues) {
      auto it = f.rssi_by_beacon.find(beacon);
      const double diff = rssi - (it == f.rssi_by_beacon.end() ? kMissingRssiDbm : it->second);
      sum += diff * diff;
    }
    for (const auto& [beacon, rssi] : f.rssi_by_beacon) {
      if (cues.contains(beacon)) continue;
      const double diff = rssi - kMissingRssiDbm;
      sum += diff * diff;
    }
    const double d = std::sqrt(sum);
    if (d < best_d) {
      best = &f;
      best_d = d;
    }
  }
  if (!best) throw NoFingerprintCoverage("no fingerprint shares a beacon with the cues");
  return {frame_id(), best->position, std::nullopt, 1.0 / (1.0 + best_d)};
}

VectorTile MapService::render_tile(const CellId& cell) const {
  VectorTile tile{cell, frame_id(), {}};
  const Rect r = cell_bounds(cell).rect();
  if (!is_geo()) {
    if (!doc_.frame.anchor || !rect_intersects_polygon(r, registration_polygon(doc_))) return tile;
    for (const MapNode& n : doc_.nodes) {
      tile.features.push_back({n.id, false, {{n.position}}, n.tags, doc_.map_id});
    }
    for (const MapWay& w : doc_.ways) {
      std::vector<Point2> line;
      for (const auto& id : w.node_ids) line.push_back(doc_.find_node(id)->position);
      tile.features.push_back({w.id, true, {std::move(line)}, w.tags, doc_.map_id});
    }
    return tile;
  }
  for (const MapNode& n : doc_.nodes) {
    if (r.contains(n.position)) {
      tile.features.push_back({n.id, false, {{n.position}}, n.tags, doc_.map_id});
    }
  }
  for (const MapWay& w : doc_.ways) {
    std::vector<std::vector<Point2>> lines;
    for (std::size_t i = 0; i + 1 < w.node_ids.size(); ++i) {
      const auto piece = clip_segment(doc_.find_node(w.node_ids[i])->position,
                                      doc_.find_node(w.node_ids[i + 1])->position, r);
      if (!piece) continue;
      if (!lines.empty() && lines.back().back() == piece->first) {
        lines.back().push_back(piece->second);
      } else {
        lines.push_back({piece->first, piece->second});
      }
    }
    if (!lines.empty()) tile.features.push_back({w.id, true, std::move(lines), w.tags, doc_.map_id});
  }
  return tile;
}

}  // namespace fedmap
