#include "fedmap/federation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "fedmap/error.hpp"
#include "fedmap/wire.hpp"

namespace fedmap {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxAreaCells = 1024;

std::vector<DiscoveredServer> merge_discovered(std::vector<DiscoveredServer> all, ServiceKind service) {
  std::map<std::string, DiscoveredServer> best;
  for (DiscoveredServer& d : all) {
    if (!d.record.offers(service)) continue;
    auto [it, inserted] = best.try_emplace(d.record.server_id, d);
    if (!inserted && d.level > it->second.level) it->second = d;
  }
  std::vector<DiscoveredServer> out;
  for (auto& [id, d] : best) out.push_back(std::move(d));
  std::sort(out.begin(), out.end(), [](const DiscoveredServer& a, const DiscoveredServer& b) {
    if (a.level != b.level) return a.level > b.level;
    if (a.record.priority != b.record.priority) return a.record.priority < b.record.priority;
    return a.record.server_id < b.record.server_id;
  });
  return out;
}

std::vector<std::string> split_address(const std::string& address) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = address.find('/', start);
    parts.push_back(address.substr(start, slash - start));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return parts;
}

std::vector<FedGeocodeHit> geocode_hits(const ServerReply& r, const std::string& server_id) {
  std::vector<FedGeocodeHit> out;
  for (const json& h : r.result) {
    FedGeocodeHit hit;
    hit.server_id = server_id;
    hit.map_id = r.map_id;
    hit.frame_id = r.frame_id;
    hit.hit = {h.at("node_id").get<std::string>(), wire::point_from(h.at("position")),
               h.at("full_address").get<std::string>(), h.at("exact").get<bool>(),
               h.at("extra_components").get<int>()};
    if (!h.at("geo").is_null()) hit.geo = wire::geo_from(h["geo"]);
    out.push_back(std::move(hit));
  }
  return out;
}

}  // namespace

std::vector<CellId> cells_in_rect(const Rect& area, int level) {
  const double n = std::ldexp(1.0, level);
  const double dlat = 180.0 / n;
  const double dlon = 360.0 / n;
  const auto index = [&](double v, double origin, double step) {
    return std::clamp(static_cast<long long>(std::floor((v - origin) / step)), 0LL,
                      static_cast<long long>(n) - 1);
  };
  // One extra ring absorbs rounding at cell edges.
  const long long i0 = std::max(0LL, index(area.y_min, -90.0, dlat) - 1);
  const long long i1 = std::min(static_cast<long long>(n) - 1, index(area.y_max, -90.0, dlat) + 1);
  const long long j0 = std::max(0LL, index(area.x_min, -180.0, dlon) - 1);
  const long long j1 = std::min(static_cast<long long>(n) - 1, index(area.x_max, -180.0, dlon) + 1);
  std::vector<CellId> out;
  for (long long i = i0; i <= i1; ++i) {
    for (long long j = j0; j <= j1; ++j) {
      out.push_back(cell_from_point(GeoPoint(-90.0 + (i + 0.5) * dlat, -180.0 + (j + 0.5) * dlon), level));
    }
  }
  return out;
}

std::vector<CellId> cells_along_segment(const GeoPoint& a, const GeoPoint& b, int level) {
  const double n = std::ldexp(1.0, level);
  const double step = std::min(180.0 / n, 360.0 / n) / 2.0;
  const double dx = b.lon() - a.lon();
  const double dy = b.lat() - a.lat();
  const int samples = static_cast<int>(std::ceil(std::hypot(dx, dy) / step));
  std::set<CellId> cells{cell_from_point(a, level), cell_from_point(b, level)};
  for (int k = 1; k < samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    cells.insert(cell_from_point(GeoPoint(a.lat() + t * dy, a.lon() + t * dx), level));
  }
  return {cells.begin(), cells.end()};
}

std::vector<FedSearchHit> merge_search_hits(std::vector<FedSearchHit> hits, std::size_t limit) {
  std::sort(hits.begin(), hits.end(), [](const FedSearchHit& a, const FedSearchHit& b) {
    if (a.hit.score != b.hit.score) return a.hit.score > b.hit.score;
    if (a.map_id != b.map_id) return a.map_id < b.map_id;
    return a.hit.node_id < b.hit.node_id;
  });
  std::set<std::string> seen;
  std::vector<FedSearchHit> out;
  for (FedSearchHit& h : hits) {
    if (out.size() == limit) break;
    if (seen.insert(h.hit.node_id).second) out.push_back(std::move(h));
  }
  return out;
}

void compose_tile(ComposedTiles& into, const std::string& frame_id,
                  const std::vector<TileFeature>& features) {
  auto& list = frame_id == kGeoFrame ? into.geo_features : into.local_features[frame_id];
  for (const TileFeature& f : features) {
    auto it = std::lower_bound(list.begin(), list.end(), f, [](const TileFeature& a, const TileFeature& b) {
      return std::tie(a.map_id, a.id) < std::tie(b.map_id, b.id);
    });
    if (it == list.end() || it->map_id != f.map_id || it->id != f.id) {
      it = list.insert(it, f);
    } else {
      for (const auto& line : f.geometry) {
        if (std::find(it->geometry.begin(), it->geometry.end(), line) == it->geometry.end()) {
          it->geometry.push_back(line);
        }
      }
    }
    std::sort(it->geometry.begin(), it->geometry.end());
  }
}

FederationClient::FederationClient(std::shared_ptr<Resolver> resolver,
                                   std::shared_ptr<MapServerTransport> transport, ClientOptions options)
    : resolver_(std::move(resolver)), transport_(std::move(transport)), options_(std::move(options)) {
  if (!resolver_ || !transport_) throw ContractViolation("client needs a resolver and a transport");
}

std::vector<DiscoveredServer> FederationClient::discover_servers(const GeoPoint& p, int level,
                                                                 ServiceKind service) {
  return merge_discovered(discover(*resolver_, p, level), service);
}

std::vector<DiscoveredServer> FederationClient::discover_servers(const Rect& area, int level,
                                                                 ServiceKind service) {
  std::vector<DiscoveredServer> all;
  for (const CellId& c : cells_in_rect(area, level)) {
    auto found = discover_cell(*resolver_, c);
    all.insert(all.end(), found.begin(), found.end());
  }
  return merge_discovered(std::move(all), service);
}

void FederationClient::reset_session() {
  std::lock_guard lock(cache_mutex_);
  portal_cache_.clear();
}

GeocodeResult FederationClient::federated_geocode(const std::string& address) {
  if (address.empty()) throw ContractViolation("empty address");
  if (!options_.root) throw RootUnavailable("no root server configured");
  GeocodeResult out;
  const std::vector<std::string> parts = split_address(address);
  std::vector<FedGeocodeHit> hits;
  std::optional<GeoPoint> coarse;
  for (std::size_t k = parts.size(); k >= 1 && !coarse; --k) {
    std::string prefix = parts[0];
    for (std::size_t i = 1; i < k; ++i) prefix += "/" + parts[i];
    std::vector<FedGeocodeHit> root_hits;
    try {
      root_hits = geocode_hits(call_server(*transport_, *options_.root, "/v1/geocode", {{"address", prefix}},
                                           options_.credentials),
                               options_.root->server_id);
    } catch (const Error& e) {
      throw RootUnavailable(std::string("root geocode failed: ") + e.what());
    }
    if (root_hits.empty()) continue;
    out.resolved_prefix = prefix;
    for (const auto& h : root_hits) {
      if (h.geo) {
        coarse = h.geo;
        break;
      }
    }
    if (k == parts.size()) hits = root_hits;
    if (!coarse) break;
  }
  if (coarse) {
    for (const DiscoveredServer& d : discover_servers(*coarse, options_.registration_level, ServiceKind::geocode)) {
      try {
        auto found = geocode_hits(call_server(*transport_, d.record, "/v1/geocode", {{"address", address}},
                                              options_.credentials),
                                  d.record.server_id);
        hits.insert(hits.end(), found.begin(), found.end());
      } catch (const Error& e) {
        out.warnings.push_back(d.record.server_id + ": " + e.what());
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const FedGeocodeHit& a, const FedGeocodeHit& b) {
    if (a.hit.exact != b.hit.exact) return a.hit.exact;
    if (a.hit.extra_components != b.hit.extra_components) return a.hit.extra_components < b.hit.extra_components;
    return std::tie(a.map_id, a.hit.node_id) < std::tie(b.map_id, b.hit.node_id);
  });
  std::set<std::pair<std::string, std::string>> seen;
  for (FedGeocodeHit& h : hits) {
    if (seen.emplace(h.map_id, h.hit.node_id).second) out.hits.push_back(std::move(h));
  }
  return out;
}

SearchResult FederationClient::federated_search(const std::vector<std::string>& keywords, const GeoPoint& p,
                                                double radius_m) {
  if (keywords.empty()) throw ContractViolation("search needs at least one keyword");
  const double dlat = radius_m / kMetersPerDegree;
  const double dlon = radius_m / (kMetersPerDegree * std::max(1e-6, std::cos(p.lat() * std::acos(-1.0) / 180.0)));
  const Rect area{p.lon() - dlon, std::max(-90.0, p.lat() - dlat), p.lon() + dlon, std::min(90.0, p.lat() + dlat)};
  SearchResult out;
  std::vector<DiscoveredServer> servers;
  if (cells_in_rect(area, options_.registration_level).size() <= kMaxAreaCells) {
    servers = discover_servers(area, options_.registration_level, ServiceKind::search);
  } else {
    servers = discover_servers(p, options_.registration_level, ServiceKind::search);
  }
  if (servers.empty()) throw AllServersFailed("no search-capable server covers the query");
  const json body{{"keywords", keywords}, {"x", p.lon()}, {"y", p.lat()}, {"radius_m", radius_m}, {"frame", "geo"}};
  std::vector<FedSearchHit> hits;
  for (const DiscoveredServer& d : servers) {
    try {
      const ServerReply r = call_server(*transport_, d.record, "/v1/search", body, options_.credentials);
      for (const json& h : r.result) hits.push_back({d.record.server_id, r.map_id, r.frame_id, wire::search_from(h)});
    } catch (const Error& e) {
      out.failures.push_back(d.record.server_id + ": " + e.what());
    }
  }
  if (out.failures.size() == servers.size()) throw AllServersFailed("every search server failed");
  out.hits = merge_search_hits(std::move(hits), options_.search_limit);
  return out;
}

std::optional<PortalCosts> FederationClient::cached_portal_costs(const MapServerRecord& server,
                                                                 const Endpoint& entry,
                                                                 std::vector<std::string>& warnings) {
  const auto key = std::make_pair(server.server_id, wire::endpoint_json(entry).dump());
  {
    std::lock_guard lock(cache_mutex_);
    auto it = portal_cache_.find(key);
    if (it != portal_cache_.end()) return it->second;
  }
  std::optional<PortalCosts> value;
  try {
    ++portal_cost_calls_;
    const ServerReply r = call_server(*transport_, server, "/v1/portal_costs",
                                      {{"entry", wire::endpoint_json(entry)}}, options_.credentials);
    value = wire::portal_costs_from(r.result);
    std::lock_guard lock(cache_mutex_);
    server_frames_[server.server_id] = {r.map_id, r.frame_id};
  } catch (const UnknownNode&) {
  } catch (const SnapFailed&) {
  } catch (const Error& e) {
    warnings.push_back(server.server_id + ": " + e.what());
  }
  std::lock_guard lock(cache_mutex_);
  portal_cache_.emplace(key, value);
  return value;
}

StitchedPath FederationClient::federated_route(const RouteEnd& src_in, const RouteEnd& dst_in) {
  StitchedPath out;
  const int level = options_.registration_level;

  struct Terminal {
    Endpoint endpoint;
    GeoPoint geo;
  };
  const auto terminal = [&](const RouteEnd& e) -> Terminal {
    if (const auto* g = std::get_if<GeoPoint>(&e)) return {QueryPoint{to_point(*g), true}, *g};
    if (const auto* n = std::get_if<NodeRef>(&e)) return {n->node_id, n->position};
    const std::string& address = std::get<std::string>(e);
    const GeocodeResult g = federated_geocode(address);
    for (const FedGeocodeHit& h : g.hits) {
      if (h.geo) return {h.hit.node_id, *h.geo};
    }
    throw GeocodeFailed("cannot geocode '" + address + "'");
  };
  const Terminal src = terminal(src_in);
  const Terminal dst = terminal(dst_in);

  std::map<std::string, MapServerRecord> known;
  const auto learn = [&](const std::vector<DiscoveredServer>& found) {
    std::vector<std::string> ids;
    for (const DiscoveredServer& d : found) {
      known.emplace(d.record.server_id, d.record);
      ids.push_back(d.record.server_id);
    }
    return ids;
  };
  std::vector<std::string> along;
  for (const CellId& c : cells_along_segment(src.geo, dst.geo, level)) {
    for (const std::string& id : learn(merge_discovered(discover_cell(*resolver_, c), ServiceKind::route))) {
      along.push_back(id);
    }
  }

  // Entry points of the terminals on every server that knows them. A point
  // terminal only enters through the servers where it snaps closest.
  using Entries = std::map<std::string, PortalCosts>;
  const auto entries_for = [&](const Terminal& t) {
    std::set<std::string> candidates(along.begin(), along.end());
    for (const std::string& id : learn(discover_servers(t.geo, level, ServiceKind::route))) candidates.insert(id);
    Entries found;
    for (const std::string& id : candidates) {
      if (auto pc = cached_portal_costs(known.at(id), t.endpoint, out.warnings)) found.emplace(id, std::move(*pc));
    }
    if (std::holds_alternative<QueryPoint>(t.endpoint) && !found.empty()) {
      double best = INFINITY;
      for (const auto& [id, pc] : found) best = std::min(best, pc.entry.snap_distance_m);
      std::erase_if(found, [&](const auto& kv) { return kv.second.entry.snap_distance_m > best; });
    }
    return found;
  };
  const Entries src_entries = entries_for(src);
  const Entries dst_entries = entries_for(dst);
  if (src_entries.empty() || dst_entries.empty()) {
    throw NoRoute(std::string("no route-capable server knows the ") + (src_entries.empty() ? "source" : "destination"));
  }

  // Meta-graph Dijkstra, expanded lazily as portals settle. Labels compare by
  // (cost, hops, vertex sequence).
  std::vector<std::string> keys{"@src", "@dst"};
  std::map<std::string, int> index{{"@src", 0}, {"@dst", 1}};
  std::map<int, std::optional<GeoPoint>> portal_geo;
  std::map<int, std::set<std::string>> portal_servers;
  const auto vertex = [&](const std::string& portal) {
    auto [it, inserted] = index.emplace("p:" + portal, static_cast<int>(keys.size()));
    if (inserted) keys.push_back(portal);
    return it->second;
  };
  struct Label {
    Cost cost = -1;
    int hops = 0;
    int prev = -1;
    RouteLeg leg;
  };
  std::vector<Label> labels(2);
  std::vector<char> done(2, 0);
  const auto grow = [&] {
    labels.resize(keys.size());
    done.resize(keys.size(), 0);
  };
  const auto sequence = [&](int v) {
    std::vector<std::string> seq;
    for (; v >= 0; v = labels[v].prev) seq.push_back(keys[v]);
    std::reverse(seq.begin(), seq.end());
    return seq;
  };
  using Item = std::tuple<Cost, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  labels[0].cost = 0;
  heap.emplace(0, 0, 0);

  const auto relax = [&](int u, int v, const std::string& server_id, const std::string& map_id,
                         const std::string& frame_id, Path path) {
    if (v == u) return;
    grow();
    if (done[v]) return;
    const Cost c = labels[u].cost + path.cost;
    const int h = labels[u].hops + 1;
    Label& l = labels[v];
    bool better = l.cost < 0 || c < l.cost || (c == l.cost && h < l.hops);
    if (!better && c == l.cost && h == l.hops && l.prev != u) {
      std::vector<std::string> via = sequence(u);
      via.push_back(keys[v]);
      better = path_less(via, sequence(v));
    }
    if (!better) return;
    l.cost = c;
    l.hops = h;
    l.prev = u;
    l.leg = {server_id, map_id, frame_id, std::move(path)};
    heap.emplace(c, h, v);
  };

  struct ServerFrame {
    std::string map_id, frame_id;
  };
  // Every server with an edge has answered portal_costs, so its frame is known.
  const auto frame_of = [&](const std::string& server_id) -> ServerFrame {
    std::lock_guard lock(cache_mutex_);
    const auto& f = server_frames_.at(server_id);
    return {f.first, f.second};
  };

  const auto add_portal_edges = [&](int u, const std::string& server_id, const PortalCosts& pc) {
    const ServerFrame f = frame_of(server_id);
    for (const auto& [pid, cost] : pc.portals) {
      const int v = vertex(pid);
      grow();
      portal_servers[v].insert(server_id);
      if (!portal_geo.contains(v)) portal_geo[v] = cost.geo;
      relax(u, v, server_id, f.map_id, f.frame_id, cost.path);
    }
  };
  const auto add_exit_edge = [&](int u, const std::string& portal, const std::string& server_id) {
    auto it = dst_entries.find(server_id);
    if (it == dst_entries.end()) return;
    auto p = it->second.portals.find(portal);
    if (p == it->second.portals.end()) return;
    Path back = p->second.path;
    std::reverse(back.nodes.begin(), back.nodes.end());
    const ServerFrame f = frame_of(server_id);
    relax(u, 1, server_id, f.map_id, f.frame_id, std::move(back));
  };

  while (!heap.empty()) {
    const auto [c, h, u] = heap.top();
    heap.pop();
    if (done[u] || c != labels[u].cost || h != labels[u].hops) continue;
    done[u] = 1;
    if (u == 1) break;
    if (u == 0) {
      for (const auto& [server_id, pc] : src_entries) {
        add_portal_edges(0, server_id, pc);
        if (auto it = dst_entries.find(server_id); it != dst_entries.end()) {
          try {
            const ServerReply r = call_server(*transport_, known.at(server_id), "/v1/route",
                                              {{"src", pc.entry.node_id}, {"dst", it->second.entry.node_id}},
                                              options_.credentials);
            relax(0, 1, server_id, r.map_id, r.frame_id, wire::path_from(r.result));
          } catch (const Unreachable&) {
          } catch (const Error& e) {
            out.warnings.push_back(server_id + ": " + e.what());
          }
        }
      }
      continue;
    }
    const std::string portal = keys[u];
    std::set<std::string> holders = portal_servers[u];
    if (const auto& g = portal_geo[u]) {
      for (const std::string& id : learn(discover_servers(*g, level, ServiceKind::route))) holders.insert(id);
    }
    for (const std::string& server_id : holders) {
      auto pc = cached_portal_costs(known.at(server_id), portal, out.warnings);
      if (!pc) continue;
      add_portal_edges(u, server_id, *pc);
      add_exit_edge(u, portal, server_id);
    }
  }
  if (labels[1].cost < 0) throw NoRoute("the portal graph does not connect source and destination");

  std::vector<RouteLeg> legs;
  for (int v = 1; v > 0; v = labels[v].prev) legs.push_back(labels[v].leg);
  std::reverse(legs.begin(), legs.end());
  for (RouteLeg& leg : legs) {
    if (!out.legs.empty() && out.legs.back().server_id == leg.server_id) {
      RouteLeg& last = out.legs.back();
      last.path.nodes.insert(last.path.nodes.end(), leg.path.nodes.begin() + 1, leg.path.nodes.end());
      last.path.cost += leg.path.cost;
    } else {
      out.legs.push_back(std::move(leg));
    }
  }
  if (out.legs.size() > 1) {
    std::erase_if(out.legs, [](const RouteLeg& l) { return l.path.nodes.size() == 1 && l.path.cost == 0; });
  }
  out.total_cost = labels[1].cost;
  return out;
}

LocalizedPose FederationClient::federated_localize(const std::map<std::string, double>& cues,
                                                   const GeoPoint& coarse, const LocalPrior* prior, Millis now) {
  if (cues.empty()) throw ContractViolation("localize needs at least one cue");
  std::vector<LocalizedPose> candidates;
  for (const DiscoveredServer& d : discover_servers(coarse, options_.registration_level, ServiceKind::localize)) {
    try {
      const ServerReply r = call_server(*transport_, d.record, "/v1/localize", {{"beacon_rssi", cues}},
                                        options_.credentials);
      candidates.push_back({wire::pose_from(r.result), d.record.server_id, r.map_id, d.level});
    } catch (const Error&) {
    }
  }
  if (prior && prior->last) {
    const double elapsed_s = std::max<double>(0.0, static_cast<double>((now - prior->timestamp).count()) / 1000.0);
    const double reach = prior->max_speed_mps * elapsed_s;
    const PoseEstimate& last = prior->last->pose;
    std::erase_if(candidates, [&](const LocalizedPose& c) {
      if (c.pose.frame_id != last.frame_id) return false;
      return frame_distance_m(c.pose.position, last.position, last.frame_id == kGeoFrame) > reach;
    });
  }
  if (candidates.empty()) throw NoCandidates("no localization candidate survived");
  return *std::min_element(candidates.begin(), candidates.end(), [](const LocalizedPose& a, const LocalizedPose& b) {
    if (a.pose.confidence != b.pose.confidence) return a.pose.confidence > b.pose.confidence;
    if (a.level != b.level) return a.level > b.level;
    return a.map_id < b.map_id;
  });
}

ComposedTiles FederationClient::federated_tiles(const std::vector<CellId>& viewport) {
  if (viewport.empty()) throw ContractViolation("viewport needs at least one cell");
  ComposedTiles out;
  for (const CellId& cell : viewport) {
    for (const DiscoveredServer& d : merge_discovered(discover_cell(*resolver_, cell), ServiceKind::tile)) {
      try {
        const ServerReply r = get_server(*transport_, d.record, "/v1/tile/" + cell.token(), options_.credentials);
        std::vector<TileFeature> features;
        for (const json& f : r.result.at("features")) features.push_back(wire::feature_from(f));
        compose_tile(out, r.frame_id, features);
      } catch (const Error& e) {
        out.failures[cell.token()].push_back(d.record.server_id + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace fedmap
