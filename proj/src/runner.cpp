#include <chrono>
#include <cmath>
#include <set>

#include "fedmap/error.hpp"
#include "fedmap/harness.hpp"
#include "fedmap/wire.hpp"

namespace fedmap {

using nlohmann::json;

namespace {

GeoPoint geo_param(const json& params, const std::string& where) {
  if (!params.contains("lat") || !params.contains("lon")) throw ScenarioError(where + ": needs 'lat' and 'lon'");
  try {
    return GeoPoint(params["lat"].get<double>(), params["lon"].get<double>());
  } catch (const json::exception& e) {
    throw ScenarioError(where + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ScenarioError(where + ": " + e.what());
  }
}

template <typename T>
T param(const json& params, const std::string& key, const std::string& where) {
  if (!params.contains(key)) throw ScenarioError(where + ": missing parameter '" + key + "'");
  try {
    return params[key].get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(where + "." + key + ": " + e.what());
  }
}

std::vector<std::string> keywords_param(const json& params, const std::string& where) {
  if (params.contains("keywords") && params["keywords"].is_string()) return {params["keywords"].get<std::string>()};
  return param<std::vector<std::string>>(params, "keywords", where);
}

RouteEnd route_end(const json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (!j.is_object()) throw ScenarioError(where + ": expected an address, a point or a node reference");
  if (j.contains("node")) return NodeRef{param<std::string>(j, "node", where), geo_param(j, where)};
  return geo_param(j, where);
}

std::vector<CellId> viewport_param(const json& params, int default_level, const std::string& where) {
  std::vector<CellId> cells;
  try {
    if (params.contains("cells")) {
      for (const std::string& t : params["cells"].get<std::vector<std::string>>()) cells.push_back(CellId::from_token(t));
    } else {
      const int level = params.value("level", default_level);
      cells.push_back(cell_from_point(geo_param(params, where), level));
    }
  } catch (const json::exception& e) {
    throw ScenarioError(where + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::scenario) throw;
    throw ScenarioError(where + ": " + e.what());
  }
  if (cells.empty()) throw ScenarioError(where + ": empty viewport");
  return cells;
}

}  // namespace

json discovered_json(const std::vector<DiscoveredServer>& servers) {
  json out = json::array();
  for (const DiscoveredServer& d : servers) {
    json services = json::array();
    for (ServiceKind k : d.record.services) services.push_back(service_name(k));
    out.push_back({{"server_id", d.record.server_id}, {"level", d.level}, {"priority", d.record.priority},
                   {"services", services}});
  }
  return out;
}

json geocode_result_json(const GeocodeResult& r) {
  json hits = json::array();
  for (const FedGeocodeHit& h : r.hits) {
    hits.push_back({{"server_id", h.server_id},
                    {"map_id", h.map_id},
                    {"node_id", h.hit.node_id},
                    {"full_address", h.hit.full_address},
                    {"exact", h.hit.exact},
                    {"geo", h.geo ? wire::geo_json(*h.geo) : json(nullptr)}});
  }
  return {{"resolved_prefix", r.resolved_prefix}, {"hits", hits}, {"warnings", r.warnings}};
}

json search_result_json(const SearchResult& r) {
  json hits = json::array();
  for (const FedSearchHit& h : r.hits) {
    hits.push_back({{"server_id", h.server_id},
                    {"map_id", h.map_id},
                    {"node_id", h.hit.node_id},
                    {"score", h.hit.score},
                    {"distance_m", h.hit.distance_m}});
  }
  return {{"hits", hits}, {"failures", r.failures}};
}

json stitched_path_json(const StitchedPath& path) {
  json legs = json::array();
  for (const RouteLeg& l : path.legs) {
    legs.push_back({{"server_id", l.server_id},
                    {"map_id", l.map_id},
                    {"frame_id", l.frame_id},
                    {"nodes", l.path.nodes},
                    {"cost_cm", l.path.cost},
                    {"cost_m", l.path.cost_m()}});
  }
  return {{"legs", legs},
          {"total_cost_cm", path.total_cost},
          {"total_cost_m", path.total_cost_m()},
          {"warnings", path.warnings}};
}

json localized_pose_json(const LocalizedPose& pose) {
  return {{"server_id", pose.server_id},
          {"map_id", pose.map_id},
          {"frame_id", pose.pose.frame_id},
          {"position", wire::point_json(pose.pose.position)},
          {"confidence", pose.pose.confidence},
          {"level", pose.level}};
}

json composed_tiles_json(const ComposedTiles& t) {
  const auto summary = [](const TileFeature& f) {
    return json{{"id", f.id}, {"map_id", f.map_id}, {"kind", f.is_way ? "way" : "node"}};
  };
  json geo = json::array();
  for (const TileFeature& f : t.geo_features) geo.push_back(summary(f));
  json local = json::object();
  for (const auto& [frame, features] : t.local_features) {
    json list = json::array();
    for (const TileFeature& f : features) list.push_back(summary(f));
    local[frame] = std::move(list);
  }
  return {{"geo_features", geo}, {"local_features", local}, {"failures", t.failures}};
}

namespace {

struct Check {
  json& list;
  bool ok = true;

  void operator()(const std::string& name, const json& expected, const json& actual, bool passed) {
    list.push_back({{"check", name}, {"expected", expected}, {"actual", actual}, {"ok", passed}});
    ok = ok && passed;
  }
};

bool contains_all(const json& have, const json& want) {
  for (const json& w : want) {
    if (std::find(have.begin(), have.end(), w) == have.end()) return false;
  }
  return true;
}

/// Geometry keyed by feature id with lines from every map merged, for oracle comparison.
using FeatureKey = std::map<std::string, std::tuple<bool, Tags, std::set<std::vector<Point2>>>>;

FeatureKey by_feature_id(const std::vector<TileFeature>& features) {
  FeatureKey out;
  for (const TileFeature& f : features) {
    auto& [is_way, tags, lines] = out[f.id];
    is_way = f.is_way;
    tags = f.tags;
    lines.insert(f.geometry.begin(), f.geometry.end());
  }
  return out;
}

class Runner {
 public:
  Runner(const Scenario& s, Deployment& d, const RunOptions& opts)
      : s_(s), d_(d), opts_(opts), oracle_on_(opts.oracle || s.oracle) {
    if (oracle_on_) oracle_ = std::make_unique<OracleWorld>(d.documents());
  }

  json run() {
    json queries = json::array();
    std::size_t failed_assertions = 0, unexpected_errors = 0, oracle_diffs = 0, failed = 0;
    for (const QuerySpec& q : s_.queries) {
      if (q.advance_s > 0) d_.clock().advance(Millis{static_cast<Millis::rep>(std::llround(q.advance_s * 1000.0))});
      json entry{{"id", q.id}, {"type", q.type}};
      json assertions = json::array();
      Check check{assertions};
      json output;
      std::optional<Error> error;
      const auto start = std::chrono::steady_clock::now();
      try {
        output = execute(q);
      } catch (const Error& e) {
        if (e.code() == Errc::scenario) throw;
        error = e;
      }
      const auto elapsed = std::chrono::steady_clock::now() - start;
      if (error) {
        entry["error"] = {{"code", errc_name(error->code())}, {"reason", error->what()}};
      } else {
        entry["output"] = output;
      }
      const bool error_expected = q.expect.contains("error");
      if (error_expected) {
        const std::string want = q.expect["error"].get<std::string>();
        const std::string got = error ? std::string(errc_name(error->code())) : "";
        check("error", want, got, want == got);
      } else if (error) {
        ++unexpected_errors;
        check.ok = false;
      } else {
        evaluate(q, output, check);
      }
      if (oracle_on_ && pending_oracle_.is_object()) {
        entry["oracle"] = pending_oracle_;
        if (!pending_oracle_.value("match", true)) {
          ++oracle_diffs;
          check.ok = false;
        }
      }
      pending_oracle_ = nullptr;
      for (const json& a : assertions) {
        if (!a["ok"].get<bool>()) ++failed_assertions;
      }
      entry["assertions"] = std::move(assertions);
      entry["ok"] = check.ok;
      if (!check.ok) ++failed;
      if (opts_.timings) {
        entry["latency_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
      }
      queries.push_back(std::move(entry));
    }
    const bool ok = failed == 0;
    return {{"scenario", s_.name},
            {"oracle", oracle_on_},
            {"queries", std::move(queries)},
            {"summary",
             {{"queries", s_.queries.size()},
              {"failed_queries", failed},
              {"failed_assertions", failed_assertions},
              {"unexpected_errors", unexpected_errors},
              {"oracle_diffs", oracle_diffs}}},
            {"ok", ok}};
  }

 private:
  json execute(const QuerySpec& q) {
    const std::string where = "query '" + q.id + "'";
    const json& p = q.params;
    FederationClient client = d_.client(q.credentials);
    if (q.type == "discover") {
      const GeoPoint at = geo_param(p, where);
      const int level = p.value("level", s_.registration_level);
      if (level < 0 || level > kMaxCellLevel) throw ScenarioError(where + ": level out of range");
      std::vector<DiscoveredServer> found;
      if (p.contains("service")) {
        const auto kind = service_from_name(param<std::string>(p, "service", where));
        if (!kind) throw ScenarioError(where + ": unknown service");
        found = client.discover_servers(at, level, *kind);
      } else {
        found = discover(client.resolver(), at, level);
      }
      return {{"servers", discovered_json(found)}};
    }
    if (q.type == "geocode") {
      return geocode_result_json(client.federated_geocode(param<std::string>(p, "address", where)));
    }
    if (q.type == "search") {
      const auto keywords = keywords_param(p, where);
      const GeoPoint at = geo_param(p, where);
      const double radius = param<double>(p, "radius_m", where);
      const SearchResult r = client.federated_search(keywords, at, radius);
      if (oracle_on_) {
        json fed = json::array(), orc = json::array();
        for (const FedSearchHit& h : r.hits) fed.push_back({h.hit.node_id, h.hit.score});
        for (const SearchHit& h : oracle_->search(keywords, at, radius)) orc.push_back({h.node_id, h.score});
        pending_oracle_ = {{"match", fed == orc}};
        if (fed != orc) {
          pending_oracle_["federated"] = fed;
          pending_oracle_["oracle"] = orc;
        }
      }
      return search_result_json(r);
    }
    if (q.type == "route") {
      const RouteEnd src = route_end(param<json>(p, "src", where), where + ".src");
      const RouteEnd dst = route_end(param<json>(p, "dst", where), where + ".dst");
      std::optional<std::pair<std::string, std::string>> ids;
      if (std::holds_alternative<NodeRef>(src) && std::holds_alternative<NodeRef>(dst)) {
        ids = {std::get<NodeRef>(src).node_id, std::get<NodeRef>(dst).node_id};
      }
      StitchedPath path;
      try {
        path = client.federated_route(src, dst);
      } catch (const Error& e) {
        if (oracle_on_ && ids && (e.code() == Errc::no_route || e.code() == Errc::unreachable)) {
          oracle_route(*ids, std::nullopt);
        }
        throw;
      }
      if (oracle_on_) {
        if (!ids) ids = {path.legs.front().path.nodes.front(), path.legs.back().path.nodes.back()};
        oracle_route(*ids, path.total_cost);
      }
      return stitched_path_json(path);
    }
    if (q.type == "localize") {
      const auto cues = param<std::map<std::string, double>>(p, "cues", where);
      const GeoPoint at = geo_param(p, where);
      const Millis now = d_.clock().now();
      const bool use_prior = p.value("prior", true);
      const LocalizedPose pose = client.federated_localize(cues, at, use_prior ? &prior_ : nullptr, now);
      prior_.last = pose;
      prior_.timestamp = now;
      return localized_pose_json(pose);
    }
    if (q.type == "tiles") {
      const std::vector<CellId> viewport = viewport_param(p, s_.registration_level, where);
      const ComposedTiles t = client.federated_tiles(viewport);
      if (oracle_on_) {
        ComposedTiles central;
        for (const CellId& c : viewport) compose_tile(central, std::string(kGeoFrame), oracle_->tile(c).features);
        const FeatureKey fed = by_feature_id(t.geo_features);
        const FeatureKey orc = by_feature_id(central.geo_features);
        json missing = json::array(), extra = json::array(), differ = json::array();
        for (const auto& [id, v] : orc) {
          auto it = fed.find(id);
          if (it == fed.end()) {
            missing.push_back(id);
          } else if (it->second != v) {
            differ.push_back(id);
          }
        }
        for (const auto& [id, v] : fed) {
          if (!orc.contains(id)) extra.push_back(id);
        }
        const bool match = missing.empty() && extra.empty() && differ.empty();
        pending_oracle_ = {{"match", match}, {"features", orc.size()}};
        if (!match) {
          pending_oracle_["missing"] = missing;
          pending_oracle_["extra"] = extra;
          pending_oracle_["differ"] = differ;
        }
      }
      return composed_tiles_json(t);
    }
    throw ScenarioError(where + ": unknown query type '" + q.type + "'");
  }

  void oracle_route(const std::pair<std::string, std::string>& ids, std::optional<Cost> federated) {
    std::optional<Cost> central;
    try {
      central = oracle_->route(ids.first, ids.second).cost;
    } catch (const Unreachable&) {
    } catch (const UnknownNode&) {
    }
    pending_oracle_ = {{"src", ids.first},
                       {"dst", ids.second},
                       {"federated_cost_cm", federated ? json(*federated) : json(nullptr)},
                       {"oracle_cost_cm", central ? json(*central) : json(nullptr)},
                       {"match", federated == central}};
    if (federated && central) pending_oracle_["diff_cm"] = *federated - *central;
  }

  void evaluate(const QuerySpec& q, const json& out, Check& check) {
    const json& e = q.expect;
    if (q.type == "discover") {
      json ids = json::array();
      for (const json& s : out["servers"]) ids.push_back(s["server_id"]);
      if (e.contains("servers")) check("servers", e["servers"], ids, ids == e["servers"]);
      if (e.contains("includes")) check("includes", e["includes"], ids, contains_all(ids, e["includes"]));
      if (e.contains("excludes")) {
        bool none = true;
        for (const json& x : e["excludes"]) none = none && std::find(ids.begin(), ids.end(), x) == ids.end();
        check("excludes", e["excludes"], ids, none);
      }
      if (e.contains("count")) check("count", e["count"], ids.size(), e["count"] == ids.size());
      return;
    }
    if (q.type == "geocode" || q.type == "search") {
      const json& hits = out["hits"];
      const json first_node = hits.empty() ? json(nullptr) : hits[0]["node_id"];
      const json first_map = hits.empty() ? json(nullptr) : hits[0]["map_id"];
      if (e.contains("first_node")) check("first_node", e["first_node"], first_node, first_node == e["first_node"]);
      if (e.contains("first_map")) check("first_map", e["first_map"], first_map, first_map == e["first_map"]);
      if (e.contains("count")) check("count", e["count"], hits.size(), e["count"] == hits.size());
      if (e.contains("min_count")) {
        check("min_count", e["min_count"], hits.size(), hits.size() >= e["min_count"].get<std::size_t>());
      }
      if (e.contains("empty")) check("empty", e["empty"], hits.empty(), e["empty"] == hits.empty());
      if (e.contains("only_maps")) {
        json maps = json::array();
        for (const json& h : hits) {
          if (std::find(maps.begin(), maps.end(), h["map_id"]) == maps.end()) maps.push_back(h["map_id"]);
        }
        check("only_maps", e["only_maps"], maps, !hits.empty() && contains_all(e["only_maps"], maps));
      }
      if (e.contains("partial")) {
        const bool partial = !out["failures"].empty();
        check("partial", e["partial"], partial, e["partial"] == partial);
      }
      return;
    }
    if (q.type == "route") {
      const json& legs = out["legs"];
      json maps = json::array(), joins = json::array();
      for (std::size_t i = 0; i < legs.size(); ++i) {
        maps.push_back(legs[i]["map_id"]);
        if (i + 1 < legs.size()) joins.push_back(legs[i]["nodes"].back());
      }
      if (e.contains("legs")) check("legs", e["legs"], legs.size(), e["legs"] == legs.size());
      if (e.contains("leg_maps")) check("leg_maps", e["leg_maps"], maps, maps == e["leg_maps"]);
      if (e.contains("joins_at")) {
        const json want = e["joins_at"].is_array() ? e["joins_at"] : json::array({e["joins_at"]});
        check("joins_at", e["joins_at"], joins, joins == want);
      }
      if (e.contains("total_cost_m")) {
        const double got = out["total_cost_m"].get<double>();
        check("total_cost_m", e["total_cost_m"], got, std::abs(got - e["total_cost_m"].get<double>()) <= 0.005);
      }
      const json first = legs.empty() ? json(nullptr) : legs.front()["nodes"].front();
      const json last = legs.empty() ? json(nullptr) : legs.back()["nodes"].back();
      if (e.contains("first_node")) check("first_node", e["first_node"], first, first == e["first_node"]);
      if (e.contains("last_node")) check("last_node", e["last_node"], last, last == e["last_node"]);
      return;
    }
    if (q.type == "localize") {
      for (const char* key : {"map_id", "server_id", "frame_id"}) {
        if (e.contains(key)) check(key, e[key], out[key], out[key] == e[key]);
      }
      return;
    }
    if (q.type == "tiles") {
      json ids = json::array();
      for (const json& f : out["geo_features"]) ids.push_back(f["id"]);
      for (const auto& [frame, list] : out["local_features"].items()) {
        for (const json& f : list) ids.push_back(f["id"]);
      }
      if (e.contains("includes")) check("includes", e["includes"], ids, contains_all(ids, e["includes"]));
      if (e.contains("min_features")) {
        check("min_features", e["min_features"], ids.size(), ids.size() >= e["min_features"].get<std::size_t>());
      }
      if (e.contains("partial")) {
        const bool partial = !out["failures"].empty();
        check("partial", e["partial"], partial, e["partial"] == partial);
      }
    }
  }

  const Scenario& s_;
  Deployment& d_;
  RunOptions opts_;
  bool oracle_on_;
  std::unique_ptr<OracleWorld> oracle_;
  LocalPrior prior_;
  json pending_oracle_;
};

}  // namespace

json run_scenario(const Scenario& s, Deployment& d, const RunOptions& opts) {
  return Runner(s, d, opts).run();
}

json run_scenario(const Scenario& s, const RunOptions& opts) {
  DeploymentOptions dopts;
  dopts.dns_wire = opts.dns_wire;
  Deployment d(s, dopts);
  return run_scenario(s, d, opts);
}

}  // namespace fedmap
