#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fedmap/error.hpp"
#include "fedmap/harness.hpp"

namespace fedmap {

using nlohmann::json;

namespace {

const std::set<std::string> kQueryTypes{"discover", "geocode", "search", "route", "localize", "tiles"};

const std::map<std::string, std::set<std::string>> kExpectKeys{
    {"discover", {"error", "servers", "includes", "excludes", "count"}},
    {"geocode", {"error", "first_node", "first_map", "count", "min_count", "empty"}},
    {"search", {"error", "first_node", "only_maps", "count", "min_count", "empty", "partial"}},
    {"route", {"error", "legs", "leg_maps", "joins_at", "total_cost_m", "first_node", "last_node"}},
    {"localize", {"error", "map_id", "server_id", "frame_id"}},
    {"tiles", {"error", "includes", "min_features", "partial"}},
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, "missing field '" + key + "'");
  return j[key];
}

template <typename T>
T as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    fail(where, std::string("wrong type (") + e.what() + ")");
  }
}

template <typename T>
T optional_field(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  return as<T>(j[key], where + "." + key);
}

AuthPolicy parse_policy(const json& j, const std::string& where) {
  AuthPolicy p;
  const std::string mode = optional_field<std::string>(j, "mode", "open", where);
  const auto m = auth_mode_from_name(mode);
  if (!m) fail(where + ".mode", "unknown mode '" + mode + "'");
  p.mode = *m;
  p.allowed_users = optional_field<std::set<std::string>>(j, "users", {}, where);
  p.allowed_apps = optional_field<std::set<std::string>>(j, "apps", {}, where);
  try {
    validate_policy(p);
  } catch (const ContractViolation& e) {
    fail(where, e.what());
  }
  return p;
}

Credentials parse_credentials(const json& j, const std::string& where) {
  Credentials c;
  if (!j.is_object()) fail(where, "expected an object");
  if (j.contains("user")) c.user_token = as<std::string>(j["user"], where + ".user");
  if (j.contains("app")) c.app_token = as<std::string>(j["app"], where + ".app");
  return c;
}

}  // namespace

ServerConfig parse_server_config(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  ServerConfig cfg;
  cfg.server_id = as<std::string>(field(j, "server_id", where), where + ".server_id");
  const json& services = field(j, "services", where);
  if (!services.is_object() || services.empty()) fail(where + ".services", "expected a non-empty object");
  for (const auto& [name, policy] : services.items()) {
    const auto kind = service_from_name(name);
    if (!kind) fail(where + ".services", "unknown service '" + name + "'");
    cfg.auth[*kind] = parse_policy(policy, where + ".services." + name);
  }
  cfg.localization_techs = optional_field<std::set<std::string>>(j, "localization_techs", {}, where);
  cfg.priority = optional_field<int>(j, "priority", 0, where);
  cfg.ttl_s = optional_field<std::uint32_t>(j, "ttl_s", 300, where);
  cfg.registration_level = optional_field<int>(j, "registration_level", -1, where);
  cfg.search_limit = optional_field<std::size_t>(j, "search_limit", kDefaultSearchLimit, where);
  if (j.contains("fingerprints")) {
    const json& fps = j["fingerprints"];
    if (!fps.is_array()) fail(where + ".fingerprints", "expected an array");
    for (std::size_t i = 0; i < fps.size(); ++i) {
      const std::string w = where + ".fingerprints[" + std::to_string(i) + "]";
      BeaconFingerprint f;
      f.position = {as<double>(field(fps[i], "x", w), w + ".x"), as<double>(field(fps[i], "y", w), w + ".y")};
      f.rssi_by_beacon = as<std::map<std::string, double>>(field(fps[i], "rssi", w), w + ".rssi");
      if (f.rssi_by_beacon.empty()) fail(w + ".rssi", "needs at least one beacon");
      cfg.fingerprints.push_back(std::move(f));
    }
  }
  return cfg;
}

json server_config_json(const ServerConfig& cfg) {
  json services = json::object();
  for (const auto& [kind, p] : cfg.auth) {
    json pj{{"mode", auth_mode_name(p.mode)}};
    if (!p.allowed_users.empty()) pj["users"] = p.allowed_users;
    if (!p.allowed_apps.empty()) pj["apps"] = p.allowed_apps;
    services[std::string(service_name(kind))] = std::move(pj);
  }
  json j{{"server_id", cfg.server_id},
         {"services", std::move(services)},
         {"localization_techs", cfg.localization_techs},
         {"priority", cfg.priority},
         {"ttl_s", cfg.ttl_s},
         {"search_limit", cfg.search_limit}};
  if (cfg.registration_level >= 0) j["registration_level"] = cfg.registration_level;
  if (!cfg.fingerprints.empty()) {
    json fps = json::array();
    for (const BeaconFingerprint& f : cfg.fingerprints) {
      fps.push_back({{"x", f.position.x}, {"y", f.position.y}, {"rssi", f.rssi_by_beacon}});
    }
    j["fingerprints"] = std::move(fps);
  }
  return j;
}

Scenario parse_scenario(const json& j, const std::string& base_dir) {
  if (!j.is_object()) fail("scenario", "expected an object");
  Scenario s;
  s.base_dir = base_dir;
  s.name = optional_field<std::string>(j, "name", "scenario", "scenario");
  s.suffix = optional_field<std::string>(j, "suffix", "maps.test", "scenario");
  s.registration_level = optional_field<int>(j, "registration_level", kDefaultRegistrationLevel, "scenario");
  if (s.registration_level < 0 || s.registration_level > kMaxCellLevel) {
    fail("scenario.registration_level", "must be within [0, 24]");
  }
  s.oracle = optional_field<bool>(j, "oracle", false, "scenario");
  if (j.contains("root") && !j["root"].is_null()) s.root = as<std::string>(j["root"], "scenario.root");

  const json& servers = field(j, "servers", "scenario");
  if (!servers.is_array() || servers.empty()) fail("scenario.servers", "expected a non-empty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < servers.size(); ++i) {
    const std::string where = "servers[" + std::to_string(i) + "]";
    ServerSpec spec;
    spec.map = as<std::string>(field(servers[i], "map", where), where + ".map");
    spec.config = parse_server_config(servers[i], where);
    if (spec.config.registration_level < 0) spec.config.registration_level = s.registration_level;
    if (!ids.insert(spec.config.server_id).second) {
      fail(where + ".server_id", "duplicate server_id '" + spec.config.server_id + "'");
    }
    s.servers.push_back(std::move(spec));
  }
  if (s.root && !ids.contains(*s.root)) fail("scenario.root", "unknown server '" + *s.root + "'");

  const json queries = j.value("queries", json::array());
  if (!queries.is_array()) fail("scenario.queries", "expected an array");
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const std::string where = "queries[" + std::to_string(i) + "]";
    QuerySpec q;
    q.type = as<std::string>(field(queries[i], "type", where), where + ".type");
    if (!kQueryTypes.contains(q.type)) fail(where + ".type", "unknown query type '" + q.type + "'");
    q.id = optional_field<std::string>(queries[i], "id", "q" + std::to_string(i), where);
    q.params = queries[i].value("params", json::object());
    q.expect = queries[i].value("expect", json::object());
    if (!q.params.is_object()) fail(where + ".params", "expected an object");
    if (!q.expect.is_object()) fail(where + ".expect", "expected an object");
    for (const auto& [key, value] : q.expect.items()) {
      if (!kExpectKeys.at(q.type).contains(key)) fail(where + ".expect", "unknown expectation '" + key + "'");
    }
    if (queries[i].contains("credentials")) {
      q.credentials = parse_credentials(queries[i]["credentials"], where + ".credentials");
    }
    q.advance_s = optional_field<double>(queries[i], "advance_s", 0.0, where);
    if (q.advance_s < 0) fail(where + ".advance_s", "must be non-negative");
    s.queries.push_back(std::move(q));
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario(j, dir.empty() ? "." : dir.string());
}

json scenario_json(const Scenario& s) {
  json servers = json::array();
  for (const ServerSpec& spec : s.servers) {
    json sj = server_config_json(spec.config);
    sj["map"] = spec.map;
    servers.push_back(std::move(sj));
  }
  json queries = json::array();
  for (const QuerySpec& q : s.queries) {
    json qj{{"id", q.id}, {"type", q.type}, {"params", q.params}};
    if (!q.expect.empty()) qj["expect"] = q.expect;
    if (q.credentials.user_token || q.credentials.app_token) {
      json c = json::object();
      if (q.credentials.user_token) c["user"] = *q.credentials.user_token;
      if (q.credentials.app_token) c["app"] = *q.credentials.app_token;
      qj["credentials"] = std::move(c);
    }
    if (q.advance_s > 0) qj["advance_s"] = q.advance_s;
    queries.push_back(std::move(qj));
  }
  json j{{"name", s.name},
         {"suffix", s.suffix},
         {"registration_level", s.registration_level},
         {"oracle", s.oracle},
         {"servers", std::move(servers)},
         {"queries", std::move(queries)}};
  j["root"] = s.root ? json(*s.root) : json(nullptr);
  return j;
}

}  // namespace fedmap
