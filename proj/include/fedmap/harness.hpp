#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fedmap/clock.hpp"
#include "fedmap/dns_wire.hpp"
#include "fedmap/federation.hpp"
#include "fedmap/http_server.hpp"
#include "fedmap/map_service.hpp"
#include "fedmap/registry.hpp"
#include "json.hpp"

namespace fedmap {

struct ServerSpec {
  /// Map document path as written in the scenario (relative to its directory).
  std::string map;
  ServerConfig config;
};

struct QuerySpec {
  std::string id;
  std::string type;  // discover | geocode | search | route | localize | tiles
  nlohmann::json params;
  nlohmann::json expect;
  Credentials credentials;
  double advance_s = 0.0;
};

struct Scenario {
  std::string name;
  std::string suffix = "maps.test";
  int registration_level = kDefaultRegistrationLevel;
  std::optional<std::string> root;  // server_id of the root/world server
  std::vector<ServerSpec> servers;
  std::vector<QuerySpec> queries;
  bool oracle = false;
  /// Directory that relative map paths resolve against.
  std::string base_dir = ".";
};

/// Parses a scenario; ScenarioError names the offending field.
Scenario parse_scenario(const nlohmann::json& j, const std::string& base_dir);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_json(const Scenario& s);

/// Server configuration block of a scenario entry (without the map path).
ServerConfig parse_server_config(const nlohmann::json& j, const std::string& where);
nlohmann::json server_config_json(const ServerConfig& cfg);

struct DeploymentOptions {
  /// Discovery through the UDP DNS frontend rather than the in-process registry.
  bool dns_wire = true;
  std::shared_ptr<ManualClock> clock;
};

/// A running federation: one HTTP server per map, the registry with every
/// zone registered, and (optionally) the DNS frontend.
class Deployment {
 public:
  /// Loads documents from disk relative to the scenario's base_dir.
  Deployment(const Scenario& s, DeploymentOptions opts = {});
  /// Uses documents already in memory, in scenario server order.
  Deployment(const Scenario& s, std::vector<MapDocument> docs, DeploymentOptions opts = {});
  ~Deployment();

  const Scenario& scenario() const { return scenario_; }
  NameRegistry& registry() { return *registry_; }
  ManualClock& clock() { return *clock_; }
  std::shared_ptr<Resolver> resolver() { return resolver_; }
  const std::vector<MapDocument>& documents() const { return docs_; }
  const MapServerRecord& record(const std::string& server_id) const;
  const std::vector<MapServerRecord>& records() const { return records_; }
  MapHttpServer& server(const std::string& server_id);
  std::size_t registered_names(const std::string& server_id) const;
  int dns_port() const { return dns_ ? dns_->port() : 0; }

  /// A fresh client session with the given credentials.
  FederationClient client(const Credentials& creds = {}, std::size_t search_limit = kDefaultSearchLimit);
  std::shared_ptr<MapServerTransport> transport() { return transport_; }

 private:
  void start(DeploymentOptions opts);

  Scenario scenario_;
  std::vector<MapDocument> docs_;
  std::shared_ptr<ManualClock> clock_;
  std::unique_ptr<NameRegistry> registry_;
  std::vector<std::unique_ptr<MapHttpServer>> servers_;
  std::vector<MapServerRecord> records_;
  std::vector<std::size_t> name_counts_;
  std::unique_ptr<dns::Server> dns_;
  std::shared_ptr<Resolver> resolver_;
  std::shared_ptr<MapServerTransport> transport_;
};

/// The centralized model: every geo-frame document merged by element id into
/// one map, served by one open MapService.
class OracleWorld {
 public:
  /// Throws ScenarioError when two documents disagree on a shared element.
  explicit OracleWorld(const std::vector<MapDocument>& docs, std::size_t search_limit = kDefaultSearchLimit);

  const MapDocument& merged() const { return service_->document(); }
  const MapService& service() const { return *service_; }

  Path route(const std::string& src, const std::string& dst) const;
  std::vector<SearchHit> search(const std::vector<std::string>& keywords, const GeoPoint& p,
                                double radius_m) const;
  VectorTile tile(const CellId& cell) const;

 private:
  std::unique_ptr<MapService> service_;
};

struct RunOptions {
  /// Forces oracle comparison on regardless of the scenario flag.
  bool oracle = false;
  /// Records wall-clock latencies (makes the report non-deterministic).
  bool timings = false;
  bool dns_wire = true;
};

/// Executes every query through the federation client and, when enabled,
/// through the oracle. The report's "ok" is true iff no assertion failed, no
/// unexpected error occurred and every oracle diff is zero.
nlohmann::json run_scenario(const Scenario& s, const RunOptions& opts = {});
nlohmann::json run_scenario(const Scenario& s, Deployment& d, const RunOptions& opts = {});

// Report encodings of client results (no endpoints, so reports stay deterministic).
nlohmann::json discovered_json(const std::vector<DiscoveredServer>& servers);
nlohmann::json geocode_result_json(const GeocodeResult& r);
nlohmann::json search_result_json(const SearchResult& r);
nlohmann::json stitched_path_json(const StitchedPath& path);
nlohmann::json localized_pose_json(const LocalizedPose& pose);
nlohmann::json composed_tiles_json(const ComposedTiles& t);

struct GenParams {
  std::uint64_t seed = 1;
  int zones = 3;
  int nodes = 100;
  double portal_density = 1.0;
  int registration_level = kDefaultRegistrationLevel;
  int route_queries = 20;
};

struct GeneratedWorld {
  std::vector<MapDocument> documents;
  Scenario scenario;
};

/// Deterministic partitioned random geometric graph: vertical-strip zones,
/// spanning tree plus nearest-neighbour edges, inter-zone edges realized as
/// portal nodes shared by both documents (each kept with probability
/// portal_density).
GeneratedWorld gen_random_world(const GenParams& p);
/// Writes zone<k>.json documents and scenario.json into `dir`.
void write_world(const GeneratedWorld& w, const std::string& dir);

}  // namespace fedmap
