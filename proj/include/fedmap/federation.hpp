#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fedmap/clock.hpp"
#include "fedmap/map_service.hpp"
#include "fedmap/resolver.hpp"
#include "json.hpp"

namespace fedmap {

/// A map server's answer, unwrapped from the response envelope.
struct ServerReply {
  std::string map_id;
  std::string frame_id;
  nlohmann::json result;
};

/// How the client reaches map servers. Implementations throw TransportError
/// when the server cannot be reached; HTTP-level errors are mapped by the caller.
class MapServerTransport {
 public:
  struct Response {
    int status = 0;
    nlohmann::json body;
  };

  virtual ~MapServerTransport() = default;
  virtual Response post(const std::string& endpoint, const std::string& path,
                        const nlohmann::json& body, const Credentials& creds) = 0;
  virtual Response get(const std::string& endpoint, const std::string& path,
                       const Credentials& creds) = 0;
};

/// HTTP/1.1 transport with keep-alive connections, a per-request timeout and
/// one retry.
class HttpTransport final : public MapServerTransport {
 public:
  explicit HttpTransport(Millis timeout = Millis{2000}, int retries = 1);
  ~HttpTransport() override;

  Response post(const std::string& endpoint, const std::string& path, const nlohmann::json& body,
                const Credentials& creds) override;
  Response get(const std::string& endpoint, const std::string& path,
               const Credentials& creds) override;

 private:
  struct Connection;
  Connection& connection(const std::string& endpoint);

  Millis timeout_;
  int retries_;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<Connection>> connections_;
};

/// Calls `path` on a server and unwraps the envelope. Maps 403 to
/// NotAuthorized, 501 to NotImplemented and 422 to the error named in the body.
ServerReply call_server(MapServerTransport& t, const MapServerRecord& server, const std::string& path,
                        const nlohmann::json& body, const Credentials& creds);
ServerReply get_server(MapServerTransport& t, const MapServerRecord& server, const std::string& path,
                       const Credentials& creds);

struct ClientOptions {
  int registration_level = kDefaultRegistrationLevel;
  /// The root/world server used to resolve address prefixes.
  std::optional<MapServerRecord> root;
  Credentials credentials;
  std::size_t search_limit = kDefaultSearchLimit;
};

struct FedGeocodeHit {
  std::string server_id;
  std::string map_id;
  std::string frame_id;
  GeocodeHit hit;
  std::optional<GeoPoint> geo;
};

struct GeocodeResult {
  std::vector<FedGeocodeHit> hits;
  /// Longest address prefix the root resolved (empty when none).
  std::string resolved_prefix;
  std::vector<std::string> warnings;
};

struct FedSearchHit {
  std::string server_id;
  std::string map_id;
  std::string frame_id;
  SearchHit hit;
};

struct SearchResult {
  std::vector<FedSearchHit> hits;
  /// One entry per server that failed; the result is partial when non-empty.
  std::vector<std::string> failures;
};

/// A node known by id, with a geo position for discovery.
struct NodeRef {
  std::string node_id;
  GeoPoint position;
};

using RouteEnd = std::variant<std::string, GeoPoint, NodeRef>;

struct RouteLeg {
  std::string server_id;
  std::string map_id;
  std::string frame_id;
  Path path;
};

struct StitchedPath {
  std::vector<RouteLeg> legs;
  Cost total_cost = 0;
  std::vector<std::string> warnings;

  double total_cost_m() const { return cost_to_meters(total_cost); }
};

struct LocalizedPose {
  PoseEstimate pose;
  std::string server_id;
  std::string map_id;
  int level = 0;
};

struct LocalPrior {
  std::optional<LocalizedPose> last;
  double max_speed_mps = 2.0;
  Millis timestamp{0};
};

struct ComposedTiles {
  /// Geo features deduplicated by (map_id, feature id), sorted by that key.
  std::vector<TileFeature> geo_features;
  /// Local-frame features by frame_id.
  std::map<std::string, std::vector<TileFeature>> local_features;
  /// Per cell token, the servers whose tile could not be fetched.
  std::map<std::string, std::vector<std::string>> failures;
};

/// Client side of the federation: discovery, fan-out, ranking and stitching.
/// One instance is one session; its portal-cost cache is not shared.
class FederationClient {
 public:
  FederationClient(std::shared_ptr<Resolver> resolver, std::shared_ptr<MapServerTransport> transport,
                   ClientOptions options);

  const ClientOptions& options() const { return options_; }
  Resolver& resolver() { return *resolver_; }

  std::vector<DiscoveredServer> discover_servers(const GeoPoint& p, int level, ServiceKind service);
  /// Every cell of `level` meeting the geo rectangle, walked up and merged.
  std::vector<DiscoveredServer> discover_servers(const Rect& area, int level, ServiceKind service);

  GeocodeResult federated_geocode(const std::string& address);
  SearchResult federated_search(const std::vector<std::string>& keywords, const GeoPoint& p,
                                double radius_m);
  StitchedPath federated_route(const RouteEnd& src, const RouteEnd& dst);
  LocalizedPose federated_localize(const std::map<std::string, double>& cues, const GeoPoint& coarse,
                                   const LocalPrior* prior, Millis now);
  ComposedTiles federated_tiles(const std::vector<CellId>& viewport);

  /// Drops cached portal costs.
  void reset_session();
  std::size_t portal_cost_calls() const { return portal_cost_calls_; }

 private:
  std::optional<PortalCosts> cached_portal_costs(const MapServerRecord& server, const Endpoint& entry,
                                                 std::vector<std::string>& warnings);

  std::shared_ptr<Resolver> resolver_;
  std::shared_ptr<MapServerTransport> transport_;
  ClientOptions options_;
  std::mutex cache_mutex_;
  std::map<std::pair<std::string, std::string>, std::optional<PortalCosts>> portal_cache_;
  /// server_id -> (map_id, frame_id), learned from response envelopes.
  std::map<std::string, std::pair<std::string, std::string>> server_frames_;
  std::size_t portal_cost_calls_ = 0;
};

/// Cells of `level` that meet the geo rectangle (x = lon, y = lat).
std::vector<CellId> cells_in_rect(const Rect& area, int level);

/// Cells of `level` along the segment a-b, sampled every half cell,
/// plus both endpoint cells.
std::vector<CellId> cells_along_segment(const GeoPoint& a, const GeoPoint& b, int level);

/// Merges per-server search results: score descending, then (map_id, node_id);
/// a node id seen from several servers is kept once; capped at `limit`.
std::vector<FedSearchHit> merge_search_hits(std::vector<FedSearchHit> hits, std::size_t limit);

/// Adds a tile's features to a composition, deduplicating by (map_id, id) and
/// appending geometry of features already present.
void compose_tile(ComposedTiles& into, const std::string& frame_id, const std::vector<TileFeature>& features);

}  // namespace fedmap
