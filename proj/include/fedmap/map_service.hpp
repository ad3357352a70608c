#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fedmap/cells.hpp"
#include "fedmap/map_model.hpp"
#include "fedmap/records.hpp"
#include "fedmap/route_graph.hpp"

namespace fedmap {

enum class AuthMode { open, user, service, application };

std::string_view auth_mode_name(AuthMode m) noexcept;
std::optional<AuthMode> auth_mode_from_name(std::string_view name) noexcept;

struct AuthPolicy {
  AuthMode mode = AuthMode::open;
  std::set<std::string> allowed_users;
  std::set<std::string> allowed_apps;
};

/// Throws ContractViolation when a user or application policy has an empty list.
void validate_policy(const AuthPolicy& p);

struct Credentials {
  std::optional<std::string> user_token;
  std::optional<std::string> app_token;
};

struct AuthDecision {
  bool allowed = true;
  std::string reason;  // which check failed; empty when allowed
};

AuthDecision authorize(const AuthPolicy& policy, const Credentials& creds);

struct BeaconFingerprint {
  Point2 position;
  std::map<std::string, double> rssi_by_beacon;
};

/// RSSI assumed for a beacon that one side of a comparison did not hear.
inline constexpr double kMissingRssiDbm = -100.0;
inline constexpr double kSnapRadiusM = 50.0;
inline constexpr std::size_t kDefaultSearchLimit = 20;

struct ServerConfig {
  std::string server_id;
  std::string map_path;
  std::string host = "127.0.0.1";
  int port = 0;
  /// Advertised services are exactly the keys of this map.
  std::map<ServiceKind, AuthPolicy> auth;
  std::set<std::string> localization_techs;
  int priority = 0;
  std::uint32_t ttl_s = 300;
  int registration_level = kDefaultRegistrationLevel;
  std::size_t search_limit = kDefaultSearchLimit;
  std::vector<BeaconFingerprint> fingerprints;

  std::set<ServiceKind> services() const;
};

void validate_config(const ServerConfig& cfg);

struct PoseEstimate {
  std::string frame_id;
  Point2 position;
  std::optional<double> heading_deg;
  double confidence = 0.0;
};

struct GeocodeHit {
  std::string node_id;
  Point2 position;
  std::string full_address;
  bool exact = false;
  /// Address components of the node beyond those in the query.
  int extra_components = 0;
};

struct ReverseHit {
  std::string node_id;
  Point2 position;
  double distance_m = 0.0;
};

struct SearchHit {
  std::string node_id;
  Point2 position;
  double score = 0.0;
  double distance_m = 0.0;
  int matched = 0;
};

/// A query position: either in the document frame, or a geo position that a
/// local-frame server measures against its anchor.
struct QueryPoint {
  Point2 p;
  bool geo = false;
};

/// Route endpoint: a node id or a point that snaps to the nearest routable node.
using Endpoint = std::variant<std::string, QueryPoint>;

struct SnappedEntry {
  std::string node_id;
  double snap_distance_m = 0.0;
};

struct PortalCost {
  Path path;
  Point2 position;
  /// Coarse geo position of the portal, used to discover its other servers.
  std::optional<GeoPoint> geo;
};

struct PortalCosts {
  SnappedEntry entry;
  std::map<std::string, PortalCost> portals;
};

struct TileFeature {
  std::string id;
  bool is_way = false;
  /// A single point for nodes; one or more polylines for ways.
  std::vector<std::vector<Point2>> geometry;
  Tags tags;
  std::string map_id;
  friend bool operator==(const TileFeature&, const TileFeature&) = default;
};

struct VectorTile {
  CellId cell;
  std::string frame_id;
  std::vector<TileFeature> features;
};

/// One provider's services over an immutable document.
class MapService {
 public:
  MapService(MapDocument doc, ServerConfig cfg);

  const MapDocument& document() const { return doc_; }
  const ServerConfig& config() const { return cfg_; }
  const std::string& frame_id() const { return doc_.frame.frame_id; }
  bool is_geo() const { return doc_.frame.is_geo(); }

  /// Discovery record for this server at `endpoint`.
  MapServerRecord record(const std::string& endpoint) const;

  /// Deny for unadvertised services; otherwise the service's policy decides.
  AuthDecision authorize(ServiceKind s, const Credentials& creds) const;

  std::vector<GeocodeHit> geocode(const std::string& address) const;
  std::vector<ReverseHit> reverse_geocode(const Point2& p, double radius_m) const;
  std::vector<SearchHit> search(const std::vector<std::string>& keywords, const QueryPoint& center,
                                double radius_m) const;
  Path route(const Endpoint& src, const Endpoint& dst) const;
  PortalCosts portal_costs(const Endpoint& entry) const;
  PoseEstimate localize(const std::map<std::string, double>& beacon_rssi) const;
  VectorTile render_tile(const CellId& cell) const;

  /// Coarse geo position of a document point (itself for geo frames, the anchor otherwise).
  std::optional<GeoPoint> coarse_position(const Point2& p) const;

 private:
  SnappedEntry resolve_endpoint(const Endpoint& e) const;
  double distance_from(const QueryPoint& q, const Point2& node_pos) const;

  MapDocument doc_;
  ServerConfig cfg_;
  RouteGraph graph_;
};

/// Full address of a node, or nullopt when it has no "addr" tag.
std::optional<std::string> full_address(const MapDocument& doc, const MapNode& n);

}  // namespace fedmap
