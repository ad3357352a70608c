#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fedmap/geo.hpp"

namespace fedmap {

using Tags = std::map<std::string, std::string>;

inline constexpr std::string_view kGeoFrame = "geo";
/// Boundary tolerance: degrees for the geo frame, meters for local frames.
inline constexpr double kBoundaryEpsGeo = 1e-6;
inline constexpr double kBoundaryEpsLocal = 0.01;

struct FrameAnchor {
  GeoPoint position;
  double uncertainty_m = 0.0;
  friend bool operator==(const FrameAnchor&, const FrameAnchor&) = default;
};

struct FrameRef {
  std::string frame_id{kGeoFrame};
  std::optional<FrameAnchor> anchor;

  bool is_geo() const noexcept { return frame_id == kGeoFrame; }
  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct MapNode {
  std::string id;
  Point2 position;
  Tags tags;
  bool is_portal = false;
  friend bool operator==(const MapNode&, const MapNode&) = default;
};

struct MapWay {
  std::string id;
  std::vector<std::string> node_ids;
  Tags tags;
  friend bool operator==(const MapWay&, const MapWay&) = default;
};

struct RelationMember {
  std::string ref;
  std::string role;
  friend bool operator==(const RelationMember&, const RelationMember&) = default;
};

struct MapRelation {
  std::string id;
  std::vector<RelationMember> members;
  Tags tags;
  friend bool operator==(const MapRelation&, const MapRelation&) = default;
};

/// One provider's zone. Immutable once validated; construct through
/// load_map_document or validate_map_document.
class MapDocument {
 public:
  std::string map_id;
  FrameRef frame;
  std::string address_prefix;
  Polygon boundary;
  std::vector<MapNode> nodes;
  std::vector<MapWay> ways;
  std::vector<MapRelation> relations;

  /// Non-fatal findings from validation (e.g. nodes outside the fuzzy boundary).
  std::vector<std::string> warnings;

  const MapNode* find_node(std::string_view id) const;
  const MapWay* find_way(std::string_view id) const;

  double boundary_eps() const noexcept {
    return frame.is_geo() ? kBoundaryEpsGeo : kBoundaryEpsLocal;
  }

  /// Element-wise equality; warnings are derived and do not participate.
  bool same_content(const MapDocument& other) const;

 private:
  friend void validate_map_document(MapDocument& doc);
  std::unordered_map<std::string, std::size_t> node_index_;
  std::unordered_map<std::string, std::size_t> way_index_;
};

/// Checks every document invariant and builds lookup indices. Throws
/// IntegrityError on violations; boundary spill-over only adds warnings.
void validate_map_document(MapDocument& doc);

/// Parses and validates map-document JSON. ParseError for malformed input,
/// IntegrityError for invariant violations.
MapDocument load_map_document(std::string_view text);
MapDocument load_map_document_file(const std::string& path);

std::string serialize_map_document(const MapDocument& doc, int indent = 2);

/// Boundary containment; points within the frame's epsilon of an edge count as inside.
bool zone_contains(const MapDocument& doc, const Point2& p);

/// Geo-frame polygon used for discovery registration: the boundary itself for
/// geo documents, the anchor box inflated by its uncertainty for local frames.
/// Throws IntegrityError for a local frame without an anchor.
Polygon registration_polygon(const MapDocument& doc);

/// Coarse geo position for a point in the document frame (the point itself for
/// geo documents, the anchor otherwise).
std::optional<GeoPoint> coarse_geo_position(const MapDocument& doc, const Point2& p);

}  // namespace fedmap
