#pragma once

#include <optional>
#include <span>
#include <vector>

namespace fedmap {

/// Meters per degree of latitude (and of longitude at the equator) used for
/// every degree/meter conversion in the library.
inline constexpr double kMetersPerDegree = 111320.0;

/// Latitude/longitude in degrees. Longitude is normalized into [-180, 180).
class GeoPoint {
 public:
  GeoPoint() = default;
  /// Throws ContractViolation for non-finite input or |lat| > 90.
  GeoPoint(double lat, double lon);

  double lat() const noexcept { return lat_; }
  double lon() const noexcept { return lon_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

/// Planar coordinates in a document frame: (lon, lat) degrees for the "geo"
/// frame, meters otherwise.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
  friend auto operator<=>(const Point2&, const Point2&) = default;
};

using Polygon = std::vector<Point2>;

inline Point2 to_point(const GeoPoint& g) { return {g.lon(), g.lat()}; }

/// Axis-aligned rectangle, closed on all sides for geometric predicates.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool contains(const Point2& p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

/// Distance in meters between two points of the same frame. Geo frames use the
/// equirectangular approximation (longitude scaled by cos of the mean
/// latitude); the result is symmetric bit-for-bit in its arguments.
double frame_distance_m(const Point2& a, const Point2& b, bool geo_frame);

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b);

/// Closed-segment intersection test (touching and collinear overlap count).
bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

/// Ray-casting containment; points within `edge_eps` of an edge count as inside.
bool polygon_contains(std::span<const Point2> poly, const Point2& p, double edge_eps = 0.0);

/// At least three vertices, non-zero area, and no two non-adjacent edges touch.
bool is_simple_polygon(std::span<const Point2> poly);

Rect bounding_box(std::span<const Point2> pts);

/// True when the closed rectangle and the closed polygon share at least one point.
bool rect_intersects_polygon(const Rect& r, std::span<const Point2> poly);

/// True when the whole rectangle lies inside the polygon.
bool rect_inside_polygon(const Rect& r, std::span<const Point2> poly);

/// Cohen-Sutherland clip of segment [a, b] to the closed rectangle. Returns the
/// visible part, or nullopt when the segment misses the rectangle.
std::optional<std::pair<Point2, Point2>> clip_segment(const Point2& a, const Point2& b,
                                                      const Rect& r);

}  // namespace fedmap
