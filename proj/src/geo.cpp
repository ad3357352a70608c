#include "fedmap/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fedmap/error.hpp"

namespace fedmap {

GeoPoint::GeoPoint(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw ContractViolation("GeoPoint: coordinates must be finite");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw ContractViolation("GeoPoint: latitude out of [-90, 90]");
  }
  lon = std::fmod(lon + 180.0, 360.0);
  if (lon < 0.0) lon += 360.0;
  lon -= 180.0;
  if (lon >= 180.0) lon -= 360.0;
  lat_ = lat;
  lon_ = lon;
}

double frame_distance_m(const Point2& a_in, const Point2& b_in, bool geo_frame) {
  const Point2& a = std::min(a_in, b_in);
  const Point2& b = std::max(a_in, b_in);
  if (!geo_frame) return std::hypot(b.x - a.x, b.y - a.y);
  const double mean_lat = (a.y + b.y) * 0.5 * std::numbers::pi / 180.0;
  const double dy = (b.y - a.y) * kMetersPerDegree;
  const double dx = (b.x - a.x) * kMetersPerDegree * std::cos(mean_lat);
  return std::hypot(dx, dy);
}

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool within_box(const Point2& p, const Point2& a, const Point2& b) {
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

bool on_segment_exact(const Point2& p, const Point2& a, const Point2& b) {
  return cross(a, b, p) == 0.0 && within_box(p, a, b);
}

}  // namespace

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && within_box(a, c, d)) return true;
  if (d2 == 0 && within_box(b, c, d)) return true;
  if (d3 == 0 && within_box(c, a, b)) return true;
  if (d4 == 0 && within_box(d, a, b)) return true;
  return false;
}

bool polygon_contains(std::span<const Point2> poly, const Point2& p, double edge_eps) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if (edge_eps > 0.0 ? distance_to_segment(p, a, b) <= edge_eps : on_segment_exact(p, a, b)) {
      return true;
    }
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool is_simple_polygon(std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    if (a == b) return false;
    area2 += a.x * b.y - b.x * a.y;
  }
  if (area2 == 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    // Adjacent edge folding back over this one.
    const Point2& c = poly[(i + 2) % n];
    if (cross(a, b, c) == 0.0 && ((c.x - b.x) * (a.x - b.x) + (c.y - b.y) * (a.y - b.y)) > 0.0) {
      return false;
    }
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

Rect bounding_box(std::span<const Point2> pts) {
  Rect r{pts.front().x, pts.front().y, pts.front().x, pts.front().y};
  for (const Point2& p : pts) {
    r.x_min = std::min(r.x_min, p.x);
    r.x_max = std::max(r.x_max, p.x);
    r.y_min = std::min(r.y_min, p.y);
    r.y_max = std::max(r.y_max, p.y);
  }
  return r;
}

bool rect_intersects_polygon(const Rect& r, std::span<const Point2> poly) {
  for (const Point2& v : poly) {
    if (r.contains(v)) return true;
  }
  const Point2 corners[4] = {
      {r.x_min, r.y_min}, {r.x_max, r.y_min}, {r.x_max, r.y_max}, {r.x_min, r.y_max}};
  for (const Point2& c : corners) {
    if (polygon_contains(poly, c)) return true;
  }
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    for (int k = 0; k < 4; ++k) {
      if (segments_intersect(a, b, corners[k], corners[(k + 1) % 4])) return true;
    }
  }
  return false;
}

bool rect_inside_polygon(const Rect& r, std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto clipped = clip_segment(poly[i], poly[(i + 1) % n], r);
    if (!clipped) continue;
    const Point2 mid{(clipped->first.x + clipped->second.x) * 0.5,
                     (clipped->first.y + clipped->second.y) * 0.5};
    if (mid.x > r.x_min && mid.x < r.x_max && mid.y > r.y_min && mid.y < r.y_max) return false;
  }
  return polygon_contains(poly, {(r.x_min + r.x_max) * 0.5, (r.y_min + r.y_max) * 0.5});
}

namespace {

enum : unsigned { kInside = 0, kLeft = 1, kRight = 2, kBottom = 4, kTop = 8 };

unsigned outcode(const Point2& p, const Rect& r) {
  unsigned code = kInside;
  if (p.x < r.x_min) code |= kLeft;
  else if (p.x > r.x_max) code |= kRight;
  if (p.y < r.y_min) code |= kBottom;
  else if (p.y > r.y_max) code |= kTop;
  return code;
}

}  // namespace

std::optional<std::pair<Point2, Point2>> clip_segment(const Point2& a_in, const Point2& b_in,
                                                      const Rect& r) {
  Point2 a = a_in;
  Point2 b = b_in;
  unsigned code_a = outcode(a, r);
  unsigned code_b = outcode(b, r);
  while (true) {
    if ((code_a | code_b) == 0) return std::pair{a, b};
    if ((code_a & code_b) != 0) return std::nullopt;
    const unsigned out = code_a != 0 ? code_a : code_b;
    Point2 p;
    if (out & kTop) {
      p = {a.x + (b.x - a.x) * (r.y_max - a.y) / (b.y - a.y), r.y_max};
    } else if (out & kBottom) {
      p = {a.x + (b.x - a.x) * (r.y_min - a.y) / (b.y - a.y), r.y_min};
    } else if (out & kRight) {
      p = {r.x_max, a.y + (b.y - a.y) * (r.x_max - a.x) / (b.x - a.x)};
    } else {
      p = {r.x_min, a.y + (b.y - a.y) * (r.x_min - a.x) / (b.x - a.x)};
    }
    if (out == code_a) {
      a = p;
      code_a = outcode(a, r);
    } else {
      b = p;
      code_b = outcode(b, r);
    }
  }
}

}  // namespace fedmap
