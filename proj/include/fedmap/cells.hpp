#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedmap/geo.hpp"

namespace fedmap {

inline constexpr int kMaxCellLevel = 24;
inline constexpr int kDefaultRegistrationLevel = 16;

/// A cell of the plate-carree quadtree: a path of quadrant digits from the
/// world cell (0 = SW, 1 = SE, 2 = NW, 3 = NE). Packed two bits per level.
class CellId {
 public:
  CellId() = default;
  /// Throws LevelOutOfRange for more than 24 digits and MalformedCellDomain for
  /// a digit outside {0,1,2,3}.
  static CellId from_digits(std::span<const int> digits);
  /// Parses the token form ("320"; empty = world).
  static CellId from_token(std::string_view token);
  static CellId world() { return {}; }

  int level() const noexcept { return level_; }
  int digit(int i) const noexcept { return static_cast<int>((bits_ >> (2 * i)) & 3u); }
  std::vector<int> digits() const;
  std::string token() const;

  CellId parent() const;
  CellId child(int digit) const;
  /// Ancestor at `level` (self when level == this->level()).
  CellId ancestor(int level) const;
  bool is_ancestor_or_self_of(const CellId& other) const noexcept;

  friend bool operator==(const CellId&, const CellId&) = default;
  friend std::strong_ordering operator<=>(const CellId& a, const CellId& b) {
    return a.token() <=> b.token();
  }

  std::uint64_t packed() const noexcept { return bits_ | (std::uint64_t(level_) << 56); }

 private:
  std::uint64_t bits_ = 0;  // digit i at bits [2i, 2i+2)
  int level_ = 0;
};

/// Cell extent. Latitude is closed, longitude is half-open [lon_min, lon_max).
struct CellBounds {
  double lat_min = -90.0;
  double lat_max = 90.0;
  double lon_min = -180.0;
  double lon_max = 180.0;

  Rect rect() const { return {lon_min, lat_min, lon_max, lat_max}; }
  GeoPoint center() const { return GeoPoint((lat_min + lat_max) * 0.5, (lon_min + lon_max) * 0.5); }
  friend bool operator==(const CellBounds&, const CellBounds&) = default;
};

CellId cell_from_point(const GeoPoint& p, int level);
CellBounds cell_bounds(const CellId& c);

/// Normalized covering of a geo polygon (vertices as (lon, lat)) by cells of
/// `level`: every level cell touching the polygon, with complete sibling
/// quartets merged into their parent. Throws CoverTooLarge when the result
/// would exceed `max_cells`.
std::vector<CellId> cover_polygon(std::span<const Point2> poly, int level, std::size_t max_cells);

std::string cell_to_domain(const CellId& c, std::string_view suffix);
CellId domain_to_cell(std::string_view name, std::string_view suffix);

/// Lower-cases and strips a trailing dot.
std::string normalize_domain(std::string_view name);

/// Labels of `name` above `suffix`, shallowest label first. Returns false if
/// `name` is not `suffix` or a subdomain of it.
bool labels_under_suffix(std::string_view name, std::string_view suffix,
                         std::vector<std::string>& labels_out);

}  // namespace fedmap

template <>
struct std::hash<fedmap::CellId> {
  std::size_t operator()(const fedmap::CellId& c) const noexcept {
    return std::hash<std::uint64_t>{}(c.packed());
  }
};
