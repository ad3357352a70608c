#include "fedmap/cells.hpp"

#include <algorithm>
#include <cctype>

#include "fedmap/error.hpp"

namespace fedmap {

CellId CellId::from_digits(std::span<const int> digits) {
  if (digits.size() > static_cast<std::size_t>(kMaxCellLevel)) {
    throw LevelOutOfRange("cell level " + std::to_string(digits.size()) + " exceeds " +
                          std::to_string(kMaxCellLevel));
  }
  CellId c;
  for (int d : digits) {
    if (d < 0 || d > 3) throw MalformedCellDomain("cell digit out of range: " + std::to_string(d));
    c = c.child(d);
  }
  return c;
}

CellId CellId::from_token(std::string_view token) {
  std::vector<int> digits;
  for (char ch : token) {
    if (ch < '0' || ch > '3') {
      throw MalformedCellDomain("invalid cell token '" + std::string(token) + "'");
    }
    digits.push_back(ch - '0');
  }
  return from_digits(digits);
}

std::vector<int> CellId::digits() const {
  std::vector<int> out(static_cast<std::size_t>(level_));
  for (int i = 0; i < level_; ++i) out[static_cast<std::size_t>(i)] = digit(i);
  return out;
}

std::string CellId::token() const {
  std::string out(static_cast<std::size_t>(level_), '0');
  for (int i = 0; i < level_; ++i) out[static_cast<std::size_t>(i)] = char('0' + digit(i));
  return out;
}

CellId CellId::parent() const {
  if (level_ == 0) return *this;
  return ancestor(level_ - 1);
}

CellId CellId::child(int d) const {
  if (level_ >= kMaxCellLevel) throw LevelOutOfRange("cannot descend below level 24");
  CellId c = *this;
  c.bits_ |= std::uint64_t(d & 3) << (2 * level_);
  c.level_ = level_ + 1;
  return c;
}

CellId CellId::ancestor(int level) const {
  if (level < 0 || level > level_) throw LevelOutOfRange("ancestor level out of range");
  CellId c;
  c.level_ = level;
  c.bits_ = level == 0 ? 0 : bits_ & ((std::uint64_t(1) << (2 * level)) - 1);
  return c;
}

bool CellId::is_ancestor_or_self_of(const CellId& other) const noexcept {
  return level_ <= other.level_ && other.ancestor(level_).bits_ == bits_;
}

CellId cell_from_point(const GeoPoint& p, int level) {
  if (level < 0 || level > kMaxCellLevel) {
    throw LevelOutOfRange("level " + std::to_string(level) + " outside [0, 24]");
  }
  CellBounds b;
  CellId c;
  for (int i = 0; i < level; ++i) {
    const double lat_mid = (b.lat_min + b.lat_max) * 0.5;
    const double lon_mid = (b.lon_min + b.lon_max) * 0.5;
    const bool north = p.lat() >= lat_mid;
    const bool east = p.lon() >= lon_mid;
    (north ? b.lat_min : b.lat_max) = lat_mid;
    (east ? b.lon_min : b.lon_max) = lon_mid;
    c = c.child(2 * int(north) + int(east));
  }
  return c;
}

CellBounds cell_bounds(const CellId& c) {
  CellBounds b;
  for (int i = 0; i < c.level(); ++i) {
    const int d = c.digit(i);
    const double lat_mid = (b.lat_min + b.lat_max) * 0.5;
    const double lon_mid = (b.lon_min + b.lon_max) * 0.5;
    ((d & 2) ? b.lat_min : b.lat_max) = lat_mid;
    ((d & 1) ? b.lon_min : b.lon_max) = lon_mid;
  }
  return b;
}

namespace {

// Cells already emitted that could still merge into an ancestor sit at most
// three per recursion level.
constexpr std::size_t kPendingSlack = 3 * kMaxCellLevel;

struct Coverer {
  std::span<const Point2> poly;
  int level;
  std::size_t max_cells;
  std::vector<CellId> out;

  // Returns true when the subtree of `cell` is covered by `cell` itself.
  bool visit(const CellId& cell) {
    const Rect r = cell_bounds(cell).rect();
    if (!rect_intersects_polygon(r, poly)) return false;
    if (cell.level() == level || rect_inside_polygon(r, poly)) {
      emit(cell);
      return true;
    }
    const std::size_t mark = out.size();
    int full = 0;
    for (int d = 0; d < 4; ++d) full += visit(cell.child(d)) ? 1 : 0;
    if (full == 4 && out.size() == mark + 4) {
      out.resize(mark);
      emit(cell);
      return true;
    }
    return false;
  }

  void emit(const CellId& cell) {
    out.push_back(cell);
    if (out.size() > max_cells + kPendingSlack) {
      throw CoverTooLarge("covering exceeds " + std::to_string(max_cells) +
                          " cells; lower the level");
    }
  }
};

}  // namespace

std::vector<CellId> cover_polygon(std::span<const Point2> poly, int level, std::size_t max_cells) {
  if (level < 0 || level > kMaxCellLevel) {
    throw LevelOutOfRange("level " + std::to_string(level) + " outside [0, 24]");
  }
  if (max_cells < 1) throw ContractViolation("max_cells must be >= 1");
  if (!is_simple_polygon(poly)) throw ContractViolation("covering needs a simple polygon");
  Coverer cov{poly, level, max_cells, {}};
  cov.visit(CellId::world());
  if (cov.out.size() > max_cells) {
    throw CoverTooLarge("covering has " + std::to_string(cov.out.size()) + " cells, limit " +
                        std::to_string(max_cells));
  }
  std::sort(cov.out.begin(), cov.out.end());
  return cov.out;
}

std::string normalize_domain(std::string_view name) {
  std::string out(name);
  if (!out.empty() && out.back() == '.') out.pop_back();
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

bool labels_under_suffix(std::string_view name_in, std::string_view suffix_in,
                         std::vector<std::string>& labels_out) {
  const std::string name = normalize_domain(name_in);
  const std::string suffix = normalize_domain(suffix_in);
  labels_out.clear();
  if (name == suffix) return true;
  if (name.size() <= suffix.size() + 1) return false;
  const std::size_t split = name.size() - suffix.size();
  if (name.compare(split, suffix.size(), suffix) != 0 || name[split - 1] != '.') return false;
  std::string_view rest(name.data(), split - 1);
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = rest.find('.', start);
    labels_out.emplace_back(rest.substr(start, dot == std::string_view::npos ? rest.npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  std::reverse(labels_out.begin(), labels_out.end());
  return true;
}

std::string cell_to_domain(const CellId& c, std::string_view suffix) {
  std::string out;
  for (int i = c.level() - 1; i >= 0; --i) {
    out += char('0' + c.digit(i));
    out += '.';
  }
  out += normalize_domain(suffix);
  return out;
}

CellId domain_to_cell(std::string_view name, std::string_view suffix) {
  std::vector<std::string> labels;
  if (!labels_under_suffix(name, suffix, labels)) {
    throw MalformedCellDomain("'" + std::string(name) + "' is not under '" + std::string(suffix) +
                              "'");
  }
  if (labels.size() > static_cast<std::size_t>(kMaxCellLevel)) {
    throw MalformedCellDomain("'" + std::string(name) + "' is deeper than level 24");
  }
  std::vector<int> digits;
  for (const std::string& label : labels) {
    if (label.size() != 1 || label[0] < '0' || label[0] > '3') {
      throw MalformedCellDomain("label '" + label + "' in '" + std::string(name) +
                                "' is not a quadrant digit");
    }
    digits.push_back(label[0] - '0');
  }
  return CellId::from_digits(digits);
}

}  // namespace fedmap
