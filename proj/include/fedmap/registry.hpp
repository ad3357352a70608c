#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedmap/cells.hpp"
#include "fedmap/records.hpp"

namespace fedmap {

class MapDocument;

inline constexpr std::size_t kDefaultMaxCoverCells = 4096;

/// Authoritative store of discovery records: a label tree rooted at the
/// configured suffix, each tree node holding records keyed by server_id.
/// Readers share; writers are exclusive and never expose partial updates.
class NameRegistry {
 public:
  explicit NameRegistry(std::string suffix);

  const std::string& suffix() const noexcept { return suffix_; }

  /// Inserts or replaces the record of `rec.server_id` at `name`.
  void put(std::string_view name, const MapServerRecord& rec);
  /// Inserts under every name in one exclusive section.
  void put_all(const std::vector<std::string>& names, const MapServerRecord& rec);
  std::size_t remove_server(std::string_view server_id);

  /// Records stored at exactly `name`, ordered by server_id. NameOutsideSuffix
  /// when `name` is not under the suffix.
  std::vector<MapServerRecord> lookup(std::string_view name) const;
  bool is_under_suffix(std::string_view name) const;

  /// Every (domain, record) pair, in zone-file order.
  std::vector<std::pair<std::string, MapServerRecord>> entries() const;

 private:
  struct Node {
    std::map<std::string, std::unique_ptr<Node>> children;
    std::map<std::string, MapServerRecord> records;
  };

  std::vector<std::string> labels_or_throw(std::string_view name) const;
  void put_locked(const std::vector<std::string>& labels, const MapServerRecord& rec);

  std::string suffix_;
  mutable std::shared_mutex mutex_;
  Node root_;
};

/// Covers `boundary` (geo polygon, (lon, lat) vertices) at `level` and stores
/// `rec` under each covering cell's domain. Returns the domains, sorted.
std::vector<std::string> register_zone(NameRegistry& reg, std::span<const Point2> boundary,
                                       const MapServerRecord& rec, int level,
                                       std::size_t max_cells = kDefaultMaxCoverCells);

/// Registers a document's zone; local frames use their inflated anchor box.
std::vector<std::string> register_document(NameRegistry& reg, const MapDocument& doc,
                                           const MapServerRecord& rec, int level,
                                           std::size_t max_cells = kDefaultMaxCoverCells);

std::size_t deregister(NameRegistry& reg, std::string_view server_id);

std::vector<MapServerRecord> lookup_records(const NameRegistry& reg, std::string_view name);

/// `<domain> <ttl> IN TXT "<canonical text>"` lines sorted by reversed labels.
std::string export_zone_file(const NameRegistry& reg);
/// Loads zone-file lines into `reg`; returns the number of records read.
std::size_t import_zone_file(NameRegistry& reg, std::string_view text);

}  // namespace fedmap
