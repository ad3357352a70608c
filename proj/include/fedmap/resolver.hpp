#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fedmap/cells.hpp"
#include "fedmap/clock.hpp"
#include "fedmap/records.hpp"

namespace fedmap {

class NameRegistry;

inline constexpr std::uint32_t kNegativeCacheTtlS = 30;

/// Where a resolver sends exact-name queries.
class RecordSource {
 public:
  virtual ~RecordSource() = default;
  /// Records at exactly `name`. Throws ResolutionFailure when the authority is
  /// unreachable.
  virtual std::vector<MapServerRecord> query(std::string_view name) = 0;
};

/// Reads an in-process registry directly.
class RegistrySource final : public RecordSource {
 public:
  explicit RegistrySource(const NameRegistry& reg) : reg_(reg) {}
  std::vector<MapServerRecord> query(std::string_view name) override;

 private:
  const NameRegistry& reg_;
};

struct DiscoveredServer {
  MapServerRecord record;
  int level = 0;  // depth of the name that produced the hit
};

/// Caching stub resolver. Positive answers are cached for the smallest record
/// TTL, empty answers for the negative TTL; an entry is served only while
/// now < expiry.
class Resolver {
 public:
  Resolver(std::shared_ptr<RecordSource> source, std::string suffix,
           std::shared_ptr<const Clock> clock,
           std::uint32_t negative_ttl_s = kNegativeCacheTtlS);

  std::vector<MapServerRecord> resolve(std::string_view name);

  const std::string& suffix() const noexcept { return suffix_; }
  const Clock& clock() const noexcept { return *clock_; }
  void clear_cache();
  std::size_t cache_hits() const;
  std::size_t source_queries() const;

 private:
  struct Entry {
    std::vector<MapServerRecord> records;
    Millis expiry;
  };

  std::shared_ptr<RecordSource> source_;
  std::string suffix_;
  std::shared_ptr<const Clock> clock_;
  std::uint32_t negative_ttl_s_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Entry> cache_;
  std::size_t hits_ = 0;
  std::size_t queries_ = 0;
};

/// Walk-up discovery: queries the cell of `p` at `level` and every ancestor,
/// keeps the deepest hit per server_id, and ranks by (depth desc, priority
/// asc, server_id asc).
std::vector<DiscoveredServer> discover(Resolver& res, const GeoPoint& p, int level);

/// Same walk-up starting from an explicit cell.
std::vector<DiscoveredServer> discover_cell(Resolver& res, const CellId& cell);

}  // namespace fedmap
