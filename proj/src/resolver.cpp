#include "fedmap/resolver.hpp"

#include <algorithm>
#include <map>

#include "fedmap/error.hpp"
#include "fedmap/registry.hpp"

namespace fedmap {

std::vector<MapServerRecord> RegistrySource::query(std::string_view name) {
  return reg_.lookup(name);
}

Resolver::Resolver(std::shared_ptr<RecordSource> source, std::string suffix,
                   std::shared_ptr<const Clock> clock, std::uint32_t negative_ttl_s)
    : source_(std::move(source)),
      suffix_(normalize_domain(suffix)),
      clock_(std::move(clock)),
      negative_ttl_s_(negative_ttl_s) {
  if (!source_ || !clock_) throw ContractViolation("resolver needs a source and a clock");
}

std::vector<MapServerRecord> Resolver::resolve(std::string_view name_in) {
  const std::string name = normalize_domain(name_in);
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(name);
    if (it != cache_.end()) {
      if (clock_->now() < it->second.expiry) {
        ++hits_;
        return it->second.records;
      }
      cache_.erase(it);
    }
    ++queries_;
  }
  // Query outside the lock; concurrent fills for one name are last-write-wins.
  std::vector<MapServerRecord> records = source_->query(name);
  std::uint32_t ttl = negative_ttl_s_;
  if (!records.empty()) {
    ttl = std::min_element(records.begin(), records.end(), [](const auto& a, const auto& b) {
            return a.ttl_s < b.ttl_s;
          })->ttl_s;
  }
  if (ttl > 0) {
    std::lock_guard lock(mutex_);
    cache_.insert_or_assign(name, Entry{records, clock_->now() + Millis{std::int64_t(ttl) * 1000}});
  }
  return records;
}

void Resolver::clear_cache() {
  std::lock_guard lock(mutex_);
  cache_.clear();
}

std::size_t Resolver::cache_hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t Resolver::source_queries() const {
  std::lock_guard lock(mutex_);
  return queries_;
}

std::vector<DiscoveredServer> discover_cell(Resolver& res, const CellId& cell) {
  std::map<std::string, DiscoveredServer> best;
  for (int level = cell.level(); level >= 0; --level) {
    const std::string name = cell_to_domain(cell.ancestor(level), res.suffix());
    for (const MapServerRecord& rec : res.resolve(name)) {
      // Deepest level is visited first, so the first hit wins.
      best.try_emplace(rec.server_id, DiscoveredServer{rec, level});
    }
  }
  std::vector<DiscoveredServer> out;
  out.reserve(best.size());
  for (auto& [id, d] : best) out.push_back(std::move(d));
  std::sort(out.begin(), out.end(), [](const DiscoveredServer& a, const DiscoveredServer& b) {
    if (a.level != b.level) return a.level > b.level;
    if (a.record.priority != b.record.priority) return a.record.priority < b.record.priority;
    return a.record.server_id < b.record.server_id;
  });
  return out;
}

std::vector<DiscoveredServer> discover(Resolver& res, const GeoPoint& p, int level) {
  return discover_cell(res, cell_from_point(p, level));
}

}  // namespace fedmap
