#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace fedmap {

enum class ServiceKind { geocode, reverse_geocode, search, route, localize, tile };

inline constexpr std::array<ServiceKind, 6> kAllServices{
    ServiceKind::geocode, ServiceKind::reverse_geocode, ServiceKind::search,
    ServiceKind::route,   ServiceKind::localize,        ServiceKind::tile};

std::string_view service_name(ServiceKind s) noexcept;
std::optional<ServiceKind> service_from_name(std::string_view name) noexcept;

/// What a discovery answer says about one map server.
struct MapServerRecord {
  std::string server_id;
  std::string endpoint;
  std::set<ServiceKind> services;
  std::set<std::string> localization_techs;
  int priority = 0;
  std::uint32_t ttl_s = 300;

  bool offers(ServiceKind s) const { return services.contains(s); }
  friend bool operator==(const MapServerRecord&, const MapServerRecord&) = default;
};

/// Throws ContractViolation if the record breaks its invariants or cannot be
/// expressed in the canonical text form.
void validate_record(const MapServerRecord& rec);

/// `v=of1;id=<id>;ep=<endpoint>;svc=<list>;loc=<list>;pri=<int>`. The ttl is
/// carried out of band (DNS TTL, zone-file TTL column).
std::string canonical_text(const MapServerRecord& rec);

/// Inverse of canonical_text; throws ParseError.
MapServerRecord parse_canonical_text(std::string_view text, std::uint32_t ttl_s);

}  // namespace fedmap
