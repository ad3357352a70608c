#include "fedmap/records.hpp"

#include <charconv>
#include <vector>

#include "fedmap/error.hpp"

namespace fedmap {

std::string_view service_name(ServiceKind s) noexcept {
  switch (s) {
    case ServiceKind::geocode: return "geocode";
    case ServiceKind::reverse_geocode: return "reverse_geocode";
    case ServiceKind::search: return "search";
    case ServiceKind::route: return "route";
    case ServiceKind::localize: return "localize";
    case ServiceKind::tile: return "tile";
  }
  return "unknown";
}

std::optional<ServiceKind> service_from_name(std::string_view name) noexcept {
  for (ServiceKind s : kAllServices) {
    if (service_name(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

// Characters that would break the canonical form or the zone-file quoting.
bool safe_token(std::string_view s, bool allow_empty = false) {
  if (s.empty()) return allow_empty;
  for (unsigned char ch : s) {
    if (ch <= 0x20 || ch >= 0x7f || ch == ';' || ch == ',' || ch == '"' || ch == '\\') {
      return false;
    }
  }
  return true;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == s.npos ? s.npos : pos - start));
    if (pos == s.npos) return out;
    start = pos + 1;
  }
}

}  // namespace

void validate_record(const MapServerRecord& rec) {
  if (!safe_token(rec.server_id)) {
    throw ContractViolation("record server_id must be a non-empty token without ';', ',', spaces");
  }
  if (rec.endpoint.empty() || rec.endpoint.find_first_of("; \t\"\\") != std::string::npos) {
    throw ContractViolation("record endpoint must be non-empty and free of ';', spaces, quotes");
  }
  if (rec.services.empty()) throw ContractViolation("record must advertise at least one service");
  for (const std::string& t : rec.localization_techs) {
    if (!safe_token(t)) throw ContractViolation("invalid localization tech '" + t + "'");
  }
}

std::string canonical_text(const MapServerRecord& rec) {
  std::string out = "v=of1;id=" + rec.server_id + ";ep=" + rec.endpoint + ";svc=";
  bool first = true;
  for (ServiceKind s : rec.services) {
    if (!first) out += ',';
    out += service_name(s);
    first = false;
  }
  out += ";loc=";
  first = true;
  for (const std::string& t : rec.localization_techs) {
    if (!first) out += ',';
    out += t;
    first = false;
  }
  out += ";pri=" + std::to_string(rec.priority);
  return out;
}

MapServerRecord parse_canonical_text(std::string_view text, std::uint32_t ttl_s) {
  const std::vector<std::string_view> fields = split(text, ';');
  static constexpr std::array<std::string_view, 6> kKeys{"v=", "id=", "ep=", "svc=", "loc=", "pri="};
  if (fields.size() != kKeys.size()) {
    throw ParseError("record text must have 6 fields: '" + std::string(text) + "'");
  }
  std::array<std::string_view, 6> values;
  for (std::size_t i = 0; i < kKeys.size(); ++i) {
    if (!fields[i].starts_with(kKeys[i])) {
      throw ParseError("record field " + std::to_string(i) + " must start with '" +
                       std::string(kKeys[i]) + "'");
    }
    values[i] = fields[i].substr(kKeys[i].size());
  }
  if (values[0] != "of1") throw ParseError("unsupported record version '" + std::string(values[0]) + "'");

  MapServerRecord rec;
  rec.server_id = values[1];
  rec.endpoint = values[2];
  rec.ttl_s = ttl_s;
  if (!values[3].empty()) {
    for (std::string_view name : split(values[3], ',')) {
      auto s = service_from_name(name);
      if (!s) throw ParseError("unknown service '" + std::string(name) + "'");
      rec.services.insert(*s);
    }
  }
  if (!values[4].empty()) {
    for (std::string_view t : split(values[4], ',')) rec.localization_techs.emplace(t);
  }
  const std::string_view pri = values[5];
  auto [ptr, ec] = std::from_chars(pri.data(), pri.data() + pri.size(), rec.priority);
  if (ec != std::errc{} || ptr != pri.data() + pri.size()) {
    throw ParseError("bad priority '" + std::string(pri) + "'");
  }
  try {
    validate_record(rec);
  } catch (const ContractViolation& e) {
    throw ParseError(e.what());
  }
  return rec;
}

}  // namespace fedmap
