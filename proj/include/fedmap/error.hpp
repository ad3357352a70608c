#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedmap {

enum class Errc {
  parse,
  integrity,
  level_out_of_range,
  cover_too_large,
  malformed_cell_domain,
  name_outside_suffix,
  resolution_failure,
  not_authorized,
  not_implemented,
  unknown_node,
  snap_failed,
  unreachable,
  no_fingerprint_coverage,
  contract_violation,
  root_unavailable,
  all_servers_failed,
  no_route,
  geocode_failed,
  no_candidates,
  transport,
  scenario,
};

std::string_view errc_name(Errc code) noexcept;

/// Base of every error raised by the library. `code()` identifies the failure
/// kind; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

#define FEDMAP_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(Errc::Code, what) {}   \
  };

FEDMAP_DEFINE_ERROR(ParseError, parse)
FEDMAP_DEFINE_ERROR(IntegrityError, integrity)
FEDMAP_DEFINE_ERROR(LevelOutOfRange, level_out_of_range)
FEDMAP_DEFINE_ERROR(CoverTooLarge, cover_too_large)
FEDMAP_DEFINE_ERROR(MalformedCellDomain, malformed_cell_domain)
FEDMAP_DEFINE_ERROR(NameOutsideSuffix, name_outside_suffix)
FEDMAP_DEFINE_ERROR(ResolutionFailure, resolution_failure)
FEDMAP_DEFINE_ERROR(NotAuthorized, not_authorized)
FEDMAP_DEFINE_ERROR(NotImplemented, not_implemented)
FEDMAP_DEFINE_ERROR(UnknownNode, unknown_node)
FEDMAP_DEFINE_ERROR(SnapFailed, snap_failed)
FEDMAP_DEFINE_ERROR(Unreachable, unreachable)
FEDMAP_DEFINE_ERROR(NoFingerprintCoverage, no_fingerprint_coverage)
FEDMAP_DEFINE_ERROR(ContractViolation, contract_violation)
FEDMAP_DEFINE_ERROR(RootUnavailable, root_unavailable)
FEDMAP_DEFINE_ERROR(AllServersFailed, all_servers_failed)
FEDMAP_DEFINE_ERROR(NoRoute, no_route)
FEDMAP_DEFINE_ERROR(GeocodeFailed, geocode_failed)
FEDMAP_DEFINE_ERROR(NoCandidates, no_candidates)
FEDMAP_DEFINE_ERROR(TransportError, transport)
FEDMAP_DEFINE_ERROR(ScenarioError, scenario)

#undef FEDMAP_DEFINE_ERROR

/// Rethrows `code` + `what` as the matching concrete error type.
[[noreturn]] void throw_error(Errc code, const std::string& what);

/// Inverse of errc_name; returns false for unknown names.
bool errc_from_name(std::string_view name, Errc& out) noexcept;

}  // namespace fedmap
