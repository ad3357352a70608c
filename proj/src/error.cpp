#include "fedmap/error.hpp"

#include <array>
#include <utility>

namespace fedmap {

namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 21> kNames{{
    {Errc::parse, "ParseError"},
    {Errc::integrity, "IntegrityError"},
    {Errc::level_out_of_range, "LevelOutOfRange"},
    {Errc::cover_too_large, "CoverTooLarge"},
    {Errc::malformed_cell_domain, "MalformedCellDomain"},
    {Errc::name_outside_suffix, "NameOutsideSuffix"},
    {Errc::resolution_failure, "ResolutionFailure"},
    {Errc::not_authorized, "NotAuthorized"},
    {Errc::not_implemented, "NotImplemented"},
    {Errc::unknown_node, "UnknownNode"},
    {Errc::snap_failed, "SnapFailed"},
    {Errc::unreachable, "Unreachable"},
    {Errc::no_fingerprint_coverage, "NoFingerprintCoverage"},
    {Errc::contract_violation, "ContractViolation"},
    {Errc::root_unavailable, "RootUnavailable"},
    {Errc::all_servers_failed, "AllServersFailed"},
    {Errc::no_route, "NoRoute"},
    {Errc::geocode_failed, "GeocodeFailed"},
    {Errc::no_candidates, "NoCandidates"},
    {Errc::transport, "TransportError"},
    {Errc::scenario, "ScenarioError"},
}};

}  // namespace

std::string_view errc_name(Errc code) noexcept {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Error";
}

bool errc_from_name(std::string_view name, Errc& out) noexcept {
  for (const auto& [c, n] : kNames) {
    if (n == name) {
      out = c;
      return true;
    }
  }
  return false;
}

void throw_error(Errc code, const std::string& what) {
  switch (code) {
    case Errc::parse: throw ParseError(what);
    case Errc::integrity: throw IntegrityError(what);
    case Errc::level_out_of_range: throw LevelOutOfRange(what);
    case Errc::cover_too_large: throw CoverTooLarge(what);
    case Errc::malformed_cell_domain: throw MalformedCellDomain(what);
    case Errc::name_outside_suffix: throw NameOutsideSuffix(what);
    case Errc::resolution_failure: throw ResolutionFailure(what);
    case Errc::not_authorized: throw NotAuthorized(what);
    case Errc::not_implemented: throw NotImplemented(what);
    case Errc::unknown_node: throw UnknownNode(what);
    case Errc::snap_failed: throw SnapFailed(what);
    case Errc::unreachable: throw Unreachable(what);
    case Errc::no_fingerprint_coverage: throw NoFingerprintCoverage(what);
    case Errc::contract_violation: throw ContractViolation(what);
    case Errc::root_unavailable: throw RootUnavailable(what);
    case Errc::all_servers_failed: throw AllServersFailed(what);
    case Errc::no_route: throw NoRoute(what);
    case Errc::geocode_failed: throw GeocodeFailed(what);
    case Errc::no_candidates: throw NoCandidates(what);
    case Errc::transport: throw TransportError(what);
    case Errc::scenario: throw ScenarioError(what);
  }
  throw Error(code, what);
}

}  // namespace fedmap
