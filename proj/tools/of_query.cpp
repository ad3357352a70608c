#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fedmap/dns_wire.hpp"
#include "fedmap/error.hpp"
#include "fedmap/federation.hpp"
#include "fedmap/harness.hpp"

namespace {

using fedmap::GeoPoint;

std::pair<std::string, std::uint16_t> split_host_port(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) throw fedmap::ContractViolation("expected host:port, got '" + s + "'");
  return {s.substr(0, colon), static_cast<std::uint16_t>(std::stoi(s.substr(colon + 1)))};
}

std::optional<GeoPoint> parse_latlon(const std::string& s) {
  std::istringstream in(s);
  double lat = 0, lon = 0;
  char comma = 0;
  if (in >> lat >> comma >> lon && comma == ',' && (in >> std::ws).eof()) return GeoPoint(lat, lon);
  return std::nullopt;
}

/// "lat,lon" is a point, "node@lat,lon" a node reference, anything else an address.
fedmap::RouteEnd parse_route_end(const std::string& s) {
  if (const auto at = s.find('@'); at != std::string::npos) {
    if (auto g = parse_latlon(s.substr(at + 1))) return fedmap::NodeRef{s.substr(0, at), *g};
  }
  if (auto g = parse_latlon(s)) return *g;
  return s;
}

fedmap::MapServerRecord root_record(fedmap::MapServerTransport& t, const std::string& endpoint,
                                    const fedmap::Credentials& creds) {
  fedmap::MapServerRecord probe;
  probe.server_id = "root";
  probe.endpoint = endpoint;
  const fedmap::ServerReply info = fedmap::get_server(t, probe, "/v1/info", creds);
  fedmap::MapServerRecord rec;
  rec.server_id = info.result.at("server_id").get<std::string>();
  rec.endpoint = endpoint;
  for (const auto& name : info.result.at("services")) {
    if (auto k = fedmap::service_from_name(name.get<std::string>())) rec.services.insert(*k);
  }
  return rec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query a running map federation"};
  app.require_subcommand(1);
  std::string dns = "127.0.0.1:5353", suffix = "maps.test", root, user, appname;
  int level = fedmap::kDefaultRegistrationLevel;
  std::size_t limit = fedmap::kDefaultSearchLimit;
  app.add_option("--dns", dns, "Discovery frontend host:port");
  app.add_option("--suffix", suffix, "Discovery suffix");
  app.add_option("--level", level, "Registration level")->check(CLI::Range(0, fedmap::kMaxCellLevel));
  app.add_option("--root", root, "Root server endpoint (for geocoding)");
  app.add_option("--user", user, "User token");
  app.add_option("--app", appname, "Application token");
  app.add_option("--limit", limit, "Search result limit");

  double lat = 0, lon = 0, radius = 500;
  std::string service, address, from, to;
  std::vector<std::string> keywords, cues, cells;

  auto* discover = app.add_subcommand("discover", "List servers covering a point");
  discover->add_option("--lat", lat)->required();
  discover->add_option("--lon", lon)->required();
  discover->add_option("--service", service, "Only servers offering this service");

  auto* geocode = app.add_subcommand("geocode", "Resolve an address");
  geocode->add_option("address", address)->required();

  auto* search = app.add_subcommand("search", "Keyword search around a point");
  search->add_option("--lat", lat)->required();
  search->add_option("--lon", lon)->required();
  search->add_option("--radius", radius, "Radius in meters");
  search->add_option("keywords", keywords)->required();

  auto* route = app.add_subcommand("route", "Stitched route between two ends");
  route->add_option("--from", from, "Address, lat,lon or node@lat,lon")->required();
  route->add_option("--to", to, "Address, lat,lon or node@lat,lon")->required();

  auto* localize = app.add_subcommand("localize", "Pose from beacon readings");
  localize->add_option("--lat", lat)->required();
  localize->add_option("--lon", lon)->required();
  localize->add_option("--cue", cues, "beacon=rssi")->required();

  auto* tiles = app.add_subcommand("tiles", "Compose tiles for cells");
  tiles->add_option("cells", cells, "Cell tokens")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    const auto [host, port] = split_host_port(dns);
    auto clock = std::make_shared<fedmap::SystemClock>();
    auto resolver = std::make_shared<fedmap::Resolver>(std::make_shared<fedmap::DnsRecordSource>(host, port),
                                                       suffix, clock);
    auto transport = std::make_shared<fedmap::HttpTransport>();
    fedmap::ClientOptions opts;
    opts.registration_level = level;
    opts.search_limit = limit;
    if (!user.empty()) opts.credentials.user_token = user;
    if (!appname.empty()) opts.credentials.app_token = appname;
    if (!root.empty()) opts.root = root_record(*transport, root, opts.credentials);
    fedmap::FederationClient client(resolver, transport, opts);

    nlohmann::json out;
    if (*discover) {
      const GeoPoint p(lat, lon);
      if (service.empty()) {
        out = fedmap::discovered_json(fedmap::discover(*resolver, p, level));
      } else {
        const auto kind = fedmap::service_from_name(service);
        if (!kind) throw fedmap::ContractViolation("unknown service '" + service + "'");
        out = fedmap::discovered_json(client.discover_servers(p, level, *kind));
      }
    } else if (*geocode) {
      out = fedmap::geocode_result_json(client.federated_geocode(address));
    } else if (*search) {
      out = fedmap::search_result_json(client.federated_search(keywords, GeoPoint(lat, lon), radius));
    } else if (*route) {
      out = fedmap::stitched_path_json(client.federated_route(parse_route_end(from), parse_route_end(to)));
    } else if (*localize) {
      std::map<std::string, double> readings;
      for (const std::string& c : cues) {
        const auto eq = c.find('=');
        if (eq == std::string::npos) throw fedmap::ContractViolation("cue must be beacon=rssi, got '" + c + "'");
        readings[c.substr(0, eq)] = std::stod(c.substr(eq + 1));
      }
      out = fedmap::localized_pose_json(
          client.federated_localize(readings, GeoPoint(lat, lon), nullptr, clock->now()));
    } else if (*tiles) {
      std::vector<fedmap::CellId> viewport;
      for (const std::string& t : cells) viewport.push_back(fedmap::CellId::from_token(t));
      out = fedmap::composed_tiles_json(client.federated_tiles(viewport));
    }
    std::cout << out.dump(2) << '\n';
  } catch (const fedmap::Error& e) {
    std::cout << nlohmann::json{{"error", fedmap::errc_name(e.code())}, {"reason", e.what()}}.dump(2) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "of-query: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
