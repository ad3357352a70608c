#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "fedmap/error.hpp"
#include "fedmap/harness.hpp"

namespace fedmap {

namespace {

constexpr double kOriginLon = -80.0;
constexpr double kOriginLat = 40.40;
constexpr double kStripWidth = 0.01;
constexpr double kStripHeight = 0.02;
constexpr int kNeighbours = 2;

const std::vector<std::string> kWords{"bakery", "cafe",   "library", "pharmacy", "museum", "garden",
                                      "market", "tailor", "florist", "gallery",  "kiosk",  "school"};

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

double round7(double v) { return std::round(v * 1e7) / 1e7; }

double dist2(const Point2& a, const Point2& b) {
  const double dx = (a.x - b.x) * std::cos(kOriginLat * std::acos(-1.0) / 180.0);
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace

GeneratedWorld gen_random_world(const GenParams& p) {
  if (p.zones < 1) throw ContractViolation("zones must be at least 1");
  if (p.nodes < p.zones) throw ContractViolation("nodes must be at least zones");
  if (p.portal_density < 0.0 || p.portal_density > 1.0) throw ContractViolation("portal_density must be in [0, 1]");
  std::mt19937_64 rng(p.seed);
  const auto n = static_cast<std::size_t>(p.nodes);

  std::vector<int> zone(n);
  std::vector<MapNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    zone[i] = i < static_cast<std::size_t>(p.zones) ? static_cast<int>(i) : static_cast<int>(pick(rng, p.zones));
    const double x = kOriginLon + kStripWidth * (zone[i] + 0.02 + 0.96 * u01(rng));
    const double y = kOriginLat + kStripHeight * (0.02 + 0.96 * u01(rng));
    nodes[i].id = "g:n" + std::to_string(i);
    nodes[i].position = {round7(x), round7(y)};
    if (pick(rng, 3) == 0) {
      const std::string& a = kWords[pick(rng, kWords.size())];
      nodes[i].tags["name"] = a + " " + std::to_string(i);
      nodes[i].tags["addr"] = "Block " + std::to_string(i);
    }
  }
  const auto allowed = [&](std::size_t a, std::size_t b) { return std::abs(zone[a] - zone[b]) <= 1; };

  // Prim's tree over the allowed pairs, then each node's nearest allowed neighbours.
  std::set<std::pair<std::size_t, std::size_t>> edges;
  const auto add_edge = [&](std::size_t a, std::size_t b) { edges.emplace(std::min(a, b), std::max(a, b)); };
  std::vector<double> best(n, INFINITY);
  std::vector<std::size_t> parent(n, n);
  std::vector<char> in_tree(n, 0);
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_tree[i] && (u == n || best[i] < best[u])) u = i;
    }
    in_tree[u] = 1;
    if (parent[u] != n) add_edge(u, parent[u]);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v] || !allowed(u, v)) continue;
      const double d = dist2(nodes[u].position, nodes[v].position);
      if (d < best[v]) {
        best[v] = d;
        parent[v] = u;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && allowed(i, j)) near.emplace_back(dist2(nodes[i].position, nodes[j].position), j);
    }
    const std::size_t k = std::min<std::size_t>(kNeighbours, near.size());
    std::partial_sort(near.begin(), near.begin() + k, near.end());
    for (std::size_t t = 0; t < k; ++t) add_edge(i, near[t].second);
  }

  std::vector<std::pair<std::size_t, std::size_t>> kept;
  for (const auto& [a, b] : edges) {
    if (zone[a] != zone[b] && u01(rng) >= p.portal_density) continue;
    kept.emplace_back(a, b);
    if (zone[a] != zone[b]) {
      nodes[a].is_portal = true;
      nodes[b].is_portal = true;
    }
  }

  GeneratedWorld w;
  Scenario& s = w.scenario;
  s.name = "gen-seed" + std::to_string(p.seed);
  s.registration_level = p.registration_level;
  s.root = "zone0";
  s.oracle = true;
  for (int z = 0; z < p.zones; ++z) {
    MapDocument doc;
    doc.map_id = "zone" + std::to_string(z);
    doc.address_prefix = "US/Sim/Zone" + std::to_string(z);
    const double x0 = kOriginLon + kStripWidth * z;
    const double x1 = x0 + kStripWidth;
    doc.boundary = {{x0, kOriginLat}, {x1, kOriginLat}, {x1, kOriginLat + kStripHeight}, {x0, kOriginLat + kStripHeight}};
    std::set<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (zone[i] == z) members.insert(i);
    }
    for (std::size_t e = 0; e < kept.size(); ++e) {
      const auto [a, b] = kept[e];
      if (zone[a] != z && zone[b] != z) continue;
      members.insert(a);
      members.insert(b);
      doc.ways.push_back({"g:w" + std::to_string(e), {nodes[a].id, nodes[b].id}, {{"highway", "footway"}}});
    }
    for (std::size_t i : members) doc.nodes.push_back(nodes[i]);
    validate_map_document(doc);
    w.documents.push_back(std::move(doc));

    ServerSpec spec;
    spec.map = "zone" + std::to_string(z) + ".json";
    spec.config.server_id = "zone" + std::to_string(z);
    for (ServiceKind k : kAllServices) spec.config.auth[k] = AuthPolicy{};
    spec.config.registration_level = p.registration_level;
    s.servers.push_back(std::move(spec));
  }

  const auto node_ref = [&](std::size_t i) {
    return nlohmann::json{{"node", nodes[i].id}, {"lat", nodes[i].position.y}, {"lon", nodes[i].position.x}};
  };
  for (int q = 0; q < p.route_queries; ++q) {
    const std::size_t a = pick(rng, n);
    std::size_t b = pick(rng, n);
    if (n > 1 && b == a) b = (a + 1) % n;
    s.queries.push_back({"route" + std::to_string(q), "route", {{"src", node_ref(a)}, {"dst", node_ref(b)}}, nlohmann::json::object(), {}, 0.0});
  }
  const double world_w = kStripWidth * p.zones;
  for (int q = 0; q < 5; ++q) {
    const double lon = round7(kOriginLon + world_w * u01(rng));
    const double lat = round7(kOriginLat + kStripHeight * u01(rng));
    const double radius = std::round(300.0 + 1200.0 * u01(rng));
    s.queries.push_back({"search" + std::to_string(q), "search",
                         {{"keywords", {kWords[pick(rng, kWords.size())]}}, {"lat", lat}, {"lon", lon}, {"radius_m", radius}},
                         nlohmann::json::object(), {}, 0.0});
  }
  for (int q = 0; q < 5; ++q) {
    const double lon = kOriginLon + world_w * u01(rng);
    const double lat = kOriginLat + kStripHeight * u01(rng);
    const CellId c = cell_from_point(GeoPoint(lat, lon), p.registration_level);
    s.queries.push_back({"tiles" + std::to_string(q), "tiles", {{"cells", {c.token()}}}, nlohmann::json::object(), {}, 0.0});
  }
  return w;
}

void write_world(const GeneratedWorld& w, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < w.documents.size(); ++i) {
    std::ofstream out(std::filesystem::path(dir) / w.scenario.servers.at(i).map);
    if (!out) throw ScenarioError("cannot write into '" + dir + "'");
    out << serialize_map_document(w.documents[i]) << '\n';
  }
  std::ofstream out(std::filesystem::path(dir) / "scenario.json");
  if (!out) throw ScenarioError("cannot write into '" + dir + "'");
  out << scenario_json(w.scenario).dump(2) << '\n';
}

}  // namespace fedmap
