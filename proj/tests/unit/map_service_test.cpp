#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "fedmap/error.hpp"
#include "fedmap/http_server.hpp"
#include "fedmap/map_service.hpp"
#include "httplib.h"
#include "json.hpp"
#include "test_support.hpp"

namespace fedmap {
namespace {

using nlohmann::json;

ServerConfig open_config(const std::string& id = "s") {
  ServerConfig cfg;
  cfg.server_id = id;
  for (ServiceKind k : kAllServices) cfg.auth[k] = AuthPolicy{};
  return cfg;
}

MapDocument local_doc(std::vector<MapNode> nodes, std::vector<MapWay> ways,
                      const std::string& prefix = "") {
  MapDocument doc;
  doc.map_id = "grocery";
  doc.frame.frame_id = "grocery-local";
  doc.frame.anchor = FrameAnchor{GeoPoint(40.4414, -79.99), 5.0};
  doc.address_prefix = prefix;
  doc.boundary = {{-100, -100}, {100, -100}, {100, 100}, {-100, 100}};
  doc.nodes = std::move(nodes);
  doc.ways = std::move(ways);
  validate_map_document(doc);
  return doc;
}

// n1 -(1 m)- n2 -(2 m)- p1, plus an isolated node.
MapService chain_service() {
  return MapService(local_doc({{"n1", {0, 0}, {}, false},
                               {"n2", {1, 0}, {}, false},
                               {"p1", {3, 0}, {}, true},
                               {"lone", {50, 50}, {}, false}},
                              {{"w1", {"n1", "n2", "p1"}, {}}}),
                    open_config());
}

TEST(Auth, Examples) {
  EXPECT_TRUE(authorize(AuthPolicy{}, {}).allowed);
  const AuthPolicy user{AuthMode::user, {"u1"}, {}};
  const AuthDecision d = authorize(user, {std::string("u2"), std::nullopt});
  EXPECT_FALSE(d.allowed);
  EXPECT_EQ(d.reason, "user");
  EXPECT_TRUE(authorize(user, {std::string("u1"), std::nullopt}).allowed);
  const AuthPolicy app{AuthMode::application, {}, {"a1"}};
  EXPECT_TRUE(authorize(app, {std::nullopt, std::string("a1")}).allowed);
  EXPECT_EQ(authorize(app, {std::string("u1"), std::nullopt}).reason, "application");
  EXPECT_THROW(validate_policy({AuthMode::user, {}, {}}), ContractViolation);
  EXPECT_THROW(validate_policy({AuthMode::application, {}, {}}), ContractViolation);
}

TEST(Auth, TilesOpenLocalizationRestricted) {
  ServerConfig cfg = open_config();
  cfg.auth[ServiceKind::localize] = {AuthMode::user, {"u1"}, {}};
  const MapService svc(local_doc({{"n1", {0, 0}, {}, false}}, {}), cfg);
  const Credentials u2{std::string("u2"), std::nullopt};
  EXPECT_TRUE(svc.authorize(ServiceKind::tile, u2).allowed);
  EXPECT_FALSE(svc.authorize(ServiceKind::localize, u2).allowed);
  EXPECT_TRUE(svc.authorize(ServiceKind::localize, {std::string("u1"), std::nullopt}).allowed);
}

TEST(Geocode, Examples) {
  const MapService svc(
      local_doc({{"n7", {2, 3}, {{"addr", "Aisle 4"}}, false}, {"n8", {2, 5}, {{"addr", "Aisle 40"}}, false}},
                {}, "US/PA/Pittsburgh/GroceryZone"),
      open_config());
  auto exact = svc.geocode("US/PA/Pittsburgh/GroceryZone/Aisle 4");
  ASSERT_EQ(exact.size(), 1u);
  EXPECT_EQ(exact[0].node_id, "n7");
  EXPECT_TRUE(exact[0].exact);
  auto suffix = svc.geocode("aisle 4");
  ASSERT_EQ(suffix.size(), 1u);
  EXPECT_EQ(suffix[0].node_id, "n7");
  EXPECT_FALSE(suffix[0].exact);
  EXPECT_TRUE(svc.geocode("Aisle 99").empty());
  // Suffixes match whole components only.
  EXPECT_TRUE(svc.geocode("isle 4").empty());
  EXPECT_EQ(svc.geocode("groceryzone/AISLE 40").at(0).node_id, "n8");
}

TEST(ReverseGeocode, Examples) {
  const MapService svc(local_doc({{"a", {0, 0}, {}, false}, {"b", {5, 0}, {}, false}, {"c", {15, 0}, {}, false}}, {}),
                       open_config());
  auto at = svc.reverse_geocode({0, 0}, 1);
  ASSERT_EQ(at.size(), 1u);
  EXPECT_EQ(at[0].node_id, "a");
  EXPECT_EQ(at[0].distance_m, 0.0);
  auto near = svc.reverse_geocode({0, 0}, 10);
  ASSERT_EQ(near.size(), 2u);
  EXPECT_EQ(near[1].node_id, "b");
  EXPECT_THROW(svc.reverse_geocode({0, 0}, 0), ContractViolation);
}

TEST(ReverseGeocode, MatchesBruteForceScan) {
  std::mt19937_64 rng(41);
  const MapDocument doc = testing::random_graph_doc(rng, 200, 150, true);
  const MapService svc(doc, open_config());
  std::uniform_real_distribution<double> ux(-80.0, -79.99), uy(40.44, 40.45), ur(1, 400);
  for (int q = 0; q < 1000; ++q) {
    const Point2 p{ux(rng), uy(rng)};
    const double radius = ur(rng);
    std::vector<std::pair<double, std::string>> expect;
    for (const MapNode& n : doc.nodes) {
      const double dx = (n.position.x - p.x) * std::cos((n.position.y + p.y) / 2 * std::numbers::pi / 180);
      const double dy = n.position.y - p.y;
      const double d = std::hypot(dx, dy) * kMetersPerDegree;
      if (d <= radius) expect.emplace_back(d, n.id);
    }
    std::sort(expect.begin(), expect.end());
    const auto got = svc.reverse_geocode(p, radius);
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].node_id, expect[i].second);
      EXPECT_NEAR(got[i].distance_m, expect[i].first, 1e-6);
    }
  }
}

TEST(Search, Examples) {
  const MapService svc(local_doc({{"snack", {10, 0}, {{"product", "Seaweed Snack"}}, false},
                                  {"far", {100, 0}, {{"product", "seaweed salad"}}, false},
                                  {"milk", {1, 0}, {{"product", "milk"}}, false}},
                                 {}),
                       open_config());
  auto hits = svc.search({"seaweed"}, {{0, 0}, false}, 20);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].node_id, "snack");
  EXPECT_EQ(hits[0].matched, 1);
  EXPECT_DOUBLE_EQ(hits[0].score, 1.0 / 11.0);
  EXPECT_TRUE(svc.search({"seaweed"}, {{0, 0}, false}, 5).empty());
  auto both = svc.search({"seaweed"}, {{0, 0}, false}, 200);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].node_id, "snack");
  EXPECT_EQ(both[1].node_id, "far");
  EXPECT_THROW(svc.search({}, {{0, 0}, false}, 5), ContractViolation);
}

TEST(Search, GeoQueryOnLocalFrameUsesAnchor) {
  const MapService svc(local_doc({{"snack", {10, 0}, {{"product", "seaweed"}}, false}}, {}), open_config());
  auto hits = svc.search({"seaweed"}, {{-79.99, 40.4414}, true}, 1);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].distance_m, 0.0);
  EXPECT_TRUE(svc.search({"seaweed"}, {{-79.98, 40.4414}, true}, 100).empty());
}

TEST(Search, RespectsLimit) {
  ServerConfig cfg = open_config();
  cfg.search_limit = 3;
  std::vector<MapNode> nodes;
  for (int i = 0; i < 10; ++i) nodes.push_back({"n" + std::to_string(i), {double(i), 0}, {{"k", "x"}}, false});
  const MapService svc(local_doc(nodes, {}), cfg);
  auto hits = svc.search({"x"}, {{0, 0}, false}, 100);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[2].node_id, "n2");
}

TEST(Route, ChainExamples) {
  const MapService svc = chain_service();
  const Path p = svc.route(std::string("n1"), std::string("p1"));
  EXPECT_EQ(p.nodes, (std::vector<std::string>{"n1", "n2", "p1"}));
  EXPECT_EQ(p.cost, 300);
  EXPECT_DOUBLE_EQ(p.cost_m(), 3.0);
  const Path self = svc.route(std::string("n1"), std::string("n1"));
  EXPECT_EQ(self.nodes, (std::vector<std::string>{"n1"}));
  EXPECT_EQ(self.cost, 0);
  EXPECT_THROW(svc.route(std::string("n1"), std::string("lone")), Unreachable);
  EXPECT_THROW(svc.route(std::string("n1"), std::string("nope")), UnknownNode);
}

TEST(Route, PointsSnap) {
  const MapService svc = chain_service();
  const Path p = svc.route(QueryPoint{{0.2, 0.3}, false}, QueryPoint{{3, 40}, false});
  EXPECT_EQ(p.nodes.front(), "n1");
  EXPECT_EQ(p.nodes.back(), "p1");
  // The isolated node is not routable, so this point has nothing within 50 m.
  EXPECT_THROW(svc.route(QueryPoint{{50, 50}, false}, std::string("n1")), SnapFailed);
  EXPECT_THROW(svc.route(QueryPoint{{0, 0}, true}, std::string("n1")), SnapFailed);
}

TEST(Route, EqualCostTieBreaksLexicographically) {
  // Two equal-length routes a->d: via b and via c.
  const MapService svc(local_doc({{"a", {0, 0}, {}, false},
                                  {"c", {1, 1}, {}, false},
                                  {"b", {1, -1}, {}, false},
                                  {"d", {2, 0}, {}, false}},
                                 {{"w1", {"a", "c", "d"}, {}}, {"w2", {"a", "b", "d"}, {}}}),
                       open_config());
  EXPECT_EQ(svc.route(std::string("a"), std::string("d")).nodes,
            (std::vector<std::string>{"a", "b", "d"}));
}

// Exhaustive search over simple paths for graphs with at most 10 nodes.
std::optional<Path> brute_force_route(const MapDocument& doc, const std::string& s, const std::string& t) {
  std::map<std::string, std::vector<std::pair<std::string, Cost>>> adj;
  for (const MapWay& w : doc.ways) {
    for (std::size_t i = 0; i + 1 < w.node_ids.size(); ++i) {
      const Cost c = quantize_length(frame_distance_m(doc.find_node(w.node_ids[i])->position,
                                                      doc.find_node(w.node_ids[i + 1])->position,
                                                      doc.frame.is_geo()));
      adj[w.node_ids[i]].emplace_back(w.node_ids[i + 1], c);
      adj[w.node_ids[i + 1]].emplace_back(w.node_ids[i], c);
    }
  }
  std::optional<Path> best;
  std::vector<std::string> stack{s};
  std::set<std::string> on_path{s};
  std::function<void(Cost)> dfs = [&](Cost cost) {
    if (stack.back() == t) {
      if (!best || cost < best->cost || (cost == best->cost && stack < best->nodes)) best = Path{stack, cost};
      return;
    }
    for (const auto& [next, w] : adj[stack.back()]) {
      if (on_path.contains(next)) continue;
      stack.push_back(next);
      on_path.insert(next);
      dfs(cost + w);
      on_path.erase(next);
      stack.pop_back();
    }
  };
  dfs(0);
  return best;
}

TEST(Route, MatchesExhaustiveOracleOnSmallGraphs) {
  std::mt19937_64 rng(43);
  int compared = 0;
  for (int g = 0; g < 200; ++g) {
    const int n = 3 + static_cast<int>(rng() % 8);
    const MapDocument doc = testing::random_graph_doc(rng, n, n + static_cast<int>(rng() % 8), g % 2 == 0);
    const MapService svc(doc, open_config());
    for (int q = 0; q < 5; ++q) {
      const std::string s = doc.nodes[rng() % n].id;
      const std::string t = doc.nodes[rng() % n].id;
      const auto oracle = brute_force_route(doc, s, t);
      if (!oracle) {
        EXPECT_THROW(svc.route(s, t), Unreachable);
        continue;
      }
      EXPECT_EQ(svc.route(s, t), *oracle) << "graph " << g << " " << s << "->" << t;
      ++compared;
    }
  }
  EXPECT_GT(compared, 400);
}

TEST(PortalCosts, Examples) {
  const MapService svc = chain_service();
  const PortalCosts pc = svc.portal_costs(std::string("n1"));
  ASSERT_EQ(pc.portals.size(), 1u);
  EXPECT_EQ(pc.portals.at("p1").path.cost, 300);
  EXPECT_EQ(pc.portals.at("p1").position, (Point2{3, 0}));
  EXPECT_EQ(pc.entry.node_id, "n1");
  const MapService none(local_doc({{"a", {0, 0}, {}, false}, {"b", {1, 0}, {}, false}}, {{"w", {"a", "b"}, {}}}),
                        open_config());
  EXPECT_TRUE(none.portal_costs(std::string("a")).portals.empty());
  EXPECT_TRUE(svc.portal_costs(std::string("lone")).portals.empty());
}

TEST(PortalCosts, MatchRouteAndSatisfyTriangle) {
  std::mt19937_64 rng(44);
  for (int g = 0; g < 40; ++g) {
    const MapDocument doc = testing::random_graph_doc(rng, 60, 120, g % 2 == 1);
    const MapService svc(doc, open_config());
    for (int q = 0; q < 5; ++q) {
      const std::string e = doc.nodes[rng() % doc.nodes.size()].id;
      const PortalCosts pc = svc.portal_costs(e);
      for (const MapNode& n : doc.nodes) {
        if (!n.is_portal) continue;
        auto it = pc.portals.find(n.id);
        if (it == pc.portals.end()) {
          EXPECT_THROW(svc.route(e, n.id), Unreachable);
          continue;
        }
        EXPECT_EQ(it->second.path, svc.route(e, n.id));
      }
      for (const auto& [q_id, via] : pc.portals) {
        const PortalCosts from_q = svc.portal_costs(q_id);
        for (const auto& [p_id, direct] : pc.portals) {
          EXPECT_LE(direct.path.cost, via.path.cost + from_q.portals.at(p_id).path.cost);
        }
      }
    }
  }
}

TEST(Localize, Examples) {
  ServerConfig cfg = open_config();
  cfg.fingerprints = {{{1, 1}, {{"b1", -40}, {"b2", -70}}}, {{5, 5}, {{"b2", -50}, {"b3", -60}}}};
  const MapService svc(local_doc({{"n1", {0, 0}, {}, false}}, {}), cfg);
  const PoseEstimate exact = svc.localize({{"b1", -40}, {"b2", -70}});
  EXPECT_EQ(exact.position, (Point2{1, 1}));
  EXPECT_EQ(exact.confidence, 1.0);
  EXPECT_EQ(exact.frame_id, "grocery-local");
  EXPECT_FALSE(exact.heading_deg);
  EXPECT_THROW(svc.localize({{"zz", -40}}), NoFingerprintCoverage);
  EXPECT_THROW(svc.localize({}), ContractViolation);
}

TEST(Localize, MatchesExhaustiveScan) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> rssi(-95, -30), pos(0, 50);
  const std::vector<std::string> beacons{"b0", "b1", "b2", "b3", "b4", "b5", "b6", "b7"};
  ServerConfig cfg = open_config();
  for (int f = 0; f < 40; ++f) {
    BeaconFingerprint fp{{pos(rng), pos(rng)}, {}};
    for (const auto& b : beacons) {
      if (rng() % 3 == 0) fp.rssi_by_beacon[b] = rssi(rng);
    }
    if (fp.rssi_by_beacon.empty()) fp.rssi_by_beacon["b0"] = rssi(rng);
    cfg.fingerprints.push_back(fp);
  }
  const MapService svc(local_doc({{"n1", {0, 0}, {}, false}}, {}), cfg);
  for (int q = 0; q < 500; ++q) {
    std::map<std::string, double> cue;
    for (const auto& b : beacons) {
      if (rng() % 2 == 0) cue[b] = rssi(rng);
    }
    if (cue.empty()) cue["b3"] = rssi(rng);
    double best = INFINITY;
    const BeaconFingerprint* best_fp = nullptr;
    for (const auto& fp : cfg.fingerprints) {
      double sum = 0;
      bool shared = false;
      for (const auto& b : beacons) {
        const bool in_cue = cue.contains(b), in_fp = fp.rssi_by_beacon.contains(b);
        shared = shared || (in_cue && in_fp);
        if (!in_cue && !in_fp) continue;
        const double diff = (in_cue ? cue[b] : -100.0) - (in_fp ? fp.rssi_by_beacon.at(b) : -100.0);
        sum += diff * diff;
      }
      if (shared && std::sqrt(sum) < best) {
        best = std::sqrt(sum);
        best_fp = &fp;
      }
    }
    if (!best_fp) {
      EXPECT_THROW(svc.localize(cue), NoFingerprintCoverage);
      continue;
    }
    const PoseEstimate est = svc.localize(cue);
    EXPECT_EQ(est.position, best_fp->position);
    EXPECT_NEAR(est.confidence, 1.0 / (1.0 + best), 1e-12);
  }
}

MapDocument geo_doc(std::vector<MapNode> nodes, std::vector<MapWay> ways) {
  MapDocument doc;
  doc.map_id = "street";
  doc.boundary = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  doc.nodes = std::move(nodes);
  doc.ways = std::move(ways);
  validate_map_document(doc);
  return doc;
}

TEST(Tile, NodeAndClippedWay) {
  // Level-8 cell 3,0,0,0,0,0,0,0 spans lat [0, 0.703125], lon [0, 1.40625].
  const CellId cell = cell_from_point(GeoPoint(0.1, 0.1), 8);
  const CellBounds b = cell_bounds(cell);
  const MapService svc(geo_doc({{"in", {0.2, 0.2}, {}, false},
                                {"out", {-0.5, 0.2}, {}, false},
                                {"far", {0.2, 0.9}, {}, false}},
                               {{"w", {"out", "in", "far"}, {{"highway", "path"}}}}),
                       open_config());
  const VectorTile t = svc.render_tile(cell);
  EXPECT_EQ(t.frame_id, "geo");
  std::set<std::string> ids;
  for (const auto& f : t.features) ids.insert(f.id);
  EXPECT_EQ(ids, (std::set<std::string>{"in", "w"}));
  const auto& way = *std::find_if(t.features.begin(), t.features.end(), [](auto& f) { return f.is_way; });
  EXPECT_EQ(way.map_id, "street");
  ASSERT_EQ(way.geometry.size(), 1u);
  ASSERT_EQ(way.geometry[0].size(), 3u);
  EXPECT_EQ(way.geometry[0].front().x, b.lon_min);
  EXPECT_EQ(way.geometry[0].back().y, b.lat_max);
  for (const auto& line : way.geometry) {
    for (const Point2& p : line) EXPECT_TRUE(b.rect().contains(p));
  }
}

TEST(Tile, LocalFrameReturnsUnclippedFeaturesNearAnchor) {
  const MapService svc = chain_service();
  const VectorTile near = svc.render_tile(cell_from_point(GeoPoint(40.4414, -79.99), 16));
  EXPECT_EQ(near.frame_id, "grocery-local");
  EXPECT_EQ(near.features.size(), 5u);  // 4 nodes + 1 way
  EXPECT_TRUE(svc.render_tile(cell_from_point(GeoPoint(10, 10), 16)).features.empty());
}

TEST(Tile, ChildrenUnionEqualsParent) {
  std::mt19937_64 rng(46);
  for (int g = 0; g < 30; ++g) {
    const MapDocument doc = testing::random_graph_doc(rng, 150, 200, true);
    const MapService svc(doc, open_config());
    std::uniform_real_distribution<double> ux(-80.0, -79.99), uy(40.44, 40.45);
    for (int level : {12, 14, 15, 16}) {
      const CellId parent = cell_from_point(GeoPoint(uy(rng), ux(rng)), level);
      std::set<std::string> parent_ids, child_ids;
      for (const auto& f : svc.render_tile(parent).features) parent_ids.insert(f.id);
      for (int d = 0; d < 4; ++d) {
        const VectorTile child = svc.render_tile(parent.child(d));
        const Rect r = cell_bounds(parent.child(d)).rect();
        for (const auto& f : child.features) {
          child_ids.insert(f.id);
          for (const auto& line : f.geometry) {
            for (const Point2& p : line) EXPECT_TRUE(r.contains(p));
          }
        }
      }
      EXPECT_EQ(parent_ids, child_ids) << "level " << level;
    }
  }
}

class HttpServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ServerConfig cfg;
    cfg.server_id = "grocery";
    cfg.auth[ServiceKind::tile] = {};
    cfg.auth[ServiceKind::route] = {};
    cfg.auth[ServiceKind::localize] = {AuthMode::user, {"u1"}, {}};
    cfg.auth[ServiceKind::search] = {AuthMode::application, {}, {"app"}};
    cfg.fingerprints = {{{1, 1}, {{"b1", -40}}}};
    const MapService base = chain_service();
    service = std::make_shared<MapService>(base.document(), cfg);
    server = std::make_unique<MapHttpServer>(service);
    client = std::make_unique<httplib::Client>("127.0.0.1", server->port());
  }

  std::pair<int, json> post(const std::string& path, const json& body, httplib::Headers h = {}) {
    auto res = client->Post(path, h, body.dump(), "application/json");
    if (!res) return {0, {}};
    return {res->status, json::parse(res->body)};
  }

  std::shared_ptr<MapService> service;
  std::unique_ptr<MapHttpServer> server;
  std::unique_ptr<httplib::Client> client;
};

TEST_F(HttpServerTest, RouteEnvelope) {
  auto [status, body] = post("/v1/route", {{"src", "n1"}, {"dst", "p1"}});
  ASSERT_EQ(status, 200);
  EXPECT_EQ(body["map_id"], "grocery");
  EXPECT_EQ(body["frame_id"], "grocery-local");
  EXPECT_EQ(body["result"]["nodes"], json({"n1", "n2", "p1"}));
  EXPECT_EQ(body["result"]["cost_cm"], 300);
}

TEST_F(HttpServerTest, ErrorStatuses) {
  EXPECT_EQ(post("/v1/route", {{"src", "n1"}, {"dst", "lone"}}).second["error"], "Unreachable");
  EXPECT_EQ(post("/v1/route", {{"src", "n1"}, {"dst", "lone"}}).first, 422);
  EXPECT_EQ(post("/v1/route", {{"src", "n1"}}).first, 422);
  EXPECT_EQ(post("/v1/geocode", {{"address", "x"}}).first, 501);
  auto denied = post("/v1/localize", {{"beacon_rssi", {{"b1", -40}}}}, {{kUserHeader, "u2"}});
  EXPECT_EQ(denied.first, 403);
  EXPECT_EQ(denied.second["reason"], "user");
  EXPECT_FALSE(denied.second.contains("result"));
  auto allowed = post("/v1/localize", {{"beacon_rssi", {{"b1", -40}}}}, {{kUserHeader, "u1"}});
  EXPECT_EQ(allowed.first, 200);
  EXPECT_EQ(allowed.second["result"]["confidence"], 1.0);
  EXPECT_EQ(post("/v1/search", {{"keywords", {"x"}}, {"x", 0}, {"y", 0}, {"radius_m", 5}}).first, 403);
  EXPECT_EQ(post("/v1/search", {{"keywords", {"x"}}, {"x", 0}, {"y", 0}, {"radius_m", 5}}, {{kAppHeader, "app"}}).first,
            200);
}

TEST_F(HttpServerTest, TileAndSnapshotSwap) {
  auto res = client->Get("/v1/tile/" + cell_from_point(GeoPoint(40.4414, -79.99), 16).token());
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["result"]["features"].size(), 5u);
  ServerConfig cfg = service->config();
  cfg.auth.erase(ServiceKind::tile);
  server->replace(std::make_shared<MapService>(service->document(), cfg));
  res = client->Get("/v1/tile/0");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 501);
}

}  // namespace
}  // namespace fedmap
