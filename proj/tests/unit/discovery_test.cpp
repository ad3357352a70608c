#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <sstream>
#include <thread>

#include "fedmap/error.hpp"
#include "fedmap/registry.hpp"
#include "fedmap/resolver.hpp"
#include "test_support.hpp"

namespace fedmap {
namespace {

MapServerRecord record(const std::string& id, int priority = 1, std::uint32_t ttl = 300) {
  MapServerRecord r;
  r.server_id = id;
  r.endpoint = "http://127.0.0.1:8080/" + id;
  r.services = {ServiceKind::search, ServiceKind::route};
  r.localization_techs = {"beacon-fingerprint"};
  r.priority = priority;
  r.ttl_s = ttl;
  return r;
}

const Polygon kNeRect{{10, 10}, {20, 10}, {20, 20}, {10, 20}};

TEST(Records, CanonicalText) {
  MapServerRecord r = record("grocery");
  r.services = {ServiceKind::tile, ServiceKind::geocode, ServiceKind::localize};
  r.localization_techs = {"beacon-fingerprint", "april-tag"};
  r.priority = -3;
  const std::string text = canonical_text(r);
  EXPECT_EQ(text,
            "v=of1;id=grocery;ep=http://127.0.0.1:8080/grocery;svc=geocode,localize,tile;"
            "loc=april-tag,beacon-fingerprint;pri=-3");
  EXPECT_EQ(parse_canonical_text(text, r.ttl_s), r);
  r.localization_techs.clear();
  EXPECT_EQ(parse_canonical_text(canonical_text(r), r.ttl_s), r);
}

TEST(Records, RejectsBadText) {
  EXPECT_THROW(parse_canonical_text("v=of2;id=a;ep=e;svc=tile;loc=;pri=1", 1), ParseError);
  EXPECT_THROW(parse_canonical_text("v=of1;id=a;ep=e;svc=teleport;loc=;pri=1", 1), ParseError);
  EXPECT_THROW(parse_canonical_text("v=of1;id=a;ep=e;svc=;loc=;pri=1", 1), ParseError);
  EXPECT_THROW(parse_canonical_text("v=of1;id=a;ep=e;svc=tile;loc=;pri=x", 1), ParseError);
  EXPECT_THROW(parse_canonical_text("v=of1;id=a;ep=e;svc=tile;pri=1", 1), ParseError);
  MapServerRecord bad = record("has space");
  EXPECT_THROW(validate_record(bad), ContractViolation);
}

TEST(Registry, RegisterZoneSingleCell) {
  NameRegistry reg("maps.test");
  const auto domains = register_zone(reg, kNeRect, record("A"), 1);
  EXPECT_EQ(domains, (std::vector<std::string>{"3.maps.test"}));
  EXPECT_EQ(lookup_records(reg, "3.maps.test"), (std::vector<MapServerRecord>{record("A")}));
}

TEST(Registry, RegistrationIsIdempotent) {
  NameRegistry reg("maps.test");
  register_zone(reg, kNeRect, record("A"), 1);
  register_zone(reg, kNeRect, record("A"), 1);
  EXPECT_EQ(lookup_records(reg, "3.maps.test").size(), 1u);
  EXPECT_EQ(deregister(reg, "A"), 1u);
  EXPECT_TRUE(lookup_records(reg, "3.maps.test").empty());
}

TEST(Registry, OverlappingServersShareNames) {
  NameRegistry reg("maps.test");
  register_zone(reg, kNeRect, record("B"), 1);
  register_zone(reg, kNeRect, record("A"), 1);
  const auto recs = lookup_records(reg, "3.maps.test");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].server_id, "A");
  EXPECT_EQ(recs[1].server_id, "B");
}

TEST(Registry, Deregister) {
  NameRegistry reg("maps.test");
  EXPECT_EQ(deregister(reg, "nobody"), 0u);
  const Polygon poly{{-79.99, 40.44}, {-79.98, 40.44}, {-79.98, 40.45}, {-79.99, 40.45}};
  const auto domains = register_zone(reg, poly, record("A"), 14);
  register_zone(reg, poly, record("A"), 14);
  EXPECT_EQ(deregister(reg, "A"), domains.size());
  for (const auto& d : domains) EXPECT_TRUE(lookup_records(reg, d).empty());
  EXPECT_TRUE(reg.entries().empty());
}

TEST(Registry, ExactNameLookup) {
  NameRegistry reg("maps.test");
  register_zone(reg, kNeRect, record("A"), 1);
  EXPECT_TRUE(lookup_records(reg, "0.3.maps.test").empty());
  EXPECT_TRUE(lookup_records(reg, "maps.test").empty());
  EXPECT_EQ(lookup_records(reg, "3.MAPS.TEST.").size(), 1u);
  EXPECT_THROW(lookup_records(reg, "3.other.test"), NameOutsideSuffix);
}

TEST(Registry, ZoneFileRoundTrip) {
  NameRegistry reg("maps.test");
  const Polygon poly{{-79.99, 40.44}, {-79.98, 40.44}, {-79.98, 40.45}, {-79.99, 40.45}};
  register_zone(reg, poly, record("A", 1, 60), 15);
  register_zone(reg, kNeRect, record("B", 2, 120), 3);
  const std::string zone = export_zone_file(reg);
  ASSERT_FALSE(zone.empty());
  EXPECT_NE(zone.find(" 120 IN TXT \"v=of1;id=B;"), std::string::npos);

  // Lines are ordered by reversed labels.
  std::vector<std::vector<std::string>> keys;
  std::istringstream in(zone);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> labels;
    ASSERT_TRUE(labels_under_suffix(line.substr(0, line.find(' ')), "maps.test", labels));
    keys.push_back(labels);
  }
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));

  NameRegistry copy("maps.test");
  EXPECT_EQ(import_zone_file(copy, zone), keys.size());
  EXPECT_EQ(export_zone_file(copy), zone);
  EXPECT_THROW(import_zone_file(copy, "3.maps.test 60 IN A 1.2.3.4\n"), ParseError);
}

class DiscoveryTest : public ::testing::Test {
 protected:
  NameRegistry reg{"maps.test"};
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  Resolver res{std::make_shared<RegistrySource>(reg), "maps.test", clock};
};

TEST_F(DiscoveryTest, PointInsidePolygonFindsServer) {
  const Polygon grocery{{-79.9905, 40.4410}, {-79.9895, 40.4410}, {-79.9895, 40.4418},
                        {-79.9905, 40.4418}};
  register_zone(reg, grocery, record("A"), 16);
  const Point2 inside{-79.9900, 40.4414};
  ASSERT_TRUE(polygon_contains(grocery, inside));
  const auto found = discover(res, GeoPoint(inside.y, inside.x), 16);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].record.server_id, "A");
}

TEST_F(DiscoveryTest, FalsePositiveBoundedByCoveringCell) {
  const Polygon grocery{{-79.9905, 40.4410}, {-79.9895, 40.4410}, {-79.9895, 40.4418},
                        {-79.9905, 40.4418}};
  const auto domains = register_zone(reg, grocery, record("A"), 16);
  // Take the covering cell of the polygon's SW corner and a point of that cell
  // that lies outside the polygon.
  const CellId corner = cell_from_point(GeoPoint(40.4410, -79.9905), 16);
  const CellBounds b = cell_bounds(corner);
  const Point2 outside{b.lon_min + 1e-7, b.lat_min + 1e-7};
  ASSERT_FALSE(polygon_contains(grocery, outside));
  ASSERT_NE(std::find(domains.begin(), domains.end(), cell_to_domain(corner, "maps.test")),
            domains.end());
  const auto found = discover(res, GeoPoint(outside.y, outside.x), 16);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].record.server_id, "A");
}

TEST_F(DiscoveryTest, RankingAndDedup) {
  register_zone(reg, kNeRect, record("p2", 2), 3);
  register_zone(reg, kNeRect, record("p1", 1), 3);
  register_zone(reg, kNeRect, record("coarse", 0), 1);
  // The same server at two depths keeps the deeper hit.
  register_zone(reg, kNeRect, record("p1", 1), 1);
  const auto found = discover(res, GeoPoint(15, 15), 8);
  ASSERT_EQ(found.size(), 3u);
  EXPECT_EQ(found[0].record.server_id, "p1");
  EXPECT_EQ(found[1].record.server_id, "p2");
  EXPECT_EQ(found[2].record.server_id, "coarse");
  EXPECT_GT(found[0].level, found[2].level);
  EXPECT_TRUE(discover(res, GeoPoint(-15, -15), 8).empty());
}

TEST_F(DiscoveryTest, SiblingsDoNotInterfere) {
  register_zone(reg, kNeRect, record("A"), 3);
  const CellId own = cell_from_point(GeoPoint(15, 15), 3);
  for (int d = 0; d < 4; ++d) {
    const CellId sibling = own.parent().child(d);
    if (sibling == own) continue;
    EXPECT_TRUE(res.resolve(cell_to_domain(sibling, "maps.test")).empty());
  }
}

TEST_F(DiscoveryTest, CacheHonorsTtl) {
  register_zone(reg, kNeRect, record("A", 1, 60), 1);
  EXPECT_EQ(res.resolve("3.maps.test").size(), 1u);
  deregister(reg, "A");
  clock->advance(Millis{59'999});
  EXPECT_EQ(res.resolve("3.maps.test").size(), 1u);
  clock->advance(Millis{2});
  EXPECT_TRUE(res.resolve("3.maps.test").empty());
}

TEST_F(DiscoveryTest, NegativeCaching) {
  EXPECT_TRUE(res.resolve("3.maps.test").empty());
  register_zone(reg, kNeRect, record("A"), 1);
  clock->advance(Millis{29'000});
  EXPECT_TRUE(res.resolve("3.maps.test").empty());
  clock->advance(Millis{1'001});
  EXPECT_EQ(res.resolve("3.maps.test").size(), 1u);
}

TEST_F(DiscoveryTest, SoundnessOnRandomZones) {
  std::mt19937_64 rng(31);
  std::vector<std::pair<Polygon, std::string>> zones;
  for (int k = 0; k < 5; ++k) {
    Polygon poly = testing::random_star_polygon(rng, {-79.99 + 0.01 * k, 40.44}, 0.002, 0.008);
    const std::string id = "z" + std::to_string(k);
    register_zone(reg, poly, record(id), 15);
    zones.emplace_back(std::move(poly), id);
  }
  for (int i = 0; i < 2000; ++i) {
    const auto& [poly, id] = zones[i % zones.size()];
    const Point2 p = testing::sample_inside(rng, poly);
    const auto found = discover(res, GeoPoint(p.y, p.x), 15);
    const bool hit = std::any_of(found.begin(), found.end(),
                                 [&](const DiscoveredServer& d) { return d.record.server_id == id; });
    ASSERT_TRUE(hit);
  }
}

class FailingSource : public RecordSource {
 public:
  std::vector<MapServerRecord> query(std::string_view) override {
    throw ResolutionFailure("authority down");
  }
};

TEST(Resolver, FailureWithoutCache) {
  auto clock = std::make_shared<ManualClock>();
  Resolver res(std::make_shared<FailingSource>(), "maps.test", clock);
  EXPECT_THROW(discover(res, GeoPoint(1, 1), 4), ResolutionFailure);
}

TEST(Registry, ConcurrentReadersSeeWholeWrites) {
  NameRegistry reg("maps.test");
  std::atomic<bool> stop{false};
  std::atomic<int> torn{0};
  const Polygon poly{{-79.99, 40.44}, {-79.98, 40.44}, {-79.98, 40.45}, {-79.99, 40.45}};
  const auto domains = cover_polygon(poly, 14, 4096);
  std::vector<std::string> names;
  for (const auto& c : domains) names.push_back(cell_to_domain(c, "maps.test"));
  std::thread reader([&] {
    while (!stop) {
      // Either every covering name has the record or none does.
      const auto e = reg.entries();
      if (!e.empty() && e.size() != names.size()) ++torn;
    }
  });
  for (int i = 0; i < 200; ++i) {
    reg.put_all(names, record("A"));
    reg.remove_server("A");
  }
  stop = true;
  reader.join();
  EXPECT_EQ(torn.load(), 0);
}

}  // namespace
}  // namespace fedmap
