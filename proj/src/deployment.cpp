#include <filesystem>
#include <set>

#include "fedmap/error.hpp"
#include "fedmap/harness.hpp"

namespace fedmap {

namespace {

std::vector<MapDocument> load_documents(const Scenario& s) {
  std::vector<MapDocument> docs;
  for (std::size_t i = 0; i < s.servers.size(); ++i) {
    const std::filesystem::path p = std::filesystem::path(s.base_dir) / s.servers[i].map;
    try {
      docs.push_back(load_map_document_file(p.string()));
    } catch (const Error& e) {
      throw ScenarioError("servers[" + std::to_string(i) + "].map: " + e.what());
    }
  }
  return docs;
}

}  // namespace

Deployment::Deployment(const Scenario& s, DeploymentOptions opts)
    : Deployment(s, load_documents(s), std::move(opts)) {}

Deployment::Deployment(const Scenario& s, std::vector<MapDocument> docs, DeploymentOptions opts)
    : scenario_(s), docs_(std::move(docs)) {
  if (docs_.size() != scenario_.servers.size()) {
    throw ScenarioError("expected one document per server");
  }
  start(std::move(opts));
}

Deployment::~Deployment() {
  // Open keep-alive connections would otherwise hold each server's shutdown.
  transport_.reset();
  if (dns_) dns_->stop();
  for (auto& srv : servers_) srv->stop();
}

void Deployment::start(DeploymentOptions opts) {
  clock_ = opts.clock ? opts.clock : std::make_shared<ManualClock>();
  registry_ = std::make_unique<NameRegistry>(scenario_.suffix);
  transport_ = std::make_shared<HttpTransport>();
  std::set<std::string> map_ids;
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    const std::string where = "servers[" + std::to_string(i) + "]";
    if (!map_ids.insert(docs_[i].map_id).second) {
      throw ScenarioError(where + ": duplicate map_id '" + docs_[i].map_id + "'");
    }
    ServerConfig cfg = scenario_.servers[i].config;
    if (cfg.registration_level < 0) cfg.registration_level = scenario_.registration_level;
    std::shared_ptr<MapService> svc;
    try {
      svc = std::make_shared<MapService>(docs_[i], cfg);
    } catch (const Error& e) {
      throw ScenarioError(where + ": " + e.what());
    }
    servers_.push_back(std::make_unique<MapHttpServer>(svc));
    records_.push_back(svc->record(servers_.back()->endpoint()));
    try {
      name_counts_.push_back(
          register_document(*registry_, docs_[i], records_.back(), cfg.registration_level).size());
    } catch (const Error& e) {
      throw ScenarioError(where + ": registration failed: " + e.what());
    }
  }
  std::shared_ptr<RecordSource> source;
  if (opts.dns_wire) {
    dns_ = std::make_unique<dns::Server>(*registry_);
    source = std::make_shared<DnsRecordSource>("127.0.0.1", dns_->port());
  } else {
    source = std::make_shared<RegistrySource>(*registry_);
  }
  resolver_ = std::make_shared<Resolver>(source, scenario_.suffix, clock_);
}

const MapServerRecord& Deployment::record(const std::string& server_id) const {
  for (const MapServerRecord& r : records_) {
    if (r.server_id == server_id) return r;
  }
  throw ScenarioError("unknown server '" + server_id + "'");
}

MapHttpServer& Deployment::server(const std::string& server_id) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].server_id == server_id) return *servers_[i];
  }
  throw ScenarioError("unknown server '" + server_id + "'");
}

std::size_t Deployment::registered_names(const std::string& server_id) const {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].server_id == server_id) return name_counts_[i];
  }
  return 0;
}

FederationClient Deployment::client(const Credentials& creds, std::size_t search_limit) {
  ClientOptions o;
  o.registration_level = scenario_.registration_level;
  if (scenario_.root) o.root = record(*scenario_.root);
  o.credentials = creds;
  o.search_limit = search_limit;
  return FederationClient(resolver_, transport_, o);
}

OracleWorld::OracleWorld(const std::vector<MapDocument>& docs, std::size_t search_limit) {
  MapDocument merged;
  merged.map_id = "oracle";
  std::map<std::string, std::size_t> node_at, way_at, rel_at;
  Rect box{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const MapDocument& doc : docs) {
    if (!doc.frame.is_geo()) continue;
    for (const Point2& v : doc.boundary) {
      box = {std::min(box.x_min, v.x), std::min(box.y_min, v.y), std::max(box.x_max, v.x),
             std::max(box.y_max, v.y)};
    }
    for (const MapNode& n : doc.nodes) {
      auto [it, inserted] = node_at.emplace(n.id, merged.nodes.size());
      if (inserted) {
        merged.nodes.push_back(n);
        continue;
      }
      MapNode& have = merged.nodes[it->second];
      if (have.position != n.position) {
        throw ScenarioError("node '" + n.id + "' has conflicting positions in '" + doc.map_id + "'");
      }
      have.is_portal = have.is_portal || n.is_portal;
      for (const auto& [k, v] : n.tags) have.tags.emplace(k, v);
    }
    for (const MapWay& w : doc.ways) {
      auto [it, inserted] = way_at.emplace(w.id, merged.ways.size());
      if (inserted) {
        merged.ways.push_back(w);
      } else if (merged.ways[it->second].node_ids != w.node_ids) {
        throw ScenarioError("way '" + w.id + "' differs in '" + doc.map_id + "'");
      }
    }
    for (const MapRelation& r : doc.relations) {
      auto [it, inserted] = rel_at.emplace(r.id, merged.relations.size());
      if (inserted) {
        merged.relations.push_back(r);
      } else if (merged.relations[it->second].members != r.members) {
        throw ScenarioError("relation '" + r.id + "' differs in '" + doc.map_id + "'");
      }
    }
  }
  if (node_at.empty() && box.x_min == INFINITY) throw ScenarioError("no geo-frame document to merge");
  merged.boundary = {{box.x_min, box.y_min}, {box.x_max, box.y_min}, {box.x_max, box.y_max}, {box.x_min, box.y_max}};
  try {
    validate_map_document(merged);
  } catch (const IntegrityError& e) {
    throw ScenarioError(std::string("merged document is invalid: ") + e.what());
  }
  ServerConfig cfg;
  cfg.server_id = "oracle";
  for (ServiceKind k : kAllServices) cfg.auth[k] = AuthPolicy{};
  cfg.search_limit = search_limit;
  service_ = std::make_unique<MapService>(std::move(merged), std::move(cfg));
}

Path OracleWorld::route(const std::string& src, const std::string& dst) const {
  return service_->route(src, dst);
}

std::vector<SearchHit> OracleWorld::search(const std::vector<std::string>& keywords, const GeoPoint& p,
                                           double radius_m) const {
  return service_->search(keywords, QueryPoint{to_point(p), true}, radius_m);
}

VectorTile OracleWorld::tile(const CellId& cell) const { return service_->render_tile(cell); }

}  // namespace fedmap
