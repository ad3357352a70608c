#include "fedmap/http_server.hpp"

#include <functional>

#include "fedmap/error.hpp"
#include "fedmap/wire.hpp"
#include "httplib.h"

namespace fedmap {

using nlohmann::json;

namespace {

Credentials credentials_of(const httplib::Request& req) {
  Credentials c;
  if (req.has_header(kUserHeader)) c.user_token = req.get_header_value(kUserHeader);
  if (req.has_header(kAppHeader)) c.app_token = req.get_header_value(kAppHeader);
  return c;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

using Handler = std::function<json(const MapService&, const httplib::Request&, const json&)>;

json result_array(auto&& items, auto&& to_json) {
  json out = json::array();
  for (const auto& it : items) out.push_back(to_json(it));
  return out;
}

}  // namespace

MapHttpServer::MapHttpServer(std::shared_ptr<const MapService> service, const std::string& host,
                             int port)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()), host_(host) {
  if (!service_) throw ContractViolation("server needs a service");
  server_->set_tcp_nodelay(true);
  install_routes();
  port_ = port == 0 ? server_->bind_to_any_port(host_) : (server_->bind_to_port(host_, port) ? port : -1);
  if (port_ <= 0) throw TransportError("cannot bind " + host_ + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MapHttpServer::~MapHttpServer() { stop(); }

void MapHttpServer::stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

void MapHttpServer::replace(std::shared_ptr<const MapService> service) {
  if (!service) throw ContractViolation("server needs a service");
  std::lock_guard lock(mutex_);
  service_ = std::move(service);
}

std::shared_ptr<const MapService> MapHttpServer::snapshot() const {
  std::lock_guard lock(mutex_);
  return service_;
}

void MapHttpServer::install_routes() {
  auto wrap = [this](ServiceKind kind, Handler handler) {
    return [this, kind, handler](const httplib::Request& req, httplib::Response& res) {
      const auto svc = snapshot();
      if (!svc->config().auth.contains(kind)) {
        reply(res, 501, {{"error", "not_implemented"},
                         {"reason", std::string(service_name(kind)) + " is not offered"}});
        return;
      }
      const AuthDecision d = svc->authorize(kind, credentials_of(req));
      if (!d.allowed) {
        reply(res, 403, {{"reason", d.reason}});
        return;
      }
      try {
        const json body = req.body.empty() ? json::object() : json::parse(req.body);
        json result = handler(*svc, req, body);
        reply(res, 200, {{"map_id", svc->document().map_id},
                         {"frame_id", svc->frame_id()},
                         {"result", std::move(result)}});
      } catch (const Error& e) {
        reply(res, 422, {{"error", errc_name(e.code())}, {"reason", e.what()}});
      } catch (const json::exception& e) {
        reply(res, 422, {{"error", "parse"}, {"reason", e.what()}});
      }
    };
  };

  server_->Post("/v1/geocode", wrap(ServiceKind::geocode, [](const MapService& s, const auto&, const json& b) {
    return result_array(s.geocode(b.at("address").get<std::string>()), [&](const GeocodeHit& h) {
      return wire::geocode_json(h, s.coarse_position(h.position));
    });
  }));
  server_->Post("/v1/reverse_geocode",
                wrap(ServiceKind::reverse_geocode, [](const MapService& s, const auto&, const json& b) {
                  const Point2 p{b.at("x").get<double>(), b.at("y").get<double>()};
                  return result_array(s.reverse_geocode(p, b.at("radius_m").get<double>()),
                                      wire::reverse_json);
                }));
  server_->Post("/v1/search", wrap(ServiceKind::search, [](const MapService& s, const auto&, const json& b) {
    const QueryPoint q{{b.at("x").get<double>(), b.at("y").get<double>()},
                       b.value("frame", std::string()) == "geo"};
    return result_array(
        s.search(b.at("keywords").get<std::vector<std::string>>(), q, b.at("radius_m").get<double>()),
        wire::search_json);
  }));
  server_->Post("/v1/route", wrap(ServiceKind::route, [](const MapService& s, const auto&, const json& b) {
    return wire::path_json(s.route(wire::endpoint_from(b.at("src")), wire::endpoint_from(b.at("dst"))));
  }));
  server_->Post("/v1/portal_costs", wrap(ServiceKind::route, [](const MapService& s, const auto&, const json& b) {
    return wire::portal_costs_json(s.portal_costs(wire::endpoint_from(b.at("entry"))));
  }));
  server_->Post("/v1/localize", wrap(ServiceKind::localize, [](const MapService& s, const auto&, const json& b) {
    return wire::pose_json(s.localize(b.at("beacon_rssi").get<std::map<std::string, double>>()));
  }));
  server_->Get(R"(/v1/tile/([0-3]*))",
               wrap(ServiceKind::tile, [](const MapService& s, const httplib::Request& req, const json&) {
                 return wire::tile_json(s.render_tile(CellId::from_token(req.matches[1].str())));
               }));
  server_->Get("/v1/info", [this](const httplib::Request&, httplib::Response& res) {
    const auto svc = snapshot();
    json services = json::array();
    for (ServiceKind k : svc->config().services()) services.push_back(service_name(k));
    reply(res, 200, {{"map_id", svc->document().map_id},
                     {"frame_id", svc->frame_id()},
                     {"result", {{"server_id", svc->config().server_id}, {"services", services}}}});
  });
}

}  // namespace fedmap
