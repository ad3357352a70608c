#include <mutex>

#include "fedmap/error.hpp"
#include "fedmap/federation.hpp"
#include "fedmap/http_server.hpp"
#include "httplib.h"

namespace fedmap {

using nlohmann::json;

struct HttpTransport::Connection {
  explicit Connection(const std::string& endpoint) : client(endpoint) {}
  std::mutex mutex;
  httplib::Client client;
};

HttpTransport::HttpTransport(Millis timeout, int retries) : timeout_(timeout), retries_(retries) {}

HttpTransport::~HttpTransport() = default;

HttpTransport::Connection& HttpTransport::connection(const std::string& endpoint) {
  std::lock_guard lock(mutex_);
  auto& slot = connections_[endpoint];
  if (!slot) {
    slot = std::make_unique<Connection>(endpoint);
    if (!slot->client.is_valid()) throw TransportError("bad endpoint '" + endpoint + "'");
    slot->client.set_keep_alive(true);
    slot->client.set_tcp_nodelay(true);
    slot->client.set_connection_timeout(timeout_);
    slot->client.set_read_timeout(timeout_);
    slot->client.set_write_timeout(timeout_);
  }
  return *slot;
}

namespace {

httplib::Headers headers_for(const Credentials& creds) {
  httplib::Headers h;
  if (creds.user_token) h.emplace(kUserHeader, *creds.user_token);
  if (creds.app_token) h.emplace(kAppHeader, *creds.app_token);
  return h;
}

MapServerTransport::Response to_response(const httplib::Result& res) {
  MapServerTransport::Response out;
  out.status = res->status;
  out.body = json::parse(res->body, nullptr, false);
  return out;
}

}  // namespace

MapServerTransport::Response HttpTransport::post(const std::string& endpoint, const std::string& path,
                                                 const json& body, const Credentials& creds) {
  Connection& c = connection(endpoint);
  std::lock_guard lock(c.mutex);
  const std::string payload = body.dump();
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    auto res = c.client.Post(path, headers_for(creds), payload, "application/json");
    if (res) return to_response(res);
  }
  throw TransportError("POST " + endpoint + path + " failed");
}

MapServerTransport::Response HttpTransport::get(const std::string& endpoint, const std::string& path,
                                                const Credentials& creds) {
  Connection& c = connection(endpoint);
  std::lock_guard lock(c.mutex);
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    auto res = c.client.Get(path, headers_for(creds));
    if (res) return to_response(res);
  }
  throw TransportError("GET " + endpoint + path + " failed");
}

namespace {

ServerReply unwrap(const MapServerRecord& server, const std::string& path,
                   const MapServerTransport::Response& r) {
  const std::string where = server.server_id + " " + path;
  if (r.status == 200 && r.body.is_object() && r.body.contains("result")) {
    return {r.body.value("map_id", std::string()), r.body.value("frame_id", std::string()),
            r.body["result"]};
  }
  const std::string reason = r.body.is_object() ? r.body.value("reason", std::string()) : std::string();
  switch (r.status) {
    case 403: throw NotAuthorized(where + ": " + reason);
    case 501: throw NotImplemented(where + ": " + reason);
    case 422: {
      Errc code = Errc::contract_violation;
      if (r.body.is_object()) errc_from_name(r.body.value("error", std::string()), code);
      throw_error(code, where + ": " + reason);
    }
    default:
      throw TransportError(where + ": unexpected status " + std::to_string(r.status));
  }
}

}  // namespace

ServerReply call_server(MapServerTransport& t, const MapServerRecord& server, const std::string& path,
                        const json& body, const Credentials& creds) {
  return unwrap(server, path, t.post(server.endpoint, path, body, creds));
}

ServerReply get_server(MapServerTransport& t, const MapServerRecord& server, const std::string& path,
                       const Credentials& creds) {
  return unwrap(server, path, t.get(server.endpoint, path, creds));
}

}  // namespace fedmap
