#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "fedmap/map_service.hpp"

namespace httplib {
class Server;
}

namespace fedmap {

inline constexpr const char* kUserHeader = "X-OF-User";
inline constexpr const char* kAppHeader = "X-OF-App";

/// HTTP/JSON front end of one MapService, listening on its own thread.
/// Requests run against a snapshot; replace() swaps it atomically.
class MapHttpServer {
 public:
  /// Binds immediately (port 0 picks an ephemeral port). Throws TransportError.
  MapHttpServer(std::shared_ptr<const MapService> service, const std::string& host = "127.0.0.1",
                int port = 0);
  ~MapHttpServer();
  MapHttpServer(const MapHttpServer&) = delete;
  MapHttpServer& operator=(const MapHttpServer&) = delete;

  int port() const { return port_; }
  const std::string& host() const { return host_; }
  std::string endpoint() const { return "http://" + host_ + ":" + std::to_string(port_); }

  void replace(std::shared_ptr<const MapService> service);
  std::shared_ptr<const MapService> snapshot() const;
  void stop();

 private:
  void install_routes();

  mutable std::mutex mutex_;
  std::shared_ptr<const MapService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::string host_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace fedmap
