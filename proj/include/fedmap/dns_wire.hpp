#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fedmap/resolver.hpp"

namespace fedmap {

class NameRegistry;

namespace dns {

inline constexpr std::uint16_t kTypeA = 1;
inline constexpr std::uint16_t kTypeTxt = 16;
inline constexpr std::uint16_t kClassIn = 1;

inline constexpr std::uint8_t kRcodeNoError = 0;
inline constexpr std::uint8_t kRcodeFormErr = 1;
inline constexpr std::uint8_t kRcodeNxDomain = 3;
inline constexpr std::uint8_t kRcodeNotImp = 4;
inline constexpr std::uint8_t kRcodeRefused = 5;

inline constexpr std::size_t kMaxUdpPayload = 512;

using Bytes = std::vector<std::uint8_t>;

Bytes encode_query(std::uint16_t id, std::string_view name, std::uint16_t qtype,
                   std::uint16_t qclass = kClassIn);

/// Builds the reply to one request datagram. Returns nullopt for datagrams
/// that must be dropped (shorter than a header, or not a query).
std::optional<Bytes> answer_query(const NameRegistry& reg, std::span<const std::uint8_t> request);

struct TxtAnswer {
  std::string name;
  std::uint32_t ttl = 0;
  std::string text;  // character-strings concatenated
};

struct Reply {
  std::uint16_t id = 0;
  std::uint8_t rcode = 0;
  bool authoritative = false;
  bool truncated = false;
  std::vector<TxtAnswer> answers;
};

/// Parses a reply datagram; throws ParseError on malformed input.
Reply parse_reply(std::span<const std::uint8_t> datagram);

/// UDP authoritative frontend for a registry, bound to a loopback or given
/// address. Serves until destroyed.
class Server {
 public:
  explicit Server(const NameRegistry& reg, std::string host = "127.0.0.1", std::uint16_t port = 0);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  const std::string& host() const noexcept { return host_; }
  void stop();

 private:
  void loop();

  const NameRegistry& reg_;
  std::string host_;
  std::uint16_t port_ = 0;
  int fd_ = -1;
  std::atomic<bool> running_{true};
  std::thread thread_;
};

/// One UDP exchange (with a single retry on timeout). Throws ResolutionFailure
/// if no valid reply arrives.
Reply exchange(const std::string& host, std::uint16_t port, std::span<const std::uint8_t> query,
               std::chrono::milliseconds timeout = std::chrono::milliseconds{1000});

/// TXT lookup over the wire, decoded into records. NXDOMAIN yields an empty
/// list; other error codes raise ResolutionFailure.
std::vector<MapServerRecord> resolve_via_dns(const std::string& host, std::uint16_t port,
                                             std::string_view name,
                                             std::chrono::milliseconds timeout =
                                                 std::chrono::milliseconds{1000});

}  // namespace dns

/// Resolver backend that talks to a wire frontend.
class DnsRecordSource final : public RecordSource {
 public:
  DnsRecordSource(std::string host, std::uint16_t port,
                  std::chrono::milliseconds timeout = std::chrono::milliseconds{1000})
      : host_(std::move(host)), port_(port), timeout_(timeout) {}
  std::vector<MapServerRecord> query(std::string_view name) override;

 private:
  std::string host_;
  std::uint16_t port_;
  std::chrono::milliseconds timeout_;
};

}  // namespace fedmap
