#include "fedmap/dns_wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <random>

#include "fedmap/error.hpp"
#include "fedmap/registry.hpp"

namespace fedmap::dns {

namespace {

constexpr std::uint16_t kFlagQr = 0x8000;
constexpr std::uint16_t kFlagAa = 0x0400;
constexpr std::uint16_t kFlagTc = 0x0200;
constexpr std::uint16_t kFlagRd = 0x0100;
constexpr std::size_t kHeaderSize = 12;

void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put32(Bytes& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v >> 16));
  put16(out, static_cast<std::uint16_t>(v & 0xffff));
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at) {
  return (std::uint32_t(get16(b, at)) << 16) | get16(b, at + 2);
}

void put_name(Bytes& out, std::string_view name) {
  std::string n = normalize_domain(name);
  std::size_t start = 0;
  while (start < n.size()) {
    std::size_t dot = n.find('.', start);
    if (dot == std::string::npos) dot = n.size();
    const std::size_t len = dot - start;
    if (len == 0 || len > 63) throw ContractViolation("invalid DNS label in '" + n + "'");
    out.push_back(static_cast<std::uint8_t>(len));
    out.insert(out.end(), n.begin() + static_cast<std::ptrdiff_t>(start),
               n.begin() + static_cast<std::ptrdiff_t>(dot));
    start = dot + 1;
  }
  out.push_back(0);
}

// Reads a possibly-compressed name starting at `pos`; advances `pos` past the
// in-place encoding. Returns nullopt on malformed input.
std::optional<std::string> read_name(std::span<const std::uint8_t> b, std::size_t& pos,
                                     bool allow_pointers) {
  std::string name;
  std::size_t cur = pos;
  bool jumped = false;
  int hops = 0;
  std::size_t wire_len = 0;
  while (true) {
    if (cur >= b.size()) return std::nullopt;
    const std::uint8_t len = b[cur];
    if ((len & 0xc0) == 0xc0) {
      if (!allow_pointers || cur + 1 >= b.size() || ++hops > 16) return std::nullopt;
      const std::size_t target = ((len & 0x3f) << 8) | b[cur + 1];
      if (!jumped) pos = cur + 2;
      jumped = true;
      cur = target;
      continue;
    }
    if (len & 0xc0) return std::nullopt;
    if (len == 0) {
      if (!jumped) pos = cur + 1;
      break;
    }
    if (cur + 1 + len > b.size()) return std::nullopt;
    wire_len += len + 1;
    if (wire_len > 255) return std::nullopt;
    if (!name.empty()) name += '.';
    for (std::size_t i = 0; i < len; ++i) {
      const char ch = static_cast<char>(b[cur + 1 + i]);
      if (ch == '.') return std::nullopt;
      name += ch;
    }
    cur += 1 + len;
  }
  return name;
}

Bytes header(std::uint16_t id, std::uint16_t flags, std::uint16_t qd, std::uint16_t an) {
  Bytes out;
  out.reserve(kMaxUdpPayload);
  put16(out, id);
  put16(out, flags);
  put16(out, qd);
  put16(out, an);
  put16(out, 0);
  put16(out, 0);
  return out;
}

void append_txt_rr(Bytes& out, std::uint32_t ttl, std::string_view text) {
  put16(out, 0xc000 | kHeaderSize);  // pointer to the question name
  put16(out, kTypeTxt);
  put16(out, kClassIn);
  put32(out, ttl);
  Bytes rdata;
  std::size_t off = 0;
  do {
    const std::size_t chunk = std::min<std::size_t>(255, text.size() - off);
    rdata.push_back(static_cast<std::uint8_t>(chunk));
    rdata.insert(rdata.end(), text.begin() + static_cast<std::ptrdiff_t>(off),
                 text.begin() + static_cast<std::ptrdiff_t>(off + chunk));
    off += chunk;
  } while (off < text.size());
  put16(out, static_cast<std::uint16_t>(rdata.size()));
  out.insert(out.end(), rdata.begin(), rdata.end());
}

}  // namespace

Bytes encode_query(std::uint16_t id, std::string_view name, std::uint16_t qtype,
                   std::uint16_t qclass) {
  Bytes out = header(id, 0, 1, 0);
  put_name(out, name);
  put16(out, qtype);
  put16(out, qclass);
  return out;
}

std::optional<Bytes> answer_query(const NameRegistry& reg, std::span<const std::uint8_t> req) {
  if (req.size() < kHeaderSize) return std::nullopt;
  const std::uint16_t id = get16(req, 0);
  const std::uint16_t flags = get16(req, 2);
  if (flags & kFlagQr) return std::nullopt;
  const std::uint16_t rd = flags & kFlagRd;
  const std::uint16_t opcode = (flags >> 11) & 0xf;

  auto error_reply = [&](std::uint8_t rcode, std::span<const std::uint8_t> question) {
    Bytes out = header(id, kFlagQr | rd | rcode, question.empty() ? 0 : 1, 0);
    out.insert(out.end(), question.begin(), question.end());
    return out;
  };

  if (opcode != 0) return error_reply(kRcodeNotImp, {});
  if (get16(req, 4) != 1) return error_reply(kRcodeFormErr, {});

  std::size_t pos = kHeaderSize;
  auto qname = read_name(req, pos, false);
  if (!qname || pos + 4 > req.size()) return error_reply(kRcodeFormErr, {});
  const std::uint16_t qtype = get16(req, pos);
  const std::uint16_t qclass = get16(req, pos + 2);
  const auto question = req.subspan(kHeaderSize, pos + 4 - kHeaderSize);

  if (qclass != kClassIn || qtype != kTypeTxt) return error_reply(kRcodeNotImp, question);
  if (!reg.is_under_suffix(*qname)) return error_reply(kRcodeRefused, question);

  const std::vector<MapServerRecord> records = reg.lookup(*qname);
  if (records.empty()) {
    Bytes out = header(id, kFlagQr | kFlagAa | rd | kRcodeNxDomain, 1, 0);
    out.insert(out.end(), question.begin(), question.end());
    return out;
  }

  Bytes out = header(id, kFlagQr | kFlagAa | rd, 1, 0);
  out.insert(out.end(), question.begin(), question.end());
  std::uint16_t count = 0;
  bool truncated = false;
  for (const MapServerRecord& rec : records) {
    Bytes rr;
    append_txt_rr(rr, rec.ttl_s, canonical_text(rec));
    if (out.size() + rr.size() > kMaxUdpPayload) {
      truncated = true;
      break;
    }
    out.insert(out.end(), rr.begin(), rr.end());
    ++count;
  }
  out[6] = static_cast<std::uint8_t>(count >> 8);
  out[7] = static_cast<std::uint8_t>(count & 0xff);
  if (truncated) out[2] |= static_cast<std::uint8_t>(kFlagTc >> 8);
  return out;
}

Reply parse_reply(std::span<const std::uint8_t> b) {
  if (b.size() < kHeaderSize) throw ParseError("DNS reply shorter than a header");
  Reply r;
  r.id = get16(b, 0);
  const std::uint16_t flags = get16(b, 2);
  if (!(flags & kFlagQr)) throw ParseError("DNS datagram is not a reply");
  r.rcode = static_cast<std::uint8_t>(flags & 0xf);
  r.authoritative = flags & kFlagAa;
  r.truncated = flags & kFlagTc;
  const std::uint16_t qd = get16(b, 4);
  const std::uint16_t an = get16(b, 6);
  std::size_t pos = kHeaderSize;
  for (std::uint16_t i = 0; i < qd; ++i) {
    if (!read_name(b, pos, true) || pos + 4 > b.size()) throw ParseError("bad DNS question");
    pos += 4;
  }
  for (std::uint16_t i = 0; i < an; ++i) {
    auto name = read_name(b, pos, true);
    if (!name || pos + 10 > b.size()) throw ParseError("bad DNS answer header");
    const std::uint16_t type = get16(b, pos);
    const std::uint32_t ttl = get32(b, pos + 4);
    const std::uint16_t rdlen = get16(b, pos + 8);
    pos += 10;
    if (pos + rdlen > b.size()) throw ParseError("DNS answer overruns datagram");
    if (type == kTypeTxt) {
      TxtAnswer a{*name, ttl, {}};
      std::size_t p = pos;
      while (p < pos + rdlen) {
        const std::uint8_t len = b[p];
        if (p + 1 + len > pos + rdlen) throw ParseError("TXT string overruns RDATA");
        a.text.append(reinterpret_cast<const char*>(b.data() + p + 1), len);
        p += 1 + len;
      }
      r.answers.push_back(std::move(a));
    }
    pos += rdlen;
  }
  return r;
}

namespace {

struct Fd {
  int fd = -1;
  explicit Fd(int f) : fd(f) {}
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
};

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw ContractViolation("not an IPv4 address: '" + host + "'");
  }
  return addr;
}

}  // namespace

Server::Server(const NameRegistry& reg, std::string host, std::uint16_t port)
    : reg_(reg), host_(std::move(host)) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr = make_addr(host_, port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const int err = errno;
    ::close(fd_);
    throw TransportError("bind " + host_ + ":" + std::to_string(port) + ": " + std::strerror(err));
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  thread_ = std::thread([this] { loop(); });
}

Server::~Server() {
  stop();
  if (fd_ >= 0) ::close(fd_);
}

void Server::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
}

void Server::loop() {
  std::uint8_t buf[4096];
  while (running_) {
    pollfd pfd{fd_, POLLIN, 0};
    if (::poll(&pfd, 1, 50) <= 0) continue;
    sockaddr_in peer{};
    socklen_t plen = sizeof peer;
    const ssize_t n =
        ::recvfrom(fd_, buf, sizeof buf, 0, reinterpret_cast<sockaddr*>(&peer), &plen);
    if (n <= 0) continue;
    std::optional<Bytes> reply;
    try {
      reply = answer_query(reg_, std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
    } catch (const std::exception&) {
      continue;
    }
    if (reply) {
      ::sendto(fd_, reply->data(), reply->size(), 0, reinterpret_cast<sockaddr*>(&peer), plen);
    }
  }
}

Reply exchange(const std::string& host, std::uint16_t port, std::span<const std::uint8_t> query,
               std::chrono::milliseconds timeout) {
  if (query.size() < kHeaderSize) throw ContractViolation("DNS query shorter than a header");
  Fd sock(::socket(AF_INET, SOCK_DGRAM, 0));
  if (sock.fd < 0) throw ResolutionFailure(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr = make_addr(host, port);
  if (::connect(sock.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw ResolutionFailure("connect " + host + ":" + std::to_string(port));
  }
  const std::uint16_t id = get16(query, 0);
  std::uint8_t buf[4096];
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (::send(sock.fd, query.data(), query.size(), 0) < 0) continue;
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) break;
      pollfd pfd{sock.fd, POLLIN, 0};
      if (::poll(&pfd, 1, static_cast<int>(left.count())) <= 0) break;
      const ssize_t n = ::recv(sock.fd, buf, sizeof buf, 0);
      if (n <= 0) break;  // e.g. ICMP port unreachable
      try {
        Reply r = parse_reply(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
        if (r.id == id) return r;
      } catch (const ParseError&) {
      }
    }
  }
  throw ResolutionFailure("no DNS reply from " + host + ":" + std::to_string(port));
}

std::vector<MapServerRecord> resolve_via_dns(const std::string& host, std::uint16_t port,
                                             std::string_view name,
                                             std::chrono::milliseconds timeout) {
  static thread_local std::mt19937 rng{std::random_device{}()};
  const auto id = static_cast<std::uint16_t>(rng());
  const Bytes query = encode_query(id, name, kTypeTxt);
  const Reply r = exchange(host, port, query, timeout);
  if (r.rcode == kRcodeNxDomain) return {};
  if (r.rcode != kRcodeNoError) {
    throw ResolutionFailure("DNS rcode " + std::to_string(r.rcode) + " for '" + std::string(name) + "'");
  }
  std::vector<MapServerRecord> out;
  for (const TxtAnswer& a : r.answers) {
    try {
      out.push_back(parse_canonical_text(a.text, a.ttl));
    } catch (const ParseError& e) {
      throw ResolutionFailure("undecodable TXT record for '" + std::string(name) + "': " + e.what());
    }
  }
  return out;
}

}  // namespace fedmap::dns

namespace fedmap {

std::vector<MapServerRecord> DnsRecordSource::query(std::string_view name) {
  return dns::resolve_via_dns(host_, port_, name, timeout_);
}

}  // namespace fedmap
