#include "fedmap/registry.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>

#include "fedmap/error.hpp"
#include "fedmap/map_model.hpp"

namespace fedmap {

NameRegistry::NameRegistry(std::string suffix) : suffix_(normalize_domain(suffix)) {
  if (suffix_.empty()) throw ContractViolation("registry suffix must be non-empty");
}

bool NameRegistry::is_under_suffix(std::string_view name) const {
  std::vector<std::string> labels;
  return labels_under_suffix(name, suffix_, labels);
}

std::vector<std::string> NameRegistry::labels_or_throw(std::string_view name) const {
  std::vector<std::string> labels;
  if (!labels_under_suffix(name, suffix_, labels)) {
    throw NameOutsideSuffix("'" + std::string(name) + "' is outside '" + suffix_ + "'");
  }
  return labels;
}

void NameRegistry::put_locked(const std::vector<std::string>& labels, const MapServerRecord& rec) {
  Node* node = &root_;
  for (const std::string& label : labels) {
    auto& child = node->children[label];
    if (!child) child = std::make_unique<Node>();
    node = child.get();
  }
  node->records.insert_or_assign(rec.server_id, rec);
}

void NameRegistry::put(std::string_view name, const MapServerRecord& rec) {
  validate_record(rec);
  const auto labels = labels_or_throw(name);
  std::unique_lock lock(mutex_);
  put_locked(labels, rec);
}

void NameRegistry::put_all(const std::vector<std::string>& names, const MapServerRecord& rec) {
  validate_record(rec);
  std::vector<std::vector<std::string>> all;
  all.reserve(names.size());
  for (const std::string& n : names) all.push_back(labels_or_throw(n));
  std::unique_lock lock(mutex_);
  for (const auto& labels : all) put_locked(labels, rec);
}

std::size_t NameRegistry::remove_server(std::string_view server_id) {
  std::unique_lock lock(mutex_);
  std::size_t removed = 0;
  const std::string key(server_id);
  // Returns true when the subtree is empty afterwards.
  std::function<bool(Node&)> prune = [&](Node& node) {
    removed += node.records.erase(key);
    for (auto it = node.children.begin(); it != node.children.end();) {
      it = prune(*it->second) ? node.children.erase(it) : std::next(it);
    }
    return node.records.empty() && node.children.empty();
  };
  prune(root_);
  return removed;
}

std::vector<MapServerRecord> NameRegistry::lookup(std::string_view name) const {
  const auto labels = labels_or_throw(name);
  std::shared_lock lock(mutex_);
  const Node* node = &root_;
  for (const std::string& label : labels) {
    auto it = node->children.find(label);
    if (it == node->children.end()) return {};
    node = it->second.get();
  }
  std::vector<MapServerRecord> out;
  out.reserve(node->records.size());
  for (const auto& [id, rec] : node->records) out.push_back(rec);
  return out;
}

std::vector<std::pair<std::string, MapServerRecord>> NameRegistry::entries() const {
  std::vector<std::pair<std::vector<std::string>, MapServerRecord>> raw;
  {
    std::shared_lock lock(mutex_);
    std::vector<std::string> path;
    std::function<void(const Node&)> walk = [&](const Node& node) {
      for (const auto& [id, rec] : node.records) raw.emplace_back(path, rec);
      for (const auto& [label, child] : node.children) {
        path.push_back(label);
        walk(*child);
        path.pop_back();
      }
    };
    walk(root_);
  }
  // Reversed-label order: the suffix is shared, so compare the label path
  // shallowest-first, then the record text.
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return canonical_text(a.second) < canonical_text(b.second);
  });
  std::vector<std::pair<std::string, MapServerRecord>> out;
  out.reserve(raw.size());
  for (auto& [labels, rec] : raw) {
    std::string name;
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) name += *it + ".";
    name += suffix_;
    out.emplace_back(std::move(name), std::move(rec));
  }
  return out;
}

std::vector<std::string> register_zone(NameRegistry& reg, std::span<const Point2> boundary,
                                       const MapServerRecord& rec, int level,
                                       std::size_t max_cells) {
  validate_record(rec);
  std::vector<std::string> domains;
  for (const CellId& c : cover_polygon(boundary, level, max_cells)) {
    domains.push_back(cell_to_domain(c, reg.suffix()));
  }
  std::sort(domains.begin(), domains.end());
  reg.put_all(domains, rec);
  return domains;
}

std::vector<std::string> register_document(NameRegistry& reg, const MapDocument& doc,
                                           const MapServerRecord& rec, int level,
                                           std::size_t max_cells) {
  const Polygon poly = registration_polygon(doc);
  return register_zone(reg, poly, rec, level, max_cells);
}

std::size_t deregister(NameRegistry& reg, std::string_view server_id) {
  return reg.remove_server(server_id);
}

std::vector<MapServerRecord> lookup_records(const NameRegistry& reg, std::string_view name) {
  return reg.lookup(name);
}

std::string export_zone_file(const NameRegistry& reg) {
  std::string out;
  for (const auto& [name, rec] : reg.entries()) {
    out += name + " " + std::to_string(rec.ttl_s) + " IN TXT \"" + canonical_text(rec) + "\"\n";
  }
  return out;
}

std::size_t import_zone_file(NameRegistry& reg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t count = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == ';') continue;
    std::istringstream ls(line);
    std::string name, ttl, cls, type;
    if (!(ls >> name >> ttl >> cls >> type) || cls != "IN" || type != "TXT") {
      throw ParseError("zone file line " + std::to_string(line_no) + ": expected '<name> <ttl> IN TXT'");
    }
    const std::size_t open = line.find('"');
    const std::size_t close = line.rfind('"');
    if (open == std::string::npos || close <= open) {
      throw ParseError("zone file line " + std::to_string(line_no) + ": missing quoted text");
    }
    std::uint32_t ttl_s = 0;
    try {
      const unsigned long v = std::stoul(ttl);
      ttl_s = static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
      throw ParseError("zone file line " + std::to_string(line_no) + ": bad ttl '" + ttl + "'");
    }
    reg.put(name, parse_canonical_text(line.substr(open + 1, close - open - 1), ttl_s));
    ++count;
  }
  return count;
}

}  // namespace fedmap
