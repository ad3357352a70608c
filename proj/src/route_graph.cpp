#include "fedmap/route_graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace fedmap {

Cost quantize_length(double meters) {
  return std::max<Cost>(1, std::llround(meters * 100.0));
}

bool path_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

RouteGraph::RouteGraph(const MapDocument& doc) {
  ids_.reserve(doc.nodes.size());
  for (const MapNode& n : doc.nodes) {
    index_.emplace(n.id, static_cast<int>(ids_.size()));
    ids_.push_back(n.id);
  }
  adj_.resize(ids_.size());
  const bool geo = doc.frame.is_geo();
  for (const MapWay& w : doc.ways) {
    for (std::size_t i = 0; i + 1 < w.node_ids.size(); ++i) {
      const int a = index_.at(w.node_ids[i]);
      const int b = index_.at(w.node_ids[i + 1]);
      const Cost c = quantize_length(
          frame_distance_m(doc.nodes[a].position, doc.nodes[b].position, geo));
      adj_[a].push_back({b, c});
      adj_[b].push_back({a, c});
    }
  }
}

std::optional<int> RouteGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> RouteGraph::vertex_path(const Tree& t, int target) const {
  std::vector<int> out;
  for (int v = target; v >= 0; v = t.prev[v]) out.push_back(v);
  std::reverse(out.begin(), out.end());
  return out;
}

bool RouteGraph::id_sequence_less(const std::vector<int>& a, const std::vector<int>& b) const {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [&](int x, int y) { return ids_[x] < ids_[y]; });
}

RouteGraph::Tree RouteGraph::shortest_paths(int source) const {
  Tree t{std::vector<Cost>(size(), -1), std::vector<int>(size(), -1)};
  std::vector<char> done(size(), 0);
  using Item = std::pair<Cost, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  t.dist[source] = 0;
  heap.emplace(0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u] || d != t.dist[u]) continue;
    done[u] = 1;
    for (const Edge& e : adj_[u]) {
      if (done[e.to]) continue;
      const Cost nd = d + e.weight;
      if (t.dist[e.to] < 0 || nd < t.dist[e.to]) {
        t.dist[e.to] = nd;
        t.prev[e.to] = u;
        heap.emplace(nd, e.to);
      } else if (nd == t.dist[e.to] && t.prev[e.to] != u) {
        std::vector<int> via_u = vertex_path(t, u);
        via_u.push_back(e.to);
        if (id_sequence_less(via_u, vertex_path(t, e.to))) t.prev[e.to] = u;
      }
    }
  }
  return t;
}

Path RouteGraph::extract(const Tree& t, int target) const {
  Path p;
  p.cost = t.dist[target];
  for (int v : vertex_path(t, target)) p.nodes.push_back(ids_[v]);
  return p;
}

}  // namespace fedmap
