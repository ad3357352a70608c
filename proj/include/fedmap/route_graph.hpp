#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fedmap/map_model.hpp"

namespace fedmap {

/// Route cost in whole centimeters. Integer costs keep sums exact, so costs
/// from different servers can be compared with ==.
using Cost = std::int64_t;

/// Edge weight for a length in meters: rounded to centimeters, at least 1 cm.
Cost quantize_length(double meters);

inline double cost_to_meters(Cost c) { return static_cast<double>(c) / 100.0; }

struct Path {
  std::vector<std::string> nodes;
  Cost cost = 0;

  double cost_m() const { return cost_to_meters(cost); }
  friend bool operator==(const Path&, const Path&) = default;
};

/// Lexicographic comparison of node-id sequences.
bool path_less(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Undirected graph over every node of a document. Edges come from
/// consecutive way nodes, weighted by their frame distance.
class RouteGraph {
 public:
  RouteGraph() = default;
  explicit RouteGraph(const MapDocument& doc);

  struct Edge {
    int to;
    Cost weight;
  };

  std::size_t size() const { return ids_.size(); }
  const std::string& id(int v) const { return ids_[v]; }
  std::optional<int> index_of(std::string_view id) const;
  const std::vector<Edge>& edges(int v) const { return adj_[v]; }
  bool has_edges(int v) const { return !adj_[v].empty(); }

  /// Single-source shortest paths. Among equal-cost paths the one with the
  /// lexicographically smallest node-id sequence wins.
  struct Tree {
    std::vector<Cost> dist;  // -1 when unreachable
    std::vector<int> prev;
    bool reached(int v) const { return dist[v] >= 0; }
  };
  Tree shortest_paths(int source) const;
  Path extract(const Tree& t, int target) const;

 private:
  std::vector<int> vertex_path(const Tree& t, int target) const;
  bool id_sequence_less(const std::vector<int>& a, const std::vector<int>& b) const;

  std::vector<std::string> ids_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<Edge>> adj_;
};

}  // namespace fedmap
