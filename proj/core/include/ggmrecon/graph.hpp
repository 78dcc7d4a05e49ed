#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ggmrecon {

using Vertex = std::uint32_t;

/// Unordered vertex pair, stored with u < v.
struct Edge {
  Vertex u;
  Vertex v;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph on vertices 0..n-1.
///
/// Neighbor lists are stored in compressed (CSR) form and sorted ascending,
/// so `adjacent` is a binary search and iteration order is deterministic.
class Graph {
 public:
  Graph() = default;

  /// n isolated vertices.
  explicit Graph(std::size_t n);

  /// Validating constructor. Rejects self-loops, duplicate edges (in either
  /// orientation) and endpoints >= n with InputError. Edges are normalized
  /// to u < v and sorted.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const Vertex> neighbors(Vertex i) const {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(Vertex i) const { return offsets_[i + 1] - offsets_[i]; }
  bool adjacent(Vertex i, Vertex j) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
};

/// Roads and the intersections joining them. Road identifiers are free-form
/// names; vertex indices follow their order in `roads`.
struct RoadNetworkDescription {
  std::vector<std::string> roads;
  std::vector<std::vector<std::string>> intersections;
};

/// One vertex per road; roads sharing an intersection become adjacent.
/// An intersection of k roads contributes the k-clique on those roads, and
/// pairs meeting at several intersections get a single edge.
Graph build_road_graph(const RoadNetworkDescription& desc);

/// 4-neighbor grid with row-major labels, vertex (x, y) -> y * width + x.
Graph make_lattice(std::size_t width, std::size_t height);

Graph make_complete(std::size_t n);

}  // namespace ggmrecon
