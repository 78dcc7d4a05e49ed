#include "ggmrecon/graph.hpp"

#include <algorithm>
#include <unordered_map>

#include "ggmrecon/error.hpp"

namespace ggmrecon {

Graph::Graph(std::size_t n) : offsets_(n + 1, 0) {}

Graph Graph::from_edges(std::size_t n, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                       ") has an endpoint outside 0.." + std::to_string(n == 0 ? 0 : n - 1));
    }
    if (e.u == e.v) {
      throw InputError("self-loop on vertex " + std::to_string(e.u));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    throw InputError("duplicate edge (" + std::to_string(dup->u) + ", " +
                     std::to_string(dup->v) + ")");
  }

  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (const auto& e : edges) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];

  g.adjacency_.resize(2 * edges.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : edges) g.adjacency_[cursor[e.v]++] = e.u;
  for (const auto& e : edges) g.adjacency_[cursor[e.u]++] = e.v;
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  }
  g.edges_ = std::move(edges);
  return g;
}

bool Graph::adjacent(Vertex i, Vertex j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

Graph build_road_graph(const RoadNetworkDescription& desc) {
  std::unordered_map<std::string, Vertex> index;
  index.reserve(desc.roads.size());
  for (const auto& road : desc.roads) {
    auto [it, inserted] = index.emplace(road, static_cast<Vertex>(index.size()));
    if (!inserted) throw InputError("road '" + road + "' is listed twice");
  }

  std::vector<Edge> edges;
  for (std::size_t k = 0; k < desc.intersections.size(); ++k) {
    const auto& roads = desc.intersections[k];
    if (roads.size() < 2) {
      throw InputError("intersection " + std::to_string(k) + " joins fewer than two roads");
    }
    std::vector<Vertex> members;
    members.reserve(roads.size());
    for (const auto& road : roads) {
      auto it = index.find(road);
      if (it == index.end()) {
        throw InputError("intersection " + std::to_string(k) + " names unknown road '" + road +
                         "'");
      }
      members.push_back(it->second);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        edges.push_back({members[a], members[b]});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph::from_edges(desc.roads.size(), std::move(edges));
}

Graph make_lattice(std::size_t width, std::size_t height) {
  std::vector<Edge> edges;
  edges.reserve(width * (height > 0 ? height - 1 : 0) + height * (width > 0 ? width - 1 : 0));
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      auto v = static_cast<Vertex>(y * width + x);
      if (x + 1 < width) edges.push_back({v, v + 1});
      if (y + 1 < height) edges.push_back({v, static_cast<Vertex>(v + width)});
    }
  }
  return Graph::from_edges(width * height, std::move(edges));
}

Graph make_complete(std::size_t n) {
  std::vector<Edge> edges;
  edges.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace ggmrecon
