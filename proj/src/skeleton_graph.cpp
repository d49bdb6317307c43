#include "specgraph/skeleton_graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

namespace specgraph {
namespace {

constexpr std::array<int, 8> kDr{-1, -1, 0, 1, 1, 1, 0, -1};
constexpr std::array<int, 8> kDc{0, 1, 1, 1, 0, -1, -1, -1};

// Linked neighbors of (r, c) in ring order.
int linked_neighbors(const BinaryImage& skel, int r, int c,
                     std::array<Pixel, 8>& out) {
  int k = 0;
  for (int d = 0; d < 8; ++d) {
    const int rr = r + kDr[d], cc = c + kDc[d];
    if (skel.get(rr, cc) && skeleton_linked(skel, r, c, rr, cc)) {
      out[k++] = {rr, cc};
    }
  }
  return k;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

const char* to_string(PixelRole role) {
  switch (role) {
    case PixelRole::Background: return "background";
    case PixelRole::Isolated: return "isolated";
    case PixelRole::Leaf: return "leaf";
    case PixelRole::Path: return "path";
    case PixelRole::Junction: return "junction";
  }
  return "unknown";
}

bool skeleton_linked(const BinaryImage& skel, int r0, int c0, int r1, int c1) {
  const int dr = r1 - r0, dc = c1 - c0;
  if (std::max(std::abs(dr), std::abs(dc)) != 1) return false;
  if (dr == 0 || dc == 0) return true;
  return !skel.get(r0, c1) && !skel.get(r1, c0);
}

std::vector<PixelRole> classify_pixels(const BinaryImage& skel) {
  const int n = skel.resolution();
  std::vector<PixelRole> roles(skel.bits.size(), PixelRole::Background);
  std::array<Pixel, 8> nbrs;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!skel.at(r, c)) continue;
      const int k = linked_neighbors(skel, r, c, nbrs);
      roles[static_cast<std::size_t>(r) * n + c] =
          k == 0 ? PixelRole::Isolated
          : k == 1 ? PixelRole::Leaf
          : k == 2 ? PixelRole::Path
                   : PixelRole::Junction;
    }
  }
  return roles;
}

RoleCounts count_roles(const std::vector<PixelRole>& roles) {
  RoleCounts out;
  for (PixelRole r : roles) {
    switch (r) {
      case PixelRole::Isolated: ++out.isolated; break;
      case PixelRole::Leaf: ++out.leaf; break;
      case PixelRole::Path: ++out.path; break;
      case PixelRole::Junction: ++out.junction; break;
      case PixelRole::Background: break;
    }
  }
  return out;
}

PixelGraph trace_edges(const BinaryImage& skel, const std::vector<PixelRole>& roles) {
  const int n = skel.resolution();
  if (roles.size() != skel.bits.size()) {
    throw InvalidInput("graph", "pixel roles do not match the skeleton");
  }
  const auto idx = [n](int r, int c) { return r * n + c; };
  PixelGraph g;
  g.resolution = n;
  std::vector<int> node_of(skel.bits.size(), -1);

  auto finish_node = [&](PixelGraph::Node& node) {
    double sr = 0.0, sc = 0.0;
    for (const auto& [r, c] : node.pixels) {
      sr += r;
      sc += c;
    }
    node.row = sr / static_cast<double>(node.pixels.size());
    node.col = sc / static_cast<double>(node.pixels.size());
  };

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const PixelRole role = roles[idx(r, c)];
      if (role == PixelRole::Background || role == PixelRole::Path) continue;
      if (node_of[idx(r, c)] >= 0) continue;
      const int id = static_cast<int>(g.nodes.size());
      PixelGraph::Node node;
      node_of[idx(r, c)] = id;
      node.pixels.push_back({r, c});
      if (role == PixelRole::Junction) {
        // 8-connected cluster of junction pixels.
        for (std::size_t k = 0; k < node.pixels.size(); ++k) {
          const auto [pr, pc] = node.pixels[k];
          for (int d = 0; d < 8; ++d) {
            const int rr = pr + kDr[d], cc = pc + kDc[d];
            if (!skel.get(rr, cc) || node_of[idx(rr, cc)] >= 0) continue;
            if (roles[idx(rr, cc)] != PixelRole::Junction) continue;
            node_of[idx(rr, cc)] = id;
            node.pixels.push_back({rr, cc});
          }
        }
        std::sort(node.pixels.begin(), node.pixels.end());
      }
      finish_node(node);
      g.nodes.push_back(std::move(node));
    }
  }

  std::set<std::pair<int, int>> used;  // directed (node pixel, first step)
  std::vector<std::uint8_t> visited(skel.bits.size(), 0);
  std::array<Pixel, 8> nbrs;
  const int max_steps = n * n + 1;

  for (std::size_t id = 0; id < g.nodes.size(); ++id) {
    for (const auto& [ur, uc] : g.nodes[id].pixels) {
      const int k = linked_neighbors(skel, ur, uc, nbrs);
      for (int j = 0; j < k; ++j) {
        const auto [vr, vc] = nbrs[j];
        if (node_of[idx(vr, vc)] == static_cast<int>(id)) continue;
        if (used.count({idx(ur, uc), idx(vr, vc)})) continue;
        PixelGraph::Edge e;
        e.u = static_cast<int>(id);
        e.pixels.push_back({ur, uc});
        Pixel prev{ur, uc};
        Pixel cur{vr, vc};
        int steps = 0;
        while (node_of[idx(cur.first, cur.second)] < 0) {
          if (++steps > max_steps) {
            throw NumericalError("graph", "edge tracing did not terminate");
          }
          visited[idx(cur.first, cur.second)] = 1;
          e.pixels.push_back(cur);
          std::array<Pixel, 8> step;
          const int m = linked_neighbors(skel, cur.first, cur.second, step);
          Pixel next = cur;
          for (int s = 0; s < m; ++s) {
            if (step[s] != prev) {
              next = step[s];
              break;
            }
          }
          prev = cur;
          cur = next;
        }
        e.pixels.push_back(cur);
        e.v = node_of[idx(cur.first, cur.second)];
        used.insert({idx(ur, uc), idx(vr, vc)});
        used.insert({idx(cur.first, cur.second), idx(prev.first, prev.second)});
        g.edges.push_back(std::move(e));
      }
    }
  }

  // Whatever path pixels remain form cycles without any node.
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (roles[idx(r, c)] != PixelRole::Path || visited[idx(r, c)]) continue;
      const int id = static_cast<int>(g.nodes.size());
      PixelGraph::Node node;
      node.pixels.push_back({r, c});
      finish_node(node);
      g.nodes.push_back(std::move(node));
      node_of[idx(r, c)] = id;
      visited[idx(r, c)] = 1;

      PixelGraph::Edge e;
      e.u = e.v = id;
      e.pixels.push_back({r, c});
      const int k = linked_neighbors(skel, r, c, nbrs);
      Pixel prev{r, c};
      Pixel cur = *std::min_element(nbrs.begin(), nbrs.begin() + k);
      int steps = 0;
      while (cur != Pixel{r, c}) {
        if (++steps > max_steps) {
          throw NumericalError("graph", "cycle tracing did not terminate");
        }
        visited[idx(cur.first, cur.second)] = 1;
        e.pixels.push_back(cur);
        std::array<Pixel, 8> step;
        const int m = linked_neighbors(skel, cur.first, cur.second, step);
        Pixel next = cur;
        for (int s = 0; s < m; ++s) {
          if (step[s] != prev) {
            next = step[s];
            break;
          }
        }
        prev = cur;
        cur = next;
      }
      e.pixels.push_back(cur);
      g.edges.push_back(std::move(e));
    }
  }
  return g;
}

double polyline_length(const std::vector<cplx>& pts) {
  double len = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) len += std::abs(pts[k] - pts[k - 1]);
  return len;
}

std::vector<int> node_degrees(const SpectralMultigraph& g) {
  std::vector<int> deg(g.nodes.size(), 0);
  for (const auto& e : g.edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

int count_components(const SpectralMultigraph& g) {
  UnionFind uf(g.nodes.size());
  for (const auto& e : g.edges) uf.unite(e.u, e.v);
  int count = 0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    count += uf.find(static_cast<int>(k)) == static_cast<int>(k);
  }
  return count;
}

SpectralMultigraph to_energy_coords(const PixelGraph& g, const ScalarField& phi,
                                    const ScalarField& dos) {
  if (phi.resolution() != g.resolution || dos.resolution() != g.resolution) {
    throw InvalidInput("graph", "field resolution does not match the skeleton");
  }
  const EnergyWindow& w = phi.window;
  const double h = w.pitch();
  const int n = g.resolution;
  auto position = [&](double row, double col) {
    return cplx{w.re_min + (col + 0.5) * h, w.im_min + (row + 0.5) * h};
  };

  SpectralMultigraph out;
  out.nodes.reserve(g.nodes.size());
  for (const auto& node : g.nodes) {
    const int r = std::clamp(static_cast<int>(std::lround(node.row)), 0, n - 1);
    const int c = std::clamp(static_cast<int>(std::lround(node.col)), 0, n - 1);
    out.nodes.push_back({position(node.row, node.col), dos.at(r, c), phi.at(r, c)});
  }
  out.edges.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    GraphEdge edge;
    edge.u = e.u;
    edge.v = e.v;
    edge.pts.push_back(out.nodes[e.u].pos);
    for (std::size_t k = 1; k + 1 < e.pixels.size(); ++k) {
      edge.pts.push_back(position(e.pixels[k].first, e.pixels[k].second));
    }
    edge.pts.push_back(out.nodes[e.v].pos);
    std::size_t count = e.pixels.size();
    if (count > 1 && e.pixels.front() == e.pixels.back()) --count;
    double sd = 0.0, sp = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      sd += dos.at(e.pixels[k].first, e.pixels[k].second);
      sp += phi.at(e.pixels[k].first, e.pixels[k].second);
    }
    edge.avg_dos = sd / static_cast<double>(count);
    edge.avg_potential = sp / static_cast<double>(count);
    edge.weight = polyline_length(edge.pts);
    out.edges.push_back(std::move(edge));
  }
  return out;
}

namespace {

// Adds the current node positions to the ends of an edge whose endpoints
// moved, then refreshes its length.
void reattach(GraphEdge& e, const std::vector<GraphNode>& nodes) {
  if (e.pts.empty() || e.pts.front() != nodes[e.u].pos) {
    e.pts.insert(e.pts.begin(), nodes[e.u].pos);
  }
  if (e.pts.back() != nodes[e.v].pos) e.pts.push_back(nodes[e.v].pos);
  e.weight = polyline_length(e.pts);
}


std::vector<int> degrees(std::size_t n, const std::vector<GraphEdge>& edges) {
  std::vector<int> deg(n, 0);
  for (const auto& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

void reverse_edge(GraphEdge& e) {
  std::swap(e.u, e.v);
  std::reverse(e.pts.begin(), e.pts.end());
}

// Joins the two edges through degree-2 node x into one.
void splice(std::vector<GraphEdge>& edges, int x) {
  std::size_t a = edges.size(), b = edges.size();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].u != x && edges[k].v != x) continue;
    (a == edges.size() ? a : b) = k;
  }
  GraphEdge first = edges[a];
  GraphEdge second = edges[b];
  if (first.v != x) reverse_edge(first);
  if (second.u != x) reverse_edge(second);
  const double na = static_cast<double>(first.pts.size());
  const double nb = static_cast<double>(second.pts.size());
  first.avg_dos = (na * first.avg_dos + nb * second.avg_dos) / (na + nb);
  first.avg_potential =
      (na * first.avg_potential + nb * second.avg_potential) / (na + nb);
  first.v = second.v;
  first.pts.insert(first.pts.end(), second.pts.begin() + 1, second.pts.end());
  first.weight = polyline_length(first.pts);
  edges[a] = std::move(first);
  edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(b));
}

// Thinning leaves short whiskers where a thick band ends or forks. Each round
// drops every leaf edge shorter than `limit` that hangs off a node of degree
// >= 3 (keeping the longest if all of a node's edges qualify), then splices
// out the degree-2 nodes this leaves behind.
void prune_spurs(std::vector<GraphEdge>& edges, std::vector<std::uint8_t>& absorbed,
                 double limit) {
  const std::size_t n = absorbed.size();
  while (true) {
    const std::vector<int> deg = degrees(n, edges);
    std::vector<int> spurs_at(n, 0);
    std::vector<std::size_t> longest(n, edges.size());
    std::vector<std::uint8_t> spur(edges.size(), 0);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const GraphEdge& e = edges[k];
      if (e.u == e.v || e.weight >= limit) continue;
      int hub = -1;
      if (deg[e.u] == 1 && deg[e.v] >= 3) hub = e.v;
      if (deg[e.v] == 1 && deg[e.u] >= 3) hub = e.u;
      if (hub < 0) continue;
      spur[k] = 1;
      ++spurs_at[hub];
      if (longest[hub] == edges.size() || e.weight > edges[longest[hub]].weight) {
        longest[hub] = k;
      }
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (spurs_at[x] > 0 && spurs_at[x] == deg[x]) spur[longest[x]] = 0;
    }
    std::vector<GraphEdge> kept;
    bool changed = false;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!spur[k]) {
        kept.push_back(std::move(edges[k]));
        continue;
      }
      changed = true;
      absorbed[deg[edges[k].u] == 1 ? edges[k].u : edges[k].v] = 1;
    }
    edges = std::move(kept);
    if (!changed) return;
    for (std::size_t x = 0; x < n; ++x) {
      const std::vector<int> now = degrees(n, edges);
      if (now[x] != 2 || deg[x] == 2) continue;
      bool loop = false;
      for (const auto& e : edges) loop |= (e.u == e.v && e.u == static_cast<int>(x));
      if (loop) continue;
      splice(edges, static_cast<int>(x));
      absorbed[x] = 1;
    }
  }
}

}  // namespace

SpectralMultigraph merge_nearby_nodes(const SpectralMultigraph& g, double pitch,
                                      const MergeOptions& options) {
  if (!(options.tol_px >= 0.0) || !(options.short_edge_px >= 0.0) ||
      !(pitch > 0.0)) {
    throw InvalidInput("merge", "tolerances must be >= 0 and pitch > 0");
  }
  std::vector<GraphNode> nodes = g.nodes;
  std::vector<GraphEdge> edges = g.edges;

  if (options.short_edge_px > 0.0) {
    std::vector<std::uint8_t> pruned(nodes.size(), 0);
    prune_spurs(edges, pruned, options.short_edge_px * pitch);
    std::vector<int> remap(nodes.size(), -1);
    std::vector<GraphNode> live;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (pruned[i]) continue;
      remap[i] = static_cast<int>(live.size());
      live.push_back(nodes[i]);
    }
    for (GraphEdge& e : edges) {
      e.u = remap[e.u];
      e.v = remap[e.v];
    }
    nodes = std::move(live);
  }

  if (options.tol_px > 0.0) {
    const double tol = options.tol_px * pitch;
    UnionFind uf(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (std::abs(nodes[i].pos - nodes[j].pos) <= tol) {
          uf.unite(static_cast<int>(i), static_cast<int>(j));
        }
      }
    }
    std::vector<int> new_id(nodes.size(), -1);
    std::vector<GraphNode> merged;
    std::vector<int> members;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const int root = uf.find(static_cast<int>(i));
      if (new_id[root] < 0) {
        new_id[root] = static_cast<int>(merged.size());
        merged.push_back({});
        members.push_back(0);
      }
      new_id[i] = new_id[root];
      GraphNode& m = merged[new_id[i]];
      m.pos += nodes[i].pos;
      m.dos += nodes[i].dos;
      m.potential += nodes[i].potential;
      ++members[new_id[i]];
    }
    for (std::size_t k = 0; k < merged.size(); ++k) {
      merged[k].pos /= static_cast<double>(members[k]);
      merged[k].dos /= members[k];
      merged[k].potential /= members[k];
    }
    // A single-member cluster keeps its exact position.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (members[new_id[i]] == 1) merged[new_id[i]] = nodes[i];
    }
    std::vector<GraphEdge> kept;
    for (GraphEdge e : edges) {
      const bool was_loop = e.u == e.v;
      e.u = new_id[e.u];
      e.v = new_id[e.v];
      // Short links inside a cluster are the jitter being merged away; long
      // ones close a genuine loop and stay as self-loops.
      if (!was_loop && e.u == e.v && e.weight <= 2.0 * tol) continue;
      reattach(e, merged);
      kept.push_back(std::move(e));
    }
    nodes = std::move(merged);
    edges = std::move(kept);
  }

  std::vector<std::uint8_t> absorbed(nodes.size(), 0);
  if (options.short_edge_px > 0.0) {
    const double limit = options.short_edge_px * pitch;
    while (true) {
      std::size_t pick = edges.size();
      for (std::size_t k = 0; k < edges.size(); ++k) {
        if (edges[k].weight >= limit) continue;
        if (pick == edges.size() || edges[k].weight < edges[pick].weight) pick = k;
      }
      if (pick == edges.size()) break;
      const GraphEdge e = edges[pick];
      edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(pick));
      if (e.u == e.v) continue;
      const int keep = std::min(e.u, e.v);
      const int gone = std::max(e.u, e.v);
      absorbed[gone] = 1;
      GraphNode& k = nodes[keep];
      k.pos = 0.5 * (nodes[e.u].pos + nodes[e.v].pos);
      k.dos = 0.5 * (nodes[e.u].dos + nodes[e.v].dos);
      k.potential = 0.5 * (nodes[e.u].potential + nodes[e.v].potential);
      for (GraphEdge& other : edges) {
        if (other.u == gone) other.u = keep;
        if (other.v == gone) other.v = keep;
        if (other.u == keep || other.v == keep) reattach(other, nodes);
      }
    }
  }

  std::vector<int> deg(nodes.size(), 0);
  for (const auto& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  SpectralMultigraph out;
  std::vector<int> remap(nodes.size(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (absorbed[i] || (options.remove_isolated && deg[i] == 0)) continue;
    remap[i] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(nodes[i]);
  }
  for (GraphEdge e : edges) {
    e.u = remap[e.u];
    e.v = remap[e.v];
    out.edges.push_back(std::move(e));
  }
  return out;
}

}  // namespace specgraph
