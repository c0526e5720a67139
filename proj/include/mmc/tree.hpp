#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <utility>
#include <vector>

#include "mmc/errors.hpp"
#include "mmc/tol.hpp"

namespace mmc {

/// Point of a metric tree: either a vertex, or an interior position on an
/// edge measured from the edge's first endpoint.
struct TreePoint {
  int vertex = -1;  // >= 0 iff this is a vertex point
  int edge = -1;
  double offset = 0.0;

  static TreePoint at_vertex(int v) { return TreePoint{v, -1, 0.0}; }
  static TreePoint on_edge(int e, double off) { return TreePoint{-1, e, off}; }
  bool is_vertex() const { return vertex >= 0; }
};

/// Finite metric tree: positive edge lengths, connected, acyclic. Distances
/// between arbitrary edge points are served in O(log V) after an ancestor
/// index is built at construction.
class MetricTree {
 public:
  struct Edge {
    int u, v;
    double len;
  };

  MetricTree(std::size_t vertex_count, std::vector<Edge> edges)
      : V_(vertex_count), edges_(std::move(edges)) {
    if (V_ == 0) throw BadSpec("tree needs at least one vertex");
    if (edges_.size() + 1 != V_) throw BadSpec("edge count must be vertex count - 1");
    adj_.assign(V_, {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const Edge& ed = edges_[e];
      if (ed.u < 0 || ed.v < 0 || ed.u >= static_cast<int>(V_) || ed.v >= static_cast<int>(V_))
        throw BadSpec("edge endpoint out of range");
      if (ed.u == ed.v) throw BadSpec("self loop in tree");
      if (!(ed.len > 0.0)) throw BadSpec("edge length must be positive");
      adj_[ed.u].push_back({ed.v, static_cast<int>(e)});
      adj_[ed.v].push_back({ed.u, static_cast<int>(e)});
    }
    build_index();
  }

  std::size_t vertex_count() const { return V_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(e); }

  // Snaps edge endpoints to vertex points so that equal locations compare
  // equal regardless of how they were written down.
  TreePoint canonical(const TreePoint& p) const {
    if (p.is_vertex()) {
      if (p.vertex >= static_cast<int>(V_)) throw InvalidTreePoint("vertex id out of range");
      return p;
    }
    if (p.edge < 0 || p.edge >= static_cast<int>(edges_.size()))
      throw InvalidTreePoint("edge id out of range");
    const Edge& e = edges_[p.edge];
    if (p.offset < -tol::kAtomMerge || p.offset > e.len + tol::kAtomMerge)
      throw InvalidTreePoint("edge offset outside [0, length]");
    if (p.offset <= tol::kAtomMerge) return TreePoint::at_vertex(e.u);
    if (p.offset >= e.len - tol::kAtomMerge) return TreePoint::at_vertex(e.v);
    return p;
  }

  double vertex_distance(int a, int b) const {
    return depth_len_[a] + depth_len_[b] - 2.0 * depth_len_[lca(a, b)];
  }

  double distance(const TreePoint& pa, const TreePoint& pb) const {
    const TreePoint p = canonical(pa), q = canonical(pb);
    if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge)
      return std::abs(p.offset - q.offset);
    double best = -1.0;
    for (const auto& [av, ad] : anchors(p))
      for (const auto& [bv, bd] : anchors(q)) {
        const double d = ad + vertex_distance(av, bv) + bd;
        if (best < 0.0 || d < best) best = d;
      }
    return best;
  }

  // Point a fraction t of the way from p to q along the unique path.
  TreePoint interpolate(const TreePoint& pa, const TreePoint& pb, double t) const {
    const TreePoint p = canonical(pa), q = canonical(pb);
    const double total = distance(p, q);
    if (total == 0.0) return p;
    double s = std::clamp(t, 0.0, 1.0) * total;
    if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) {
      return canonical(TreePoint::on_edge(p.edge, p.offset + (q.offset - p.offset) * (s / total)));
    }
    // Pick the exit vertices that realize the geodesic, then walk.
    int a = -1, b = -1;
    double lead = 0.0, trail = 0.0, best = -1.0;
    for (const auto& [av, ad] : anchors(p))
      for (const auto& [bv, bd] : anchors(q)) {
        const double d = ad + vertex_distance(av, bv) + bd;
        if (best < 0.0 || d < best - 1e-15) {
          best = d;
          a = av;
          b = bv;
          lead = ad;
          trail = bd;
        }
      }
    if (s <= lead && !p.is_vertex()) {
      const Edge& e = edges_[p.edge];
      const double dir = (a == e.u) ? -1.0 : 1.0;
      return canonical(TreePoint::on_edge(p.edge, p.offset + dir * s));
    }
    s -= lead;
    const std::vector<int> path = vertex_path(a, b);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const int eid = edge_between(path[i], path[i + 1]);
      const Edge& e = edges_[eid];
      if (s <= e.len + 1e-15) {
        const double off = (path[i] == e.u) ? s : e.len - s;
        return canonical(TreePoint::on_edge(eid, std::clamp(off, 0.0, e.len)));
      }
      s -= e.len;
    }
    if (!q.is_vertex()) {
      const Edge& e = edges_[q.edge];
      const double dir = (b == e.u) ? 1.0 : -1.0;
      const double start = (b == e.u) ? 0.0 : e.len;
      return canonical(TreePoint::on_edge(q.edge, std::clamp(start + dir * s, 0.0, e.len)));
    }
    return q;
  }

  // Splits edges at the interior points given, producing a tree whose vertex
  // set contains every input point. Returns the new tree and, for each input
  // point, its vertex id there. Original vertices keep their ids.
  std::pair<MetricTree, std::vector<int>> subdivide(const std::vector<TreePoint>& pts) const {
    std::vector<std::vector<std::pair<double, int>>> cuts(edges_.size());
    std::vector<TreePoint> canon(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      canon[i] = canonical(pts[i]);
      if (!canon[i].is_vertex()) cuts[canon[i].edge].push_back({canon[i].offset, static_cast<int>(i)});
    }
    std::vector<Edge> new_edges;
    std::vector<int> where(pts.size(), -1);
    int next = static_cast<int>(V_);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      auto& cs = cuts[e];
      std::sort(cs.begin(), cs.end());
      int prev = edges_[e].u;
      double prev_off = 0.0;
      std::size_t i = 0;
      while (i < cs.size()) {
        const double off = cs[i].first;
        int vid;
        if (off - prev_off <= tol::kAtomMerge && prev != edges_[e].u) {
          vid = prev;  // merge with the cut just placed
        } else {
          vid = next++;
          new_edges.push_back({prev, vid, off - prev_off});
          prev = vid;
          prev_off = off;
        }
        while (i < cs.size() && cs[i].first - off <= tol::kAtomMerge) {
          where[cs[i].second] = vid;
          ++i;
        }
      }
      new_edges.push_back({prev, edges_[e].v, edges_[e].len - prev_off});
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (canon[i].is_vertex()) where[i] = canon[i].vertex;
    MetricTree out(static_cast<std::size_t>(next), std::move(new_edges));
    return {std::move(out), std::move(where)};
  }

  // Endpoints and length of a longest vertex-to-vertex path.
  std::tuple<int, int, double> diameter_path() const {
    if (V_ == 1) return {0, 0, 0.0};
    const auto [a, da] = farthest_from(0);
    const auto [b, db] = farthest_from(a);
    return {a, b, db};
  }

  std::vector<int> vertex_path(int a, int b) const {
    std::vector<int> up_part, down_part;
    const int l = lca(a, b);
    for (int x = a; x != l; x = parent_[x]) up_part.push_back(x);
    up_part.push_back(l);
    for (int x = b; x != l; x = parent_[x]) down_part.push_back(x);
    up_part.insert(up_part.end(), down_part.rbegin(), down_part.rend());
    return up_part;
  }

  // Point at arclength s along the path from vertex a to vertex b.
  TreePoint path_point(int a, int b, double s) const {
    const std::vector<int> path = vertex_path(a, b);
    if (path.size() == 1) return TreePoint::at_vertex(a);
    s = std::max(0.0, s);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const int eid = edge_between(path[i], path[i + 1]);
      const Edge& e = edges_[eid];
      if (s <= e.len || i + 2 == path.size()) {
        const double off = (path[i] == e.u) ? std::min(s, e.len) : e.len - std::min(s, e.len);
        return canonical(TreePoint::on_edge(eid, off));
      }
      s -= e.len;
    }
    return TreePoint::at_vertex(b);
  }

  const std::vector<std::vector<std::pair<int, int>>>& adjacency() const { return adj_; }

 private:
  // (vertex, distance from the point to that vertex) pairs through which any
  // geodesic leaving the point must pass.
  std::vector<std::pair<int, double>> anchors(const TreePoint& p) const {
    if (p.is_vertex()) return {{p.vertex, 0.0}};
    const Edge& e = edges_[p.edge];
    return {{e.u, p.offset}, {e.v, e.len - p.offset}};
  }

  int edge_between(int a, int b) const {
    for (const auto& [to, eid] : adj_[a])
      if (to == b) return eid;
    throw BadSpec("vertices not adjacent");
  }

  void build_index() {
    parent_.assign(V_, 0);
    depth_len_.assign(V_, 0.0);
    depth_cnt_.assign(V_, 0);
    std::vector<char> seen(V_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t visited = 0;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      ++visited;
      for (const auto& [to, eid] : adj_[x])
        if (!seen[to]) {
          seen[to] = 1;
          parent_[to] = x;
          depth_len_[to] = depth_len_[x] + edges_[eid].len;
          depth_cnt_[to] = depth_cnt_[x] + 1;
          stack.push_back(to);
        }
    }
    if (visited != V_) throw BadSpec("tree is not connected");
    log_ = 1;
    while ((1u << log_) < V_) ++log_;
    up_.assign(log_, std::vector<int>(V_, 0));
    up_[0] = parent_;
    for (unsigned k = 1; k < log_; ++k)
      for (std::size_t v = 0; v < V_; ++v) up_[k][v] = up_[k - 1][up_[k - 1][v]];
  }

  int lca(int a, int b) const {
    if (depth_cnt_[a] < depth_cnt_[b]) std::swap(a, b);
    int diff = depth_cnt_[a] - depth_cnt_[b];
    for (unsigned k = 0; k < log_; ++k)
      if (diff & (1 << k)) a = up_[k][a];
    if (a == b) return a;
    for (int k = static_cast<int>(log_) - 1; k >= 0; --k)
      if (up_[k][a] != up_[k][b]) {
        a = up_[k][a];
        b = up_[k][b];
      }
    return parent_[a];
  }

  std::pair<int, double> farthest_from(int s) const {
    std::vector<double> dist(V_, -1.0);
    std::vector<int> stack{s};
    dist[s] = 0.0;
    int far = s;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (dist[x] > dist[far]) far = x;
      for (const auto& [to, eid] : adj_[x])
        if (dist[to] < 0.0) {
          dist[to] = dist[x] + edges_[eid].len;
          stack.push_back(to);
        }
    }
    return {far, dist[far]};
  }

  std::size_t V_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;  // (neighbor, edge id)
  std::vector<int> parent_;
  std::vector<double> depth_len_;
  std::vector<int> depth_cnt_;
  std::vector<std::vector<int>> up_;
  unsigned log_ = 1;
};

}  // namespace mmc
