#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>

#include "mmc/errors.hpp"
#include "mmc/hyperbolic.hpp"
#include "mmc/tree.hpp"
#include "mmc/vec.hpp"

namespace mmc {

// Target spaces that source points get mapped into. Three kinds: Euclidean
// R^k, hyperbolic n-space of negative curvature on the ball model, and finite
// metric trees.

struct EuclideanScreen {
  std::size_t dim;
};

struct HyperbolicScreen {
  std::size_t dim;
  double kappa1;  // strictly negative
};

struct TreeScreen {
  std::shared_ptr<const MetricTree> tree;
};

using Screen = std::variant<EuclideanScreen, HyperbolicScreen, TreeScreen>;

/// A point of whichever screen is in play. Vector coordinates for the two
/// manifold screens, a tree location otherwise.
using ScreenPoint = std::variant<Vec, TreePoint>;

inline const Vec& as_vec(const ScreenPoint& p) {
  if (const Vec* v = std::get_if<Vec>(&p)) return *v;
  throw ScreenMismatch("expected a coordinate point");
}

inline const TreePoint& as_tree_point(const ScreenPoint& p) {
  if (const TreePoint* t = std::get_if<TreePoint>(&p)) return *t;
  throw ScreenMismatch("expected a tree point");
}

inline double screen_distance(const Screen& s, const ScreenPoint& a, const ScreenPoint& b) {
  if (const auto* e = std::get_if<EuclideanScreen>(&s)) {
    const Vec &x = as_vec(a), &y = as_vec(b);
    if (x.size() != e->dim || y.size() != e->dim) throw ScreenMismatch("dimension mismatch");
    return euclid_dist(x, y);
  }
  if (const auto* h = std::get_if<HyperbolicScreen>(&s)) {
    const Vec &x = as_vec(a), &y = as_vec(b);
    if (x.size() != h->dim || y.size() != h->dim) throw ScreenMismatch("dimension mismatch");
    return hyp_distance(h->kappa1, x, y);
  }
  const auto& t = std::get<TreeScreen>(s);
  return t.tree->distance(as_tree_point(a), as_tree_point(b));
}

// Geodesic point a fraction t of the way from a to b. All three screens are
// uniquely geodesic, so this is well defined.
inline ScreenPoint screen_interpolate(const Screen& s, const ScreenPoint& a,
                                      const ScreenPoint& b, double t) {
  if (std::holds_alternative<EuclideanScreen>(s)) {
    const Vec &x = as_vec(a), &y = as_vec(b);
    return add(scale(x, 1.0 - t), scale(y, t));
  }
  if (const auto* h = std::get_if<HyperbolicScreen>(&s)) {
    return hyp_interpolate(h->kappa1, as_vec(a), as_vec(b), t);
  }
  const auto& tr = std::get<TreeScreen>(s);
  return tr.tree->interpolate(as_tree_point(a), as_tree_point(b), t);
}

inline std::size_t screen_dim(const Screen& s) {
  if (const auto* e = std::get_if<EuclideanScreen>(&s)) return e->dim;
  if (const auto* h = std::get_if<HyperbolicScreen>(&s)) return h->dim;
  return 0;
}

inline bool is_tree_screen(const Screen& s) { return std::holds_alternative<TreeScreen>(s); }

inline std::string screen_name(const Screen& s) {
  if (const auto* e = std::get_if<EuclideanScreen>(&s))
    return "euclid:" + std::to_string(e->dim);
  if (const auto* h = std::get_if<HyperbolicScreen>(&s)) {
    std::string k = std::to_string(h->kappa1);
    k.erase(k.find_last_not_of('0') + 1);
    if (!k.empty() && k.back() == '.') k.pop_back();
    return "hyperbolic:" + std::to_string(h->dim) + ":" + k;
  }
  return "tree";
}

}  // namespace mmc
