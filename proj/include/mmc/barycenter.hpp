#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "mmc/errors.hpp"
#include "mmc/maps.hpp"
#include "mmc/rng.hpp"
#include "mmc/screens.hpp"

namespace mmc {

struct BarycenterResult {
  ScreenPoint point;
  double residual = 0.0;
  int iterations = 0;
};

inline Vec euclidean_barycenter(const PushforwardMeasure& nu) {
  const double m = nu.total_mass();
  if (m <= 0.0) throw EmptyMeasure("barycenter of a zero measure");
  Vec mean(as_vec(nu.atoms[0]).size(), 0.0);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vec& a = as_vec(nu.atoms[i]);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += nu.weights[i] * a[k];
  }
  return scale(mean, 1.0 / m);
}

// Fixed point iteration x <- exp_x(mean of log_x(atoms)). The mean tangent
// vector is the negative gradient of the squared-distance energy up to a
// constant, so a small residual certifies a near-stationary point.
inline BarycenterResult hyperbolic_barycenter(const PushforwardMeasure& nu, double kappa1,
                                              double tolerance = tol::kBarycenter,
                                              int max_iters = 10000) {
  const double m = nu.total_mass();
  if (m <= 0.0) throw EmptyMeasure("barycenter of a zero measure");
  Vec x = euclidean_barycenter(nu);
  double residual = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    Vec mean(x.size(), 0.0);
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const Vec v = hyp_log(kappa1, x, as_vec(nu.atoms[i]));
      for (std::size_t k = 0; k < x.size(); ++k) mean[k] += nu.weights[i] * v[k];
    }
    mean = scale(mean, 1.0 / m);
    residual = norm(mean);
    if (residual <= tolerance) return {x, residual, it};
    x = hyp_exp(kappa1, x, mean);
  }
  throw NoConvergence("hyperbolic barycenter did not reach residual tolerance");
}

// Exact tree barycenter. Restricted to one edge the squared distance to any
// atom is a single quadratic in the offset, because the geodesic to an off
// edge atom always exits through the same endpoint. So each edge is solved in
// closed form and the best edge wins.
inline BarycenterResult tree_barycenter(const PushforwardMeasure& nu) {
  const auto& tree = *std::get<TreeScreen>(*nu.screen).tree;
  const double m = nu.total_mass();
  if (m <= 0.0) throw EmptyMeasure("barycenter of a zero measure");
  if (tree.edges().empty()) return {TreePoint::at_vertex(0), 0.0, 1};

  auto objective = [&](const TreePoint& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const double d = tree.distance(x, as_tree_point(nu.atoms[i]));
      s += nu.weights[i] * d * d;
    }
    return s;
  };

  double best_val = std::numeric_limits<double>::infinity();
  TreePoint best = TreePoint::at_vertex(0);
  for (std::size_t e = 0; e < tree.edges().size(); ++e) {
    const auto& ed = tree.edge(static_cast<int>(e));
    // F(t) = sum of w (c + s t)^2 with s = +-1, so A = m and B collects the
    // cross terms: atoms behind u give c = d(u, a), atoms behind v give
    // c = d(v, a) seen from t' = L - t, atoms on the edge give |t - off|.
    double B = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const TreePoint a = tree.canonical(as_tree_point(nu.atoms[i]));
      if (!a.is_vertex() && a.edge == static_cast<int>(e)) {
        B += -2.0 * nu.weights[i] * a.offset;
      } else {
        const double du = tree.distance(TreePoint::at_vertex(ed.u), a);
        const double dv = tree.distance(TreePoint::at_vertex(ed.v), a);
        if (dv > du)
          B += 2.0 * nu.weights[i] * du;  // d = t + du
        else
          B += -2.0 * nu.weights[i] * (ed.len + dv);  // d = (L - t) + dv
      }
    }
    const double t_star = std::clamp(-B / (2.0 * m), 0.0, ed.len);
    const TreePoint cand = tree.canonical(TreePoint::on_edge(static_cast<int>(e), t_star));
    const double val = objective(cand);
    if (val < best_val - 1e-15) {
      best_val = val;
      best = cand;
    }
  }
  return {best, 0.0, 1};
}

inline BarycenterResult barycenter(const PushforwardMeasure& nu) {
  if (std::holds_alternative<EuclideanScreen>(*nu.screen))
    return {euclidean_barycenter(nu), 0.0, 1};
  if (const auto* h = std::get_if<HyperbolicScreen>(&*nu.screen))
    return hyperbolic_barycenter(nu, h->kappa1);
  return tree_barycenter(nu);
}

struct TMeanOptions {
  std::size_t max_atom_starts = std::numeric_limits<std::size_t>::max();
  int random_starts = 8;
  std::uint64_t seed = 0;
  int max_iters = 200;
  double tolerance = 1e-10;
};

struct TMeanResult {
  ScreenPoint point;
  double objective = 0.0;
  bool flat_region = false;
  std::optional<ScreenPoint> flat_witness;  // distant point at the same level
};

namespace detail {

inline double power_objective(const PushforwardMeasure& nu, const ScreenPoint& x, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    s += nu.weights[i] * std::pow(screen_distance(*nu.screen, x, nu.atoms[i]), t);
  return s;
}

// Twice the radius around the first atom, an upper bound for the spread.
inline double atom_scale(const PushforwardMeasure& nu) {
  double r = 0.0;
  for (std::size_t i = 1; i < nu.size(); ++i)
    r = std::max(r, screen_distance(*nu.screen, nu.atoms[0], nu.atoms[i]));
  return 2.0 * r;
}

inline double dist_to_atoms(const PushforwardMeasure& nu, const ScreenPoint& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nu.size(); ++i)
    best = std::min(best, screen_distance(*nu.screen, x, nu.atoms[i]));
  return best;
}

// Line search descent for the power objective on the two manifold screens.
// The search direction is the downhill tangent; step halving copes with the
// kinks the objective has at atoms when t <= 1.
inline ScreenPoint descend(const PushforwardMeasure& nu, double kappa1_or_zero, Vec x, double t,
                           const TMeanOptions& opt) {
  const bool hyp = kappa1_or_zero < 0.0;
  const double scale0 = std::max(detail::atom_scale(nu), 1e-9);
  double eta = scale0 * 0.25;
  double fx = power_objective(nu, x, t);
  for (int it = 0; it < opt.max_iters && eta > 1e-13 * scale0; ++it) {
    Vec g(x.size(), 0.0);
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const Vec& a = as_vec(nu.atoms[i]);
      const Vec to_a = hyp ? hyp_log(kappa1_or_zero, x, a) : sub(a, x);
      const double d = norm(to_a);
      if (d < 1e-14) continue;
      const double c = nu.weights[i] * std::pow(d, t - 1.0);
      for (std::size_t k = 0; k < x.size(); ++k) g[k] += c * to_a[k] / d;
    }
    const double gn = norm(g);
    if (gn < 1e-15) break;
    const Vec dir = scale(g, 1.0 / gn);
    bool moved = false;
    while (eta > 1e-13 * scale0) {
      const Vec step = scale(dir, eta);
      const Vec cand = hyp ? hyp_exp(kappa1_or_zero, x, step) : add(x, step);
      const double fc = power_objective(nu, cand, t);
      if (fc < fx - 1e-15 * (1.0 + std::abs(fx))) {
        x = cand;
        fx = fc;
        eta *= 1.3;
        moved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

inline TMeanResult pick_minimizer(const PushforwardMeasure& nu, std::vector<ScreenPoint> cands,
                                  double t) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  std::vector<double> vals(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    vals[i] = power_objective(nu, cands[i], t);
    if (vals[i] < best) {
      best = vals[i];
      arg = i;
    }
  }
  TMeanResult out{cands[arg], best, false, std::nullopt};
  const double level = best + 1e-10 * (1.0 + std::abs(best));
  double far = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (vals[i] <= level) {
      const double d = screen_distance(*nu.screen, cands[arg], cands[i]);
      if (d > far) {
        far = d;
        out.flat_witness = cands[i];
      }
    }
  if (far > 1e-6)
    out.flat_region = true;
  else
    out.flat_witness.reset();
  return out;
}

}  // namespace detail

// Global minimizer of x -> sum of w_i d(x, atom_i)^t for t in (0, 2]. Multi
// start descent on the manifold screens, exact per-edge search on trees. For
// t <= 1 the objective can be flat on a region; the result flags that and
// carries a witness of the detected extent.
inline TMeanResult t_mean(const PushforwardMeasure& nu, double t, TMeanOptions opt = {}) {
  if (!(t > 0.0 && t <= 2.0)) throw BadSpec("power mean exponent must lie in (0, 2]");
  const double m = nu.total_mass();
  if (m <= 0.0) throw EmptyMeasure("power mean of a zero measure");

  if (is_tree_screen(*nu.screen)) {
    const auto& tree = *std::get<TreeScreen>(*nu.screen).tree;
    std::vector<ScreenPoint> cands;
    for (std::size_t i = 0; i < nu.size(); ++i) cands.push_back(nu.atoms[i]);
    auto fe = [&](int e, double off) {
      return detail::power_objective(nu, TreePoint::on_edge(e, off), t);
    };
    for (std::size_t e = 0; e < tree.edges().size(); ++e) {
      const double L = tree.edge(static_cast<int>(e)).len;
      cands.push_back(TreePoint::on_edge(static_cast<int>(e), 0.0));
      cands.push_back(TreePoint::on_edge(static_cast<int>(e), L));
      // golden section for the smooth regime; at t <= 1 minima sit at atoms
      // or vertices, which are already candidates
      double lo = 0.0, hi = L;
      const double gr = 0.6180339887498949;
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = fe(static_cast<int>(e), x1), f2 = fe(static_cast<int>(e), x2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = fe(static_cast<int>(e), x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = fe(static_cast<int>(e), x2);
        }
      }
      cands.push_back(TreePoint::on_edge(static_cast<int>(e), 0.5 * (lo + hi)));
    }
    if (tree.edges().empty()) cands.push_back(TreePoint::at_vertex(0));
    return detail::pick_minimizer(nu, std::move(cands), t);
  }

  const bool hyp = std::holds_alternative<HyperbolicScreen>(*nu.screen);
  const double kappa1 = hyp ? std::get<HyperbolicScreen>(*nu.screen).kappa1 : 0.0;
  std::vector<Vec> starts;
  const std::size_t n = nu.size();
  const std::size_t take = std::min<std::size_t>(n, opt.max_atom_starts);
  for (std::size_t j = 0; j < take; ++j) starts.push_back(as_vec(nu.atoms[j * n / take]));
  Vec center = hyp ? as_vec(hyperbolic_barycenter(nu, kappa1).point) : euclidean_barycenter(nu);
  starts.push_back(center);
  Rng rng(opt.seed ^ 0x746d65616eull);
  const double spread = std::max(detail::atom_scale(nu), 1e-9);
  for (int j = 0; j < opt.random_starts; ++j) {
    Vec v(center.size());
    for (auto& c : v) c = rng.normal() * 0.25 * spread;
    starts.push_back(hyp ? hyp_exp(kappa1, center, v) : add(center, v));
  }
  std::vector<ScreenPoint> cands;
  for (const Vec& s : starts) cands.push_back(detail::descend(nu, kappa1, s, t, opt));
  for (std::size_t i = 0; i < nu.size(); ++i) cands.push_back(nu.atoms[i]);
  TMeanResult res = detail::pick_minimizer(nu, std::move(cands), t);
  // Minimizers provably stay within twice the support spread; escaping that
  // region means the search broke down.
  if (detail::dist_to_atoms(nu, res.point) > 2.0 * spread + 1e-6)
    throw NoConvergence("power mean minimizer escaped the support region");
  return res;
}

struct MinimizerSet {
  std::vector<ScreenPoint> points;
  std::vector<double> exponents;
  double diameter = 0.0;
  bool any_flat = false;
};

// Minimizers collected over a grid of exponents in [s, t]. The diameter is
// the max screen distance over everything collected, flat regions contribute
// their witnesses.
inline MinimizerSet minimizer_set(const PushforwardMeasure& nu, double s, double t,
                                  std::size_t grid_size = 33, TMeanOptions opt = {}) {
  if (!(s > 0.0 && s <= t && t <= 2.0)) throw BadSpec("exponent range must satisfy 0 < s <= t <= 2");
  if (grid_size < 1) throw BadSpec("grid size must be positive");
  MinimizerSet out;
  for (std::size_t g = 0; g < grid_size; ++g) {
    const double r = (grid_size == 1) ? s : s + (t - s) * static_cast<double>(g) / (grid_size - 1);
    TMeanResult res = t_mean(nu, r, opt);
    out.points.push_back(res.point);
    out.exponents.push_back(r);
    if (res.flat_region && res.flat_witness) {
      out.points.push_back(*res.flat_witness);
      out.exponents.push_back(r);
      out.any_flat = true;
    }
  }
  for (std::size_t i = 0; i < out.points.size(); ++i)
    for (std::size_t j = i + 1; j < out.points.size(); ++j)
      out.diameter = std::max(out.diameter, screen_distance(*nu.screen, out.points[i], out.points[j]));
  return out;
}

// Both sides of the variance comparison at the barycenter. lhs is the energy
// sum w_i d(b, atom_i)^p at the p = 2 barycenter, rhs is the double sum
// (1/c) sum w_i w_j d^p with c = 2m for the CAT(0) direction at p = 2 and
// c = m for the Jensen direction at p >= 1.
struct VariancePair {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline double variance_energy(const PushforwardMeasure& nu, const ScreenPoint& c, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    s += nu.weights[i] * std::pow(screen_distance(*nu.screen, c, nu.atoms[i]), p);
  return s;
}

inline double variance_double_sum(const PushforwardMeasure& nu, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (i == j) continue;
      s += nu.weights[i] * nu.weights[j] *
           std::pow(screen_distance(*nu.screen, nu.atoms[i], nu.atoms[j]), p);
    }
  return s;
}

inline VariancePair variance_cat0(const PushforwardMeasure& nu) {
  const BarycenterResult b = barycenter(nu);
  return {variance_energy(nu, b.point, 2.0), variance_double_sum(nu, 2.0) / (2.0 * nu.total_mass())};
}

inline VariancePair variance_jensen(const PushforwardMeasure& nu, double p) {
  if (p < 1.0) throw BadSpec("Jensen comparison needs p >= 1");
  const BarycenterResult b = barycenter(nu);
  return {variance_energy(nu, b.point, p), variance_double_sum(nu, p) / nu.total_mass()};
}

// Reversed comparison for measures sampled on a round sphere, where curvature
// is nonnegative: the infimum of the energy dominates the half double sum.
// The infimum is approximated from inside over atoms and pairwise geodesic
// midpoints, which keeps the reported lhs an upper bound of the true one.
struct SphereMeasure {
  std::vector<Vec> points;  // unit vectors
  std::vector<double> weights;
  double radius = 1.0;
};

inline double sphere_geodesic(const SphereMeasure& S, const Vec& a, const Vec& b) {
  const double c = std::clamp(dot(a, b), -1.0, 1.0);
  return S.radius * std::acos(c);
}

inline VariancePair variance_nonneg_sphere(const SphereMeasure& S) {
  const double m = std::accumulate(S.weights.begin(), S.weights.end(), 0.0);
  if (m <= 0.0) throw EmptyMeasure("variance of a zero measure");
  std::vector<Vec> cands = S.points;
  for (std::size_t i = 0; i < S.points.size(); ++i)
    for (std::size_t j = i + 1; j < S.points.size(); ++j) {
      Vec mid = add(S.points[i], S.points[j]);
      double n = norm(mid);
      if (n < 1e-9) {
        // antipodal pair, any equatorial point is a midpoint
        mid = Vec(S.points[i].size(), 0.0);
        std::size_t k = 0;
        while (k + 1 < mid.size() && std::abs(S.points[i][k]) > 0.9) ++k;
        mid[k] = 1.0;
        Vec proj = sub(mid, scale(S.points[i], dot(mid, S.points[i])));
        n = norm(proj);
        mid = proj;
      }
      cands.push_back(scale(mid, 1.0 / n));
    }
  double lhs = std::numeric_limits<double>::infinity();
  for (const Vec& c : cands) {
    double s = 0.0;
    for (std::size_t i = 0; i < S.points.size(); ++i) {
      const double d = sphere_geodesic(S, c, S.points[i]);
      s += S.weights[i] * d * d;
    }
    lhs = std::min(lhs, s);
  }
  double rhs = 0.0;
  for (std::size_t i = 0; i < S.points.size(); ++i)
    for (std::size_t j = 0; j < S.points.size(); ++j) {
      if (i == j) continue;
      const double d = sphere_geodesic(S, S.points[i], S.points[j]);
      rhs += S.weights[i] * S.weights[j] * d * d;
    }
  return {lhs, rhs / (2.0 * m)};
}

}  // namespace mmc
