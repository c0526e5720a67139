#pragma once

#include <cmath>
#include <cstddef>

#include "mmc/errors.hpp"
#include "mmc/tol.hpp"
#include "mmc/vec.hpp"

namespace mmc {

// Hyperbolic n-space of curvature kappa1 < 0, realized on the open unit ball
// (Poincare model). The metric is the curvature -1 ball metric divided by
// sqrt(-kappa1), so distances scale the way sectional curvature demands.
//
// Tangent vectors at a base point are expressed in the frame obtained by the
// Mobius translation that moves the base to the origin. That translation is an
// isometry, so norms of tangent vectors are metric lengths and the exp/log
// pair below is a genuine inverse pair.

inline void check_in_disk(const Vec& x) {
  if (norm(x) > 1.0 - tol::kBoundary)
    throw OutOfDisk("point too close to the ideal boundary of the ball model");
}

inline double hyp_distance(double kappa1, const Vec& x, const Vec& y) {
  if (!(kappa1 < 0.0)) throw BadSpec("hyperbolic curvature must be negative");
  if (x.size() != y.size()) throw ScreenMismatch("point dimension mismatch");
  check_in_disk(x);
  check_in_disk(y);
  const double qx = 1.0 - norm2(x);
  const double qy = 1.0 - norm2(y);
  const double exy = euclid_dist(x, y);
  const double t = exy / std::sqrt(qx * qy);
  const double d1 = 2.0 * std::log(t + std::sqrt(t * t + 1.0));
  return d1 / std::sqrt(-kappa1);
}

// Mobius addition on the unit ball. a + (plus) x in gyrovector notation.
// Translations x -> a (+) x are isometries of the curvature -1 metric and
// satisfy the left cancellation a (+) ((-a) (+) x) = x.
inline Vec mobius_add(const Vec& a, const Vec& x) {
  const double ax = dot(a, x);
  const double na = norm2(a);
  const double nx = norm2(x);
  const double denom = 1.0 + 2.0 * ax + na * nx;
  Vec out(a.size());
  const double ca = (1.0 + 2.0 * ax + nx) / denom;
  const double cx = (1.0 - na) / denom;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cx * x[i];
  return out;
}

// exp at the origin: a tangent vector of metric length s maps to the point at
// Euclidean radius tanh(sqrt(-kappa1) s / 2) along the same direction.
inline Vec hyp_exp_origin(double kappa1, const Vec& v) {
  const double s = norm(v);
  if (s == 0.0) return Vec(v.size(), 0.0);
  const double r = std::tanh(0.5 * std::sqrt(-kappa1) * s);
  if (r > 1.0 - tol::kBoundary)
    throw OutOfDisk("tangent vector too long for the ball model at this curvature");
  return scale(v, r / s);
}

inline Vec hyp_log_origin(double kappa1, const Vec& y) {
  check_in_disk(y);
  const double r = norm(y);
  if (r == 0.0) return Vec(y.size(), 0.0);
  const double s = 2.0 * std::atanh(r) / std::sqrt(-kappa1);
  return scale(y, s / r);
}

inline Vec hyp_exp(double kappa1, const Vec& base, const Vec& v) {
  check_in_disk(base);
  return mobius_add(base, hyp_exp_origin(kappa1, v));
}

inline Vec hyp_log(double kappa1, const Vec& base, const Vec& y) {
  check_in_disk(base);
  return hyp_log_origin(kappa1, mobius_add(neg(base), y));
}

// Point a fraction t of the way from x to y along the geodesic.
inline Vec hyp_interpolate(double kappa1, const Vec& x, const Vec& y, double t) {
  return hyp_exp(kappa1, x, scale(hyp_log(kappa1, x, y), t));
}

// Radial distortion map of the unit ball onto all of R^n. It dominates the
// Euclidean metric: |phi(x) - phi(y)| >= |x - y| for all x, y in the ball.
inline Vec phi_distortion(const Vec& x) {
  check_in_disk(x);
  return scale(x, 1.0 / (1.0 - norm(x)));
}

}  // namespace mmc
