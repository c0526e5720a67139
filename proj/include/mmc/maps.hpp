#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mmc/errors.hpp"
#include "mmc/screens.hpp"
#include "mmc/space.hpp"

namespace mmc {

/// Real valued function on the points of a source space, stored as one value
/// per point index.
struct ScalarField {
  std::vector<double> values;
  std::string name;
};

/// Map from a source space into a screen, stored as one image point per
/// source point index.
struct ScreenMap {
  std::shared_ptr<const Screen> screen;
  std::vector<ScreenPoint> image;
  std::string name;
};

inline ScreenMap field_as_map(const ScalarField& f) {
  auto screen = std::make_shared<Screen>(EuclideanScreen{1});
  std::vector<ScreenPoint> img;
  img.reserve(f.values.size());
  for (double v : f.values) img.push_back(Vec{v});
  return ScreenMap{std::move(screen), std::move(img), f.name};
}

// Smallest constant L with d_Y(f(x), f(y)) <= L d_X(x, y) over support pairs
// at positive distance. Pairs at distance zero must have equal images up to
// the audit slack, otherwise the map is not Lipschitz at all.
inline double lipschitz_constant(const FiniteMMSpace& X, const ScreenMap& f) {
  if (f.image.size() != X.size()) throw BadSpec("map image size mismatch");
  double L = 0.0;
  const auto& sup = X.support();
  for (std::size_t a = 0; a < sup.size(); ++a)
    for (std::size_t b = a + 1; b < sup.size(); ++b) {
      const double dx = X.dist(sup[a], sup[b]);
      const double dy = screen_distance(*f.screen, f.image[sup[a]], f.image[sup[b]]);
      if (dx <= 0.0) {
        if (dy > tol::kLipschitz) return std::numeric_limits<double>::infinity();
        continue;
      }
      L = std::max(L, dy / dx);
    }
  return L;
}

inline void require_lipschitz(const FiniteMMSpace& X, const ScreenMap& f, double L = 1.0) {
  const auto& sup = X.support();
  for (std::size_t a = 0; a < sup.size(); ++a)
    for (std::size_t b = a + 1; b < sup.size(); ++b) {
      const double dx = X.dist(sup[a], sup[b]);
      const double dy = screen_distance(*f.screen, f.image[sup[a]], f.image[sup[b]]);
      if (dy > L * dx + tol::kLipschitz)
        throw FamilyNotLipschitz("map " + f.name + " exceeds Lipschitz bound " +
                                 std::to_string(L));
    }
}

inline double lipschitz_constant(const FiniteMMSpace& X, const ScalarField& f) {
  return lipschitz_constant(X, field_as_map(f));
}

inline void require_lipschitz(const FiniteMMSpace& X, const ScalarField& f, double L = 1.0) {
  require_lipschitz(X, field_as_map(f), L);
}

/// Atomic measure on a screen, the image of a source measure under a map.
/// Atoms carry positive weight; total mass equals the source mass.
struct PushforwardMeasure {
  std::shared_ptr<const Screen> screen;
  std::vector<ScreenPoint> atoms;
  std::vector<double> weights;

  double total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
  std::size_t size() const { return atoms.size(); }
};

// Image measure of the source under f. Atoms landing within the merge radius
// of an earlier atom are folded into it, weights added, so mass is preserved.
inline PushforwardMeasure pushforward(const FiniteMMSpace& X, const ScreenMap& f) {
  if (f.image.size() != X.size()) throw BadSpec("map image size mismatch");
  PushforwardMeasure nu;
  nu.screen = f.screen;
  for (std::size_t i : X.support()) {
    const ScreenPoint& p = f.image[i];
    bool merged = false;
    for (std::size_t a = 0; a < nu.atoms.size(); ++a)
      if (screen_distance(*f.screen, nu.atoms[a], p) <= tol::kAtomMerge) {
        nu.weights[a] += X.weight(i);
        merged = true;
        break;
      }
    if (!merged) {
      nu.atoms.push_back(p);
      nu.weights.push_back(X.weight(i));
    }
  }
  return nu;
}

inline PushforwardMeasure pushforward(const FiniteMMSpace& X, const ScalarField& f) {
  return pushforward(X, field_as_map(f));
}

// Values of the atoms of a measure on the 1-dimensional Euclidean screen.
inline std::vector<std::pair<double, double>> line_atoms(const PushforwardMeasure& nu) {
  std::vector<std::pair<double, double>> out;
  out.reserve(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vec& v = as_vec(nu.atoms[i]);
    if (v.size() != 1) throw ScreenMismatch("expected atoms on the line");
    out.push_back({v[0], nu.weights[i]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// The image measure viewed as a finite mm-space of its own, with the screen
// metric restricted to the atoms.
inline FiniteMMSpace space_from_pushforward(const PushforwardMeasure& nu) {
  const std::size_t n = nu.size();
  std::vector<std::string> labels(n);
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = "a" + std::to_string(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = screen_distance(*nu.screen, nu.atoms[i], nu.atoms[j]);
      d[i * n + j] = dij;
      d[j * n + i] = dij;
    }
  }
  return FiniteMMSpace(std::move(labels), std::move(d), nu.weights);
}

}  // namespace mmc
