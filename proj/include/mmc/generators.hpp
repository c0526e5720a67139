#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mmc/errors.hpp"
#include "mmc/tol.hpp"
#include "mmc/maps.hpp"
#include "mmc/rng.hpp"
#include "mmc/screens.hpp"
#include "mmc/space.hpp"

namespace mmc {

// Seeded model spaces. Same spec and seed always give byte-identical output.

inline FiniteMMSpace gen_two_point() {
  return FiniteMMSpace({"x1", "x2"}, {0.0, 1.0, 1.0, 0.0}, {0.5, 0.5});
}

// N equispaced points on a circle of radius r with the arc metric.
inline FiniteMMSpace gen_circle(std::size_t N, double r = 1.0) {
  if (N < 2) throw BadSpec("circle needs at least two points");
  const double pi = 3.14159265358979323846;
  std::vector<std::string> labels(N);
  std::vector<double> d(N * N, 0.0), w(N, 1.0 / static_cast<double>(N));
  for (std::size_t i = 0; i < N; ++i) labels[i] = "c" + std::to_string(i);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double k = static_cast<double>(j - i);
      const double steps = std::min(k, static_cast<double>(N) - k);
      const double dij = r * 2.0 * pi * steps / static_cast<double>(N);
      d[i * N + j] = dij;
      d[j * N + i] = dij;
    }
  return FiniteMMSpace(std::move(labels), std::move(d), std::move(w));
}

// Hamming cube {0,1}^k, uniform weights.
inline FiniteMMSpace gen_cube(std::size_t k) {
  if (k < 1 || k > 12) throw BadSpec("cube dimension must lie in [1, 12]");
  const std::size_t N = std::size_t{1} << k;
  std::vector<std::string> labels(N);
  std::vector<double> d(N * N, 0.0), w(N, 1.0 / static_cast<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    std::string s(k, '0');
    for (std::size_t b = 0; b < k; ++b)
      if (i & (std::size_t{1} << b)) s[k - 1 - b] = '1';
    labels[i] = s;
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double dij = static_cast<double>(std::popcount(i ^ j));
      d[i * N + j] = dij;
      d[j * N + i] = dij;
    }
  return FiniteMMSpace(std::move(labels), std::move(d), std::move(w));
}

// Unit vectors of N independent uniform points on the round n-sphere.
inline std::vector<Vec> sphere_points(std::size_t n, std::size_t N, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> pts(N, Vec(n + 1, 0.0));
  for (auto& p : pts) {
    double nr = 0.0;
    while (nr < 1e-12) {
      for (auto& c : p) c = rng.normal();
      nr = norm(p);
    }
    p = scale(p, 1.0 / nr);
  }
  return pts;
}

struct SphereSample {
  FiniteMMSpace space;
  std::vector<Vec> coords;  // unit vectors
  double radius;
};

// Geodesic distance sample of the round sphere of radius r in R^{n+1}.
inline SphereSample gen_sphere(std::size_t n, double r, std::size_t N, std::uint64_t seed) {
  if (N < 1) throw BadSpec("sphere sample needs at least one point");
  if (!(r > 0.0)) throw BadSpec("sphere radius must be positive");
  std::vector<Vec> pts = sphere_points(n, N, seed);
  std::vector<std::string> labels(N);
  std::vector<double> d(N * N, 0.0), w(N, 1.0 / static_cast<double>(N));
  for (std::size_t i = 0; i < N; ++i) labels[i] = "s" + std::to_string(i);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double c = std::clamp(dot(pts[i], pts[j]), -1.0, 1.0);
      const double dij = r * std::acos(c);
      d[i * N + j] = dij;
      d[j * N + i] = dij;
    }
  return {FiniteMMSpace(std::move(labels), std::move(d), std::move(w)), std::move(pts), r};
}

// Uniform points in the unit cube with Euclidean distances. Weights are drawn
// from [0.5, 1.5] so the total mass is not one, which exercises the general
// mass handling downstream.
inline FiniteMMSpace gen_cloud(std::size_t dim, std::size_t N, std::uint64_t seed) {
  if (N < 1 || dim < 1) throw BadSpec("cloud needs positive dimension and size");
  Rng rng(seed);
  std::vector<Vec> pts(N, Vec(dim, 0.0));
  for (auto& p : pts)
    for (auto& c : p) c = rng.uniform();
  std::vector<std::string> labels(N);
  std::vector<double> d(N * N, 0.0), w(N);
  for (std::size_t i = 0; i < N; ++i) {
    labels[i] = "p" + std::to_string(i);
    w[i] = rng.uniform(0.5, 1.5);
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double dij = euclid_dist(pts[i], pts[j]);
      d[i * N + j] = dij;
      d[j * N + i] = dij;
    }
  return FiniteMMSpace(std::move(labels), std::move(d), std::move(w));
}

// Random tree with unit-scale edge lengths, then a measure of k random atoms.
inline MetricTree gen_random_tree(std::size_t V, std::uint64_t seed) {
  if (V < 1) throw BadSpec("tree needs at least one vertex");
  Rng rng(seed);
  std::vector<MetricTree::Edge> edges;
  for (std::size_t v = 1; v < V; ++v) {
    const int parent = static_cast<int>(rng.index(v));
    edges.push_back({parent, static_cast<int>(v), rng.uniform(0.2, 1.5)});
  }
  return MetricTree(V, std::move(edges));
}

inline PushforwardMeasure random_tree_measure(std::shared_ptr<const Screen> screen,
                                              std::size_t atoms, std::uint64_t seed) {
  const auto& tree = *std::get<TreeScreen>(*screen).tree;
  Rng rng(seed ^ 0x7265656du);
  PushforwardMeasure nu;
  nu.screen = std::move(screen);
  for (std::size_t i = 0; i < atoms; ++i) {
    TreePoint p;
    if (tree.edges().empty() || rng.uniform() < 0.25) {
      p = TreePoint::at_vertex(static_cast<int>(rng.index(tree.vertex_count())));
    } else {
      const int e = static_cast<int>(rng.index(tree.edges().size()));
      p = tree.canonical(TreePoint::on_edge(e, rng.uniform() * tree.edge(e).len));
    }
    bool merged = false;
    for (std::size_t a = 0; a < nu.atoms.size(); ++a)
      if (tree.distance(as_tree_point(nu.atoms[a]), p) <= tol::kAtomMerge) {
        nu.weights[a] += rng.uniform(0.5, 1.5);
        merged = true;
        break;
      }
    if (!merged) {
      nu.atoms.push_back(p);
      nu.weights.push_back(rng.uniform(0.5, 1.5));
    }
  }
  return nu;
}

// q-th absolute moment of the standard Gaussian, via the log Gamma function.
inline double gaussian_moment(double q) {
  if (q < 0.0) throw BadSpec("moment order must be nonnegative");
  const double log_pi = 1.1447298858494001741;
  const double log_2 = 0.6931471805599453094;
  return std::exp(0.5 * q * log_2 - 0.5 * log_pi + std::lgamma(0.5 * (q + 1.0)));
}

// Largest 1-Lipschitz function dominated by g: x -> min over y of g(y) + d(x,y).
inline ScalarField lipschitz_envelope(const FiniteMMSpace& X, const std::vector<double>& g,
                                      std::string name = "env") {
  if (g.size() != X.size()) throw BadSpec("envelope input size mismatch");
  ScalarField f;
  f.name = std::move(name);
  f.values.resize(X.size());
  for (std::size_t x = 0; x < X.size(); ++x) {
    double best = g[x];
    for (std::size_t y = 0; y < X.size(); ++y)
      best = std::min(best, g[y] + X.dist(x, y));
    f.values[x] = best;
  }
  return f;
}

struct ScalarFamily {
  std::vector<ScalarField> fields;
  std::string description;
  std::uint64_t seed = 0;
};

struct MapFamily {
  std::vector<ScreenMap> maps;
  std::string description;
  std::uint64_t seed = 0;
};

// Signed distance fields d(., x) and -d(., x) for every support anchor.
inline ScalarFamily fields_distance(const FiniteMMSpace& X) {
  ScalarFamily fam;
  fam.description = "signed distance fields to each support point";
  for (std::size_t a : X.support()) {
    ScalarField f;
    f.name = "d:" + std::to_string(a);
    f.values = X.row(a);
    ScalarField g;
    g.name = "-d:" + std::to_string(a);
    g.values.reserve(f.values.size());
    for (double v : f.values) g.values.push_back(-v);
    fam.fields.push_back(std::move(f));
    fam.fields.push_back(std::move(g));
  }
  return fam;
}

namespace detail {

inline void halfmass_rec(const FiniteMMSpace& X, std::size_t idx, double mass,
                         std::vector<double>& mind, const std::vector<double>& suffix,
                         double half, std::vector<ScalarField>& out) {
  const auto& sup = X.support();
  if (mass + suffix[idx] < half - tol::kMass) return;  // cannot reach half any more
  if (idx >= sup.size()) {
    ScalarField f;
    f.name = "dA:" + std::to_string(out.size());
    f.values = mind;
    out.push_back(std::move(f));
    return;
  }
  std::vector<double> mind2(mind);
  for (std::size_t y = 0; y < X.size(); ++y)
    mind2[y] = std::min(mind2[y], X.dist(y, sup[idx]));
  halfmass_rec(X, idx + 1, mass + X.weight(sup[idx]), mind2, suffix, half, out);
  halfmass_rec(X, idx + 1, mass, mind, suffix, half, out);
}

}  // namespace detail

// Distance fields d(., A) over every support subset holding at least half the
// mass. The count is exponential in the support size, hence the hard cap.
inline ScalarFamily fields_halfmass(const FiniteMMSpace& X) {
  const auto& sup = X.support();
  if (sup.size() > kAlphaExactLimit)
    throw ModeUnavailable("half-mass family limited to " + std::to_string(kAlphaExactLimit) +
                          " support points");
  ScalarFamily fam;
  fam.description = "distance fields to half-mass subsets";
  std::vector<double> suffix(sup.size() + 1, 0.0);
  for (std::size_t i = sup.size(); i > 0; --i)
    suffix[i - 1] = suffix[i] + X.weight(sup[i - 1]);
  std::vector<double> mind(X.size(), std::numeric_limits<double>::infinity());
  detail::halfmass_rec(X, 0, 0.0, mind, suffix, X.total_mass() / 2.0, fam.fields);
  return fam;
}

// Envelopes of seeded random functions, 1-Lipschitz by construction.
inline ScalarFamily fields_random_envelope(const FiniteMMSpace& X, std::size_t count,
                                           std::uint64_t seed) {
  ScalarFamily fam;
  fam.description = "lipschitz envelopes of seeded random functions";
  fam.seed = seed;
  Rng rng(seed ^ 0x656e76u);
  const double diam = X.diameter();
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> g(X.size());
    for (auto& v : g) v = rng.uniform(0.0, std::max(diam, 1e-9));
    fam.fields.push_back(lipschitz_envelope(X, g, "env:" + std::to_string(c)));
  }
  return fam;
}

// x -> (d(x, p_1), ..., d(x, p_k)) / sqrt(k) into R^k, anchors seeded.
inline MapFamily maps_multi_distance(const FiniteMMSpace& X, std::size_t k, std::size_t count,
                                     std::uint64_t seed) {
  if (k < 1) throw BadSpec("need at least one anchor coordinate");
  MapFamily fam;
  fam.description = "scaled multi-anchor distance embeddings into R^" + std::to_string(k);
  fam.seed = seed;
  Rng rng(seed ^ 0x6d64u);
  auto screen = std::make_shared<Screen>(EuclideanScreen{k});
  const auto& sup = X.support();
  const double inv = 1.0 / std::sqrt(static_cast<double>(k));
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<std::size_t> anchors(k);
    for (auto& a : anchors) a = sup[rng.index(sup.size())];
    ScreenMap f;
    f.screen = screen;
    f.name = "md:" + std::to_string(c);
    for (std::size_t x = 0; x < X.size(); ++x) {
      Vec v(k);
      for (std::size_t j = 0; j < k; ++j) v[j] = X.dist(x, anchors[j]) * inv;
      f.image.push_back(std::move(v));
    }
    fam.maps.push_back(std::move(f));
  }
  return fam;
}

// Scalar fields pushed isometrically onto a geodesic of the screen. Values
// are centered first; on trees they are additionally scaled down to fit the
// longest path, which keeps the maps 1-Lipschitz.
inline MapFamily maps_geodesic(const FiniteMMSpace& X, std::shared_ptr<const Screen> screen,
                               const std::vector<ScalarField>& fields) {
  MapFamily fam;
  fam.description = "geodesic embeddings of scalar fields";
  for (const ScalarField& f : fields) {
    double lo = f.values[0], hi = f.values[0];
    for (double v : f.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mid = 0.5 * (lo + hi);
    ScreenMap g;
    g.screen = screen;
    g.name = "geo:" + f.name;
    if (const auto* h = std::get_if<HyperbolicScreen>(&*screen)) {
      for (double v : f.values) {
        Vec dir(h->dim, 0.0);
        dir[0] = v - mid;
        g.image.push_back(hyp_exp_origin(h->kappa1, dir));
      }
    } else if (std::holds_alternative<TreeScreen>(*screen)) {
      const auto& tree = *std::get<TreeScreen>(*screen).tree;
      const auto [a, b, len] = tree.diameter_path();
      const double range = hi - lo;
      const double sc = (range > 0.0) ? std::min(1.0, len / range) : 1.0;
      for (double v : f.values) g.image.push_back(tree.path_point(a, b, (v - lo) * sc));
    } else {
      const auto* e = std::get_if<EuclideanScreen>(&*screen);
      for (double v : f.values) {
        Vec p(e->dim, 0.0);
        p[0] = v - mid;
        g.image.push_back(std::move(p));
      }
    }
    fam.maps.push_back(std::move(g));
  }
  return fam;
}

// Random point assignments repaired into 1-Lipschitz maps: any pair of
// images further apart than their source points gets pulled toward its
// geodesic midpoint until every pair complies. Each screen kind supplies its
// own random seed points.
inline MapFamily maps_repaired(const FiniteMMSpace& X, std::shared_ptr<const Screen> screen,
                               std::size_t count, std::uint64_t seed, int max_sweeps = 1000) {
  MapFamily fam;
  fam.description = "repaired random assignments";
  fam.seed = seed;
  Rng rng(seed ^ 0x726570u);
  const double diam = std::max(X.diameter(), 1e-9);
  for (std::size_t c = 0; c < count; ++c) {
    ScreenMap f;
    f.screen = screen;
    f.name = "rep:" + std::to_string(c);
    for (std::size_t x = 0; x < X.size(); ++x) {
      if (const auto* e = std::get_if<EuclideanScreen>(&*screen)) {
        Vec p(e->dim);
        for (auto& v : p) v = rng.uniform(0.0, diam);
        f.image.push_back(std::move(p));
      } else if (const auto* h = std::get_if<HyperbolicScreen>(&*screen)) {
        Vec p(h->dim);
        double r = 2.0;
        while (r > 0.7) {
          for (auto& v : p) v = rng.uniform(-0.7, 0.7);
          r = norm(p);
        }
        f.image.push_back(p);
      } else {
        const auto& tree = *std::get<TreeScreen>(*screen).tree;
        if (tree.edges().empty()) {
          f.image.push_back(TreePoint::at_vertex(0));
        } else {
          const int e = static_cast<int>(rng.index(tree.edges().size()));
          f.image.push_back(tree.canonical(TreePoint::on_edge(e, rng.uniform() * tree.edge(e).len)));
        }
      }
    }
    const auto& sup = X.support();
    bool clean = false;
    for (int sweep = 0; sweep < max_sweeps && !clean; ++sweep) {
      clean = true;
      for (std::size_t a = 0; a < sup.size(); ++a)
        for (std::size_t b = a + 1; b < sup.size(); ++b) {
          const double dx = X.dist(sup[a], sup[b]);
          const double dy = screen_distance(*screen, f.image[sup[a]], f.image[sup[b]]);
          if (dy > dx + 0.5 * tol::kLipschitz) {
            // both endpoints slide along their common geodesic so the new
            // distance is a shade under dx
            const double s = 0.5 * (1.0 - (dx * (1.0 - 1e-9)) / dy);
            ScreenPoint na = screen_interpolate(*screen, f.image[sup[a]], f.image[sup[b]], s);
            ScreenPoint nb = screen_interpolate(*screen, f.image[sup[a]], f.image[sup[b]], 1.0 - s);
            f.image[sup[a]] = std::move(na);
            f.image[sup[b]] = std::move(nb);
            clean = false;
          }
        }
    }
    if (!clean) throw RepairFailed("assignment repair did not settle within sweep budget");
    fam.maps.push_back(std::move(f));
  }
  return fam;
}

/// Parsed "name:key=value,..." space description.
struct SpaceSpec {
  std::string generator;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

inline SpaceSpec parse_space_spec(const std::string& text) {
  SpaceSpec spec;
  const auto colon = text.find(':');
  spec.generator = text.substr(0, colon);
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw BadSpec("malformed space parameter: " + item);
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      try {
        if (key == "seed") {
          spec.seed = std::stoull(val);
          spec.has_seed = true;
        } else {
          spec.params[key] = std::stod(val);
        }
      } catch (const std::exception&) {
        throw BadSpec("malformed space parameter: " + item);
      }
    }
  }
  return spec;
}

inline FiniteMMSpace gen_space(const SpaceSpec& spec, std::uint64_t default_seed = 0) {
  auto get = [&](const std::string& key, double fallback, bool required = false) {
    auto it = spec.params.find(key);
    if (it != spec.params.end()) return it->second;
    if (required) throw BadSpec("space spec missing parameter " + key);
    return fallback;
  };
  const std::uint64_t seed = spec.has_seed ? spec.seed : default_seed;
  const std::string& g = spec.generator;
  if (g == "two_point") return gen_two_point();
  if (g == "circle_grid" || g == "circle")
    return gen_circle(static_cast<std::size_t>(get("N", 0, true)), get("r", 1.0));
  if (g == "hamming_cube" || g == "cube")
    return gen_cube(static_cast<std::size_t>(get("k", 0, true)));
  if (g == "sphere_sample" || g == "sphere") {
    const std::size_t n = static_cast<std::size_t>(get("n", 2));
    // radius given directly, or as the n^s scaling exponent
    double r = get("r", 1.0);
    auto s_it = spec.params.find("s");
    if (s_it != spec.params.end()) r = std::pow(static_cast<double>(n), s_it->second);
    return gen_sphere(n, r, static_cast<std::size_t>(get("N", 0, true)), seed).space;
  }
  if (g == "random_cloud" || g == "cloud")
    return gen_cloud(static_cast<std::size_t>(get("d", 2)),
                     static_cast<std::size_t>(get("N", 0, true)), seed);
  throw BadSpec("unknown space generator: " + g);
}

inline FiniteMMSpace gen_space(const std::string& text, std::uint64_t default_seed = 0) {
  return gen_space(parse_space_spec(text), default_seed);
}

inline std::string format_space_spec(const SpaceSpec& spec) {
  std::string out = spec.generator;
  char sep = ':';
  for (const auto& [key, val] : spec.params) {
    std::ostringstream v;
    v.precision(12);
    v << val;
    out += sep + key + '=' + v.str();
    sep = ',';
  }
  if (spec.has_seed) {
    out += sep;
    out += "seed=" + std::to_string(spec.seed);
  }
  return out;
}

}  // namespace mmc
