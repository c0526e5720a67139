#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mmc/barycenter.hpp"
#include "mmc/errors.hpp"
#include "mmc/maps.hpp"
#include "mmc/rng.hpp"
#include "mmc/screens.hpp"
#include "mmc/space.hpp"

namespace mmc {

enum class PdMode { Auto, Exact1D, Enumerate, BallEstimate };

namespace detail {

// Smallest width of a value window holding the target mass, atoms sorted.
inline double window_partial_diameter(const std::vector<std::pair<double, double>>& atoms,
                                      double target) {
  const std::size_t n = atoms.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + atoms[i].second;
  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < i) j = i;
    while (j < n && prefix[j + 1] - prefix[i] < target - tol::kMass) ++j;
    if (j == n) break;
    best = std::min(best, atoms[j].first - atoms[i].first);
  }
  if (!std::isfinite(best)) throw BadSpec("target mass exceeds total mass");
  return best;
}

struct PdEnumState {
  const PushforwardMeasure* nu;
  double target;
  double best;
  std::vector<std::size_t> chosen;
  std::vector<double> suffix;
};

inline void pd_enum_rec(PdEnumState& st, std::size_t idx, double mass, double diam) {
  if (diam >= st.best) return;
  if (mass >= st.target - tol::kMass) {
    st.best = diam;
    return;  // supersets only grow the diameter
  }
  if (idx >= st.nu->size()) return;
  if (mass + st.suffix[idx] < st.target - tol::kMass) return;
  // take idx
  double d2 = diam;
  for (std::size_t c : st.chosen)
    d2 = std::max(d2, screen_distance(*st.nu->screen, st.nu->atoms[idx], st.nu->atoms[c]));
  if (d2 < st.best) {
    st.chosen.push_back(idx);
    pd_enum_rec(st, idx + 1, mass + st.nu->weights[idx], d2);
    st.chosen.pop_back();
  }
  // skip idx
  pd_enum_rec(st, idx + 1, mass, diam);
}

inline double enum_partial_diameter(const PushforwardMeasure& nu, double target) {
  if (nu.size() > kPartialDiamEnumLimit)
    throw ModeUnavailable("subset enumeration limited to " +
                          std::to_string(kPartialDiamEnumLimit) + " atoms");
  PdEnumState st{&nu, target, std::numeric_limits<double>::infinity(), {}, {}};
  st.suffix.assign(nu.size() + 1, 0.0);
  for (std::size_t i = nu.size(); i > 0; --i)
    st.suffix[i - 1] = st.suffix[i] + nu.weights[i - 1];
  pd_enum_rec(st, 0, 0.0, 0.0);
  if (!std::isfinite(st.best)) throw BadSpec("target mass exceeds total mass");
  return st.best;
}

inline double ball_partial_diameter(const PushforwardMeasure& nu, double target,
                                    const std::vector<ScreenPoint>& extra_centers) {
  const std::size_t n = nu.size();
  std::vector<const ScreenPoint*> centers;
  centers.reserve(n + extra_centers.size());
  for (std::size_t i = 0; i < n; ++i) centers.push_back(&nu.atoms[i]);
  for (const auto& c : extra_centers) centers.push_back(&c);

  struct Cand {
    double radius;
    std::vector<std::size_t> captured;
  };
  std::vector<Cand> cands;
  for (const ScreenPoint* c : centers) {
    std::vector<std::pair<double, std::size_t>> byd(n);
    for (std::size_t i = 0; i < n; ++i)
      byd[i] = {screen_distance(*nu.screen, *c, nu.atoms[i]), i};
    std::sort(byd.begin(), byd.end());
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cum += nu.weights[byd[i].second];
      if (cum >= target - tol::kMass) {
        Cand cd{byd[i].first, {}};
        for (std::size_t k = 0; k <= i; ++k) cd.captured.push_back(byd[k].second);
        cands.push_back(std::move(cd));
        break;
      }
    }
  }
  if (cands.empty()) throw BadSpec("target mass exceeds total mass");
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.radius < b.radius; });
  // The captured set around the best few centers is measured directly, which
  // never loosens the bound below 2 radius.
  const std::size_t refine = (n <= 256) ? cands.size() : std::min<std::size_t>(cands.size(), 5);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < refine; ++c) {
    const auto& cap = cands[c].captured;
    double diam = 0.0;
    for (std::size_t a = 0; a < cap.size(); ++a)
      for (std::size_t b = a + 1; b < cap.size(); ++b)
        diam = std::max(diam, screen_distance(*nu.screen, nu.atoms[cap[a]], nu.atoms[cap[b]]));
    best = std::min(best, diam);
  }
  return best;
}

}  // namespace detail

struct TreeSplit {
  TreePoint point;
  double mass_a = 0.0;
  double mass_b = 0.0;
};

// Splitting point of a measure on a tree: both closed sides of the returned
// point carry at least a third of the mass, an atom sitting at the point
// counts for both sides. Found by subdividing at the atoms and walking toward
// any branch that still holds more than two thirds.
inline TreeSplit pre_levy_mean_tree(const PushforwardMeasure& nu) {
  const auto& tree0 = *std::get<TreeScreen>(*nu.screen).tree;
  const double m = nu.total_mass();
  if (m <= 0.0) throw EmptyMeasure("splitting point of a zero measure");
  std::vector<TreePoint> pts;
  pts.reserve(nu.size());
  for (const auto& a : nu.atoms) pts.push_back(as_tree_point(a));
  auto [tree, where] = tree0.subdivide(pts);
  std::vector<double> w(tree.vertex_count(), 0.0);
  for (std::size_t i = 0; i < nu.size(); ++i) w[where[i]] += nu.weights[i];

  const auto& adj = tree.adjacency();
  auto branch_mass = [&](int v, int into) {
    double s = 0.0;
    std::vector<int> stack{into};
    std::vector<char> seen(tree.vertex_count(), 0);
    seen[v] = 1;
    seen[into] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      s += w[x];
      for (const auto& [to, eid] : adj[x])
        if (!seen[to]) {
          seen[to] = 1;
          stack.push_back(to);
        }
    }
    return s;
  };

  int v = where[0];
  std::vector<char> visited(tree.vertex_count(), 0);
  while (true) {
    visited[v] = 1;
    int heavy = -1;
    double heavy_mass = 0.0;
    for (const auto& [to, eid] : adj[v]) {
      const double s = branch_mass(v, to);
      if (s > heavy_mass) {
        heavy_mass = s;
        heavy = to;
      }
    }
    if (heavy < 0 || heavy_mass <= 2.0 * m / 3.0 + tol::kMass || visited[heavy]) break;
    v = heavy;
  }

  // Assemble one side from whole branches at v, heaviest first.
  std::vector<double> branches;
  for (const auto& [to, eid] : adj[v]) branches.push_back(branch_mass(v, to));
  std::sort(branches.rbegin(), branches.rend());
  const TreePoint p = TreePoint::at_vertex(v);
  if (m - w[v] < m / 3.0 - tol::kMass) return {p, w[v], m};
  double cum = 0.0;
  for (double s : branches) {
    cum += s;
    if (cum + w[v] >= m / 3.0 - tol::kMass) break;
  }
  const double side_a = cum + w[v];
  const double side_b = m - cum;
  if (side_a < m / 3.0 - tol::kMass || side_b < m / 3.0 - tol::kMass)
    throw NoConvergence("tree splitting walk failed to balance thirds");
  // Map the subdivided vertex back: original vertices keep ids, new ones sit
  // on original edges, so report the point in the original tree.
  if (v < static_cast<int>(tree0.vertex_count())) return {p, side_a, side_b};
  // locate v among the inputs
  for (std::size_t i = 0; i < where.size(); ++i)
    if (where[i] == v) return {tree0.canonical(pts[i]), side_a, side_b};
  throw NoConvergence("tree splitting point lost during subdivision");
}

// Smallest diameter of a subset holding the target mass. Exact by a sliding
// window for measures on the line, exact by pruned subset enumeration for few
// atoms, and an upper bound from candidate balls otherwise. For tree screens
// the ball search also tries the splitting point above as a center.
inline PdMode resolve_pd_mode(const PushforwardMeasure& nu, PdMode mode) {
  if (mode != PdMode::Auto) return mode;
  if (std::holds_alternative<EuclideanScreen>(*nu.screen) && screen_dim(*nu.screen) == 1)
    return PdMode::Exact1D;
  if (nu.size() <= kPartialDiamEnumLimit) return PdMode::Enumerate;
  return PdMode::BallEstimate;
}

inline double partial_diameter(const PushforwardMeasure& nu, double target,
                               PdMode mode = PdMode::Auto) {
  const double m = nu.total_mass();
  if (target <= 0.0) return 0.0;
  if (target > m + tol::kMass) throw BadSpec("target mass exceeds total mass");
  const bool on_line =
      std::holds_alternative<EuclideanScreen>(*nu.screen) && screen_dim(*nu.screen) == 1;
  mode = resolve_pd_mode(nu, mode);
  switch (mode) {
    case PdMode::Exact1D:
      if (!on_line) throw ModeUnavailable("sorted window mode needs atoms on the line");
      return detail::window_partial_diameter(line_atoms(nu), target);
    case PdMode::Enumerate:
      return detail::enum_partial_diameter(nu, target);
    default: {
      std::vector<ScreenPoint> extra;
      if (is_tree_screen(*nu.screen)) extra.push_back(pre_levy_mean_tree(nu).point);
      return detail::ball_partial_diameter(nu, target, extra);
    }
  }
}

inline const char* pd_mode_name(PdMode m) {
  switch (m) {
    case PdMode::Exact1D:
      return "exact_1d";
    case PdMode::Enumerate:
      return "enumerate";
    case PdMode::BallEstimate:
      return "ball_estimate";
    default:
      return "auto";
  }
}

/// Interval of values that split a weighted value list into two halves: mass
/// at least m/2 sits at or below a, and at least m/2 at or above b. mid is
/// the midpoint of [a, b].
struct LevyMeanResult {
  double a = 0.0;
  double b = 0.0;
  double mid = 0.0;
};

inline LevyMeanResult levy_mean_of_values(std::vector<std::pair<double, double>> vw) {
  double m = 0.0;
  for (const auto& [v, w] : vw) m += w;
  if (m <= 0.0) throw EmptyMeasure("half-mass interval of a zero measure");
  std::sort(vw.begin(), vw.end());
  const double half = m / 2.0;
  double cum = 0.0;
  double a = vw.back().first;
  for (const auto& [v, w] : vw) {
    cum += w;
    if (cum >= half - tol::kMass) {
      a = v;
      break;
    }
  }
  cum = 0.0;
  double b = vw.front().first;
  for (auto it = vw.rbegin(); it != vw.rend(); ++it) {
    cum += it->second;
    if (cum >= half - tol::kMass) {
      b = it->first;
      break;
    }
  }
  return {a, b, 0.5 * (a + b)};
}

inline LevyMeanResult levy_mean(const FiniteMMSpace& X, const ScalarField& f) {
  if (f.values.size() != X.size()) throw BadSpec("field size mismatch");
  std::vector<std::pair<double, double>> vw;
  for (std::size_t i : X.support()) vw.push_back({f.values[i], X.weight(i)});
  return levy_mean_of_values(std::move(vw));
}

// Spread radius of one field: past it, the mass of points whose value strays
// from the half-mass midpoint by the radius or more stays within kappa.
inline double levy_radius_of_values(const std::vector<std::pair<double, double>>& vw,
                                    double kappa) {
  const LevyMeanResult lm = levy_mean_of_values(vw);
  std::vector<std::pair<double, double>> dev;
  dev.reserve(vw.size());
  for (const auto& [v, w] : vw) dev.push_back({std::abs(v - lm.mid), w});
  std::sort(dev.rbegin(), dev.rend());
  double cum = 0.0;
  for (const auto& [t, w] : dev) {
    cum += w;
    if (cum > kappa + tol::kMass) return t;
  }
  return 0.0;
}

inline double levy_radius(const FiniteMMSpace& X, double kappa,
                          const std::vector<ScalarField>& family, bool audit = true) {
  double best = 0.0;
  for (const ScalarField& f : family) {
    if (audit) require_lipschitz(X, f);
    std::vector<std::pair<double, double>> vw;
    for (std::size_t i : X.support()) vw.push_back({f.values[i], X.weight(i)});
    best = std::max(best, levy_radius_of_values(vw, kappa));
  }
  return best;
}

namespace detail {

struct AlphaState {
  const FiniteMMSpace* X;
  const std::vector<std::size_t>* sup;
  const std::vector<double>* rs;
  std::vector<double>* best;  // per r
  std::vector<double> suffix;
  double half;
};

inline void alpha_rec(AlphaState& st, std::size_t idx, double mass, std::vector<double>& mind) {
  if (mass >= st.half - tol::kMass) {
    // complement of the open neighborhood, per radius
    for (std::size_t k = 0; k < st.rs->size(); ++k) {
      const double r = (*st.rs)[k];
      double tail = 0.0;
      for (std::size_t y = 0; y < st.sup->size(); ++y)
        if (mind[y] >= r) tail += st.X->weight((*st.sup)[y]);
      if (tail > (*st.best)[k]) (*st.best)[k] = tail;
    }
    return;  // supersets only shrink the complement
  }
  if (idx >= st.sup->size()) return;
  if (mass + st.suffix[idx] < st.half - tol::kMass) return;
  // include point idx
  std::vector<double> mind2(mind);
  const std::size_t p = (*st.sup)[idx];
  for (std::size_t y = 0; y < st.sup->size(); ++y)
    mind2[y] = std::min(mind2[y], st.X->dist((*st.sup)[y], p));
  alpha_rec(st, idx + 1, mass + st.X->weight(p), mind2);
  // or leave it out
  alpha_rec(st, idx + 1, mass, mind);
}

}  // namespace detail

// Largest remote mass: max over subsets A of the support with mass(A) >=
// threshold of the mass outside the open r-neighborhood of A, per radius.
// Neighborhoods are open, so the boundary sphere still counts as remote.
// Exact; refuses supports beyond the enumeration limit.
inline std::vector<double> worst_remote_mass_profile(const FiniteMMSpace& X, double threshold,
                                                     const std::vector<double>& rs) {
  const auto& sup = X.support();
  if (sup.size() > kAlphaExactLimit)
    throw ModeUnavailable("exact remote-mass search limited to " +
                          std::to_string(kAlphaExactLimit) + " support points");
  for (double r : rs)
    if (!(r > 0.0)) throw BadSpec("neighborhood radius must be positive");
  std::vector<double> best(rs.size(), 0.0);
  detail::AlphaState st{&X, &sup, &rs, &best, {}, threshold};
  st.suffix.assign(sup.size() + 1, 0.0);
  for (std::size_t i = sup.size(); i > 0; --i)
    st.suffix[i - 1] = st.suffix[i] + X.weight(sup[i - 1]);
  std::vector<double> mind(sup.size(), std::numeric_limits<double>::infinity());
  detail::alpha_rec(st, 0, 0.0, mind);
  return best;
}

inline double worst_remote_mass(const FiniteMMSpace& X, double threshold, double r) {
  return worst_remote_mass_profile(X, threshold, {r})[0];
}

// Concentration profile: the half-mass case of the remote-mass search.
inline std::vector<double> concentration_profile_exact(const FiniteMMSpace& X,
                                                       const std::vector<double>& rs) {
  return worst_remote_mass_profile(X, X.total_mass() / 2.0, rs);
}

inline double concentration_exact(const FiniteMMSpace& X, double r) {
  return concentration_profile_exact(X, {r})[0];
}

// Lower estimate of the concentration function from candidate half-mass
// subsets: metric balls around every support point, prefixes of seeded
// shuffles, and sublevel sets of any fields supplied.
inline double concentration_estimate(const FiniteMMSpace& X, double r, std::uint64_t seed,
                                     const std::vector<ScalarField>& fields = {}) {
  if (!(r > 0.0)) throw BadSpec("concentration radius must be positive");
  const auto& sup = X.support();
  const double half = X.total_mass() / 2.0;
  double best = 0.0;
  auto eval = [&](const std::vector<std::size_t>& pts) {
    double mass = 0.0;
    for (std::size_t p : pts) mass += X.weight(p);
    if (mass < half - tol::kMass) return;
    double tail = 0.0;
    for (std::size_t y : sup) {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t p : pts) d = std::min(d, X.dist(y, p));
      if (d >= r) tail += X.weight(y);
    }
    best = std::max(best, tail);
  };
  for (std::size_t c : sup) {
    std::vector<std::pair<double, std::size_t>> byd;
    for (std::size_t y : sup) byd.push_back({X.dist(c, y), y});
    std::sort(byd.begin(), byd.end());
    double cum = 0.0;
    std::vector<std::size_t> ball;
    bool reached = false;
    for (const auto& [d, y] : byd) {
      ball.push_back(y);
      cum += X.weight(y);
      if (!reached && cum >= half - tol::kMass) {
        eval(ball);
        reached = true;
      } else if (reached) {
        eval(ball);
        if (ball.size() >= byd.size() || ball.size() > byd.size() / 2 + 2) break;
      }
    }
  }
  for (const ScalarField& f : fields) {
    std::vector<std::pair<double, std::size_t>> byv;
    for (std::size_t y : sup) byv.push_back({f.values[y], y});
    std::sort(byv.begin(), byv.end());
    double cum = 0.0;
    std::vector<std::size_t> lvl;
    for (const auto& [v, y] : byv) {
      lvl.push_back(y);
      cum += X.weight(y);
      if (cum >= half - tol::kMass) {
        eval(lvl);
        break;
      }
    }
  }
  Rng rng(seed ^ 0xa1fau);
  std::vector<std::size_t> perm(sup.begin(), sup.end());
  for (int trial = 0; trial < 32; ++trial) {
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[rng.index(i)]);
    double cum = 0.0;
    std::vector<std::size_t> pref;
    for (std::size_t y : perm) {
      pref.push_back(y);
      cum += X.weight(y);
      if (cum >= half - tol::kMass) {
        eval(pref);
        break;
      }
    }
  }
  return best;
}

namespace detail {

struct SepState {
  const FiniteMMSpace* X;
  const std::vector<std::size_t>* sup;
  double k0, k1;
  double best;
  double target;  // > 0 enables early exit at this level
  bool found;
  std::vector<double> suffix;
  std::vector<int> label;  // length of sup, -1 none, 0, 1
};

inline void sep_rec(SepState& st, std::size_t idx, double m0, double m1, int c0, int c1,
                    double mincross) {
  if (st.found) return;
  if (mincross <= st.best) return;  // labels only shrink the cross distance
  const double rem = st.suffix[idx];
  if (m0 + rem < st.k0 - tol::kMass || m1 + rem < st.k1 - tol::kMass) return;
  if (idx == st.sup->size()) {
    if (m0 >= st.k0 - tol::kMass && m1 >= st.k1 - tol::kMass && c0 > 0 && c1 > 0) {
      if (mincross > st.best) st.best = mincross;
      if (st.target > 0.0 && st.best >= st.target - tol::kInvariant) st.found = true;
    }
    return;
  }
  const std::size_t p = (*st.sup)[idx];
  const double w = st.X->weight(p);
  // assign to the first side
  double mc = mincross;
  for (std::size_t j = 0; j < idx; ++j)
    if (st.label[j] == 1) mc = std::min(mc, st.X->dist(p, (*st.sup)[j]));
  st.label[idx] = 0;
  sep_rec(st, idx + 1, m0 + w, m1, c0 + 1, c1, mc);
  // assign to the second side
  mc = mincross;
  for (std::size_t j = 0; j < idx; ++j)
    if (st.label[j] == 0) mc = std::min(mc, st.X->dist(p, (*st.sup)[j]));
  st.label[idx] = 1;
  sep_rec(st, idx + 1, m0, m1 + w, c0, c1 + 1, mc);
  // leave it unassigned
  st.label[idx] = -1;
  sep_rec(st, idx + 1, m0, m1, c0, c1, mincross);
}

}  // namespace detail

// Largest distance two disjointly chosen subsets of prescribed masses can
// keep between each other. Exact over all three-way labelings of the support.
// Infeasible thresholds give zero, matching the empty supremum convention.
inline double separation_exact(const FiniteMMSpace& X, double k0, double k1,
                               double early_exit_target = 0.0) {
  const auto& sup = X.support();
  if (sup.size() > kSeparationExactLimit)
    throw ModeUnavailable("exact separation limited to " +
                          std::to_string(kSeparationExactLimit) + " support points");
  if (k0 > X.total_mass() + tol::kMass || k1 > X.total_mass() + tol::kMass) return 0.0;
  detail::SepState st{&X,   &sup,  k0, k1, 0.0, early_exit_target, false, {},
                      std::vector<int>(sup.size(), -1)};
  st.suffix.assign(sup.size() + 1, 0.0);
  for (std::size_t i = sup.size(); i > 0; --i)
    st.suffix[i - 1] = st.suffix[i] + X.weight(sup[i - 1]);
  detail::sep_rec(st, 0, 0.0, 0.0, 0, 0, std::numeric_limits<double>::infinity());
  return st.best;
}

// Lower estimate for any number of thresholds: points within distance t of
// each other conflict, whole components of the conflict graph are dealt to
// the sides, and the largest workable t wins. Components can never split, so
// this only undershoots.
inline double separation_estimate(const FiniteMMSpace& X, const std::vector<double>& ks) {
  if (ks.size() < 2) throw BadSpec("separation needs at least two thresholds");
  const auto& sup = X.support();
  for (double k : ks)
    if (k > X.total_mass() + tol::kMass) return 0.0;

  std::vector<double> cand;
  for (std::size_t a = 0; a < sup.size(); ++a)
    for (std::size_t b = a + 1; b < sup.size(); ++b) cand.push_back(X.dist(sup[a], sup[b]));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  if (cand.size() > 128) {
    std::vector<double> thin;
    for (std::size_t i = 0; i < 128; ++i) thin.push_back(cand[i * (cand.size() - 1) / 127]);
    cand = std::move(thin);
  }

  std::vector<std::size_t> parent(sup.size());
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto feasible = [&](double t) {
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t a = 0; a < sup.size(); ++a)
      for (std::size_t b = a + 1; b < sup.size(); ++b)
        if (X.dist(sup[a], sup[b]) < t) parent[find(a)] = find(b);
    std::vector<double> comp_mass;
    std::vector<std::size_t> root_of(sup.size());
    std::vector<std::size_t> roots;
    for (std::size_t a = 0; a < sup.size(); ++a) {
      const std::size_t r = find(a);
      auto it = std::find(roots.begin(), roots.end(), r);
      if (it == roots.end()) {
        roots.push_back(r);
        comp_mass.push_back(0.0);
        it = roots.end() - 1;
      }
      comp_mass[it - roots.begin()] += X.weight(sup[a]);
    }
    // heaviest component first into the side with the most unmet need
    std::sort(comp_mass.rbegin(), comp_mass.rend());
    std::vector<double> need(ks.begin(), ks.end());
    for (double cm : comp_mass) {
      std::size_t arg = 0;
      for (std::size_t i = 1; i < need.size(); ++i)
        if (need[i] > need[arg]) arg = i;
      need[arg] -= cm;
    }
    for (double nd : need)
      if (nd > tol::kMass) return false;
    return true;
  };
  for (auto it = cand.rbegin(); it != cand.rend(); ++it)
    if (feasible(*it)) return *it;
  return 0.0;
}

// Spread of a map measured through p-th powers of pairwise image distances,
// weighted by the product measure. p = infinity degrades to the diameter of
// the image of the support.
inline double lp_variation_measure(const PushforwardMeasure& nu, double p) {
  if (std::isinf(p)) {
    double best = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i)
      for (std::size_t j = i + 1; j < nu.size(); ++j)
        best = std::max(best, screen_distance(*nu.screen, nu.atoms[i], nu.atoms[j]));
    return best;
  }
  if (!(p > 0.0)) throw BadSpec("variation exponent must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    for (std::size_t j = i + 1; j < nu.size(); ++j)
      s += 2.0 * nu.weights[i] * nu.weights[j] *
           std::pow(screen_distance(*nu.screen, nu.atoms[i], nu.atoms[j]), p);
  return std::pow(s, 1.0 / p);
}

inline double lp_variation(const FiniteMMSpace& X, const ScreenMap& f, double p) {
  return lp_variation_measure(pushforward(X, f), p);
}

inline double lp_variation(const FiniteMMSpace& X, const ScalarField& f, double p) {
  return lp_variation_measure(pushforward(X, f), p);
}

// Smallest radius of a closed ball around the barycenter holding the target
// mass.
inline double central_radius(const PushforwardMeasure& nu, double target) {
  if (target <= 0.0) return 0.0;
  if (target > nu.total_mass() + tol::kMass) throw BadSpec("target mass exceeds total mass");
  const BarycenterResult b = barycenter(nu);
  std::vector<std::pair<double, double>> byd;
  for (std::size_t i = 0; i < nu.size(); ++i)
    byd.push_back({screen_distance(*nu.screen, b.point, nu.atoms[i]), nu.weights[i]});
  std::sort(byd.begin(), byd.end());
  double cum = 0.0;
  for (const auto& [d, w] : byd) {
    cum += w;
    if (cum >= target - tol::kMass) return d;
  }
  return byd.back().first;
}

/// Supremum of a per-map observable over a family of 1-Lipschitz maps.
struct FamilySup {
  double value = 0.0;
  std::size_t best_map = 0;
  std::vector<double> per_map;
};

template <typename PerMap>
FamilySup family_sup(const std::vector<ScreenMap>& family, PerMap&& per_map) {
  if (family.empty()) throw BadSpec("empty candidate family");
  FamilySup out;
  out.per_map.reserve(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double v = per_map(family[i]);
    out.per_map.push_back(v);
    if (v > out.value || i == 0) {
      out.value = v;
      out.best_map = i;
    }
  }
  return out;
}

// Observable diameter relative to a family: the largest partial diameter any
// family member's image measure shows at mass m - kappa. A candidate family
// can only undershoot the supremum over all 1-Lipschitz maps, so reports
// carry the lower_estimate mode.
inline FamilySup obs_diameter(const FiniteMMSpace& X, double kappa,
                              const std::vector<ScreenMap>& family, PdMode mode = PdMode::Auto,
                              bool audit = false) {
  const double target = X.total_mass() - kappa;
  return family_sup(family, [&](const ScreenMap& f) {
    if (audit) require_lipschitz(X, f);
    return partial_diameter(pushforward(X, f), target, mode);
  });
}

inline FamilySup obs_lp_variation(const FiniteMMSpace& X, double p,
                                  const std::vector<ScreenMap>& family, bool audit = false) {
  return family_sup(family, [&](const ScreenMap& f) {
    if (audit) require_lipschitz(X, f);
    return lp_variation(X, f, p);
  });
}

inline FamilySup obs_central_radius(const FiniteMMSpace& X, double kappa,
                                    const std::vector<ScreenMap>& family, bool audit = false) {
  const double target = X.total_mass() - kappa;
  return family_sup(family, [&](const ScreenMap& f) {
    if (audit) require_lipschitz(X, f);
    return central_radius(pushforward(X, f), target);
  });
}

}  // namespace mmc
