#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmc/barycenter.hpp"
#include "mmc/generators.hpp"
#include "mmc/observables.hpp"
#include "mmc/space.hpp"

namespace mmc {

/// One verified inequality. margin is how far inside the inequality the
/// computed numbers sit, so pass means margin >= -tolerance.
struct CheckResult {
  std::string id;
  std::string statement;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = tol::kInvariant;
  bool pass = false;

  nlohmann::json to_json() const {
    return nlohmann::json{{"id", id},     {"statement", statement},
                          {"lhs", lhs},   {"rhs", rhs},
                          {"margin", margin}, {"tolerance", tolerance},
                          {"pass", pass}};
  }
};

// lhs <= rhs expected.
inline CheckResult check_le(std::string id, std::string statement, double lhs, double rhs,
                            double tolerance = tol::kInvariant) {
  CheckResult c{std::move(id), std::move(statement), lhs, rhs, rhs - lhs, tolerance, false};
  c.pass = c.margin >= -tolerance;
  return c;
}

// got == want expected.
inline CheckResult check_eq(std::string id, std::string statement, double got, double want,
                            double tolerance = tol::kInvariant) {
  CheckResult c{std::move(id), std::move(statement), got, want, -std::abs(got - want),
                tolerance, false};
  c.pass = c.margin >= -tolerance;
  return c;
}

struct VerifySuite {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void add(std::vector<CheckResult> cs) {
    for (auto& c : cs) checks.push_back(std::move(c));
  }
  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    return nlohmann::json{{"checks", arr}, {"all_pass", all_pass()}};
  }
};

// The exact-small scalar family: signed distance fields to points plus
// distance fields to minimal half-mass subsets. Rich enough to realize the
// two-sided comparisons between spread radius and observable diameter.
inline ScalarFamily exact_small_family(const FiniteMMSpace& X) {
  ScalarFamily fam = fields_distance(X);
  ScalarFamily half = fields_halfmass(X);
  for (auto& f : half.fields) fam.fields.push_back(std::move(f));
  fam.description = "signed point distances and minimal half-mass set distances";
  return fam;
}

inline std::vector<ScreenMap> as_line_maps(const ScalarFamily& fam) {
  std::vector<ScreenMap> maps;
  maps.reserve(fam.fields.size());
  for (const auto& f : fam.fields) maps.push_back(field_as_map(f));
  return maps;
}

// Distinct positive distances of the support, ascending.
inline std::vector<double> support_distances(const FiniteMMSpace& X) {
  std::vector<double> rs;
  const auto& sup = X.support();
  for (std::size_t a = 0; a < sup.size(); ++a)
    for (std::size_t b = a + 1; b < sup.size(); ++b) {
      const double d = X.dist(sup[a], sup[b]);
      if (d > 0.0) rs.push_back(d);
    }
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-12; }),
           rs.end());
  return rs;
}

// Two-sided comparison of the family spread radius against the family
// observable diameter on the line, which must sandwich each other at every
// mass defect 0 < kappa < m/2.
inline std::vector<CheckResult> checks_sandwich(const FiniteMMSpace& X,
                                                const std::vector<double>& kappas) {
  std::vector<CheckResult> out;
  const ScalarFamily fam = exact_small_family(X);
  const auto maps = as_line_maps(fam);
  std::vector<ScalarField> fields = fam.fields;
  const double half = X.total_mass() / 2.0;
  for (double kappa : kappas) {
    if (!(kappa > 0.0) || !(kappa < half)) continue;
    const double lerad = levy_radius(X, kappa, fields, false);
    const double od = obs_diameter(X, kappa, maps).value;
    out.push_back(check_le("sandwich_lower:k=" + std::to_string(kappa),
                           "spread radius <= observable diameter on the line", lerad, od));
    out.push_back(check_le("sandwich_upper:k=" + std::to_string(kappa),
                           "observable diameter on the line <= 2 spread radius", od,
                           2.0 * lerad));
  }
  return out;
}

// Concentration controls the spread radius: at mass defect twice the
// concentration value the radius stays within the chosen distance, and
// conversely doubling the radius caps the concentration at the defect.
inline std::vector<CheckResult> checks_alpha_radius(const FiniteMMSpace& X,
                                                    const std::vector<double>& kappas) {
  std::vector<CheckResult> out;
  const ScalarFamily fam = exact_small_family(X);
  const std::vector<double> rs = support_distances(X);
  if (rs.empty()) return out;
  const std::vector<double> alphas = concentration_profile_exact(X, rs);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double lr = levy_radius(X, 2.0 * alphas[i], fam.fields, false);
    out.push_back(check_le("radius_from_alpha:r=" + std::to_string(rs[i]),
                           "spread radius at defect 2 alpha(r) stays within r", lr, rs[i]));
  }
  const double half = X.total_mass() / 2.0;
  for (double kappa : kappas) {
    if (!(kappa > 0.0) || !(kappa < half)) continue;
    const double lr = levy_radius(X, kappa, fam.fields, false);
    if (lr <= 0.0) continue;
    // The radius is an infimum that finite spaces do not attain, so the
    // valid statement is the limit from above; the nudge matches the check
    // tolerance and is invisible away from exact distance values.
    const double a = concentration_exact(X, 2.0 * lr + tol::kInvariant);
    out.push_back(check_le("alpha_from_radius:k=" + std::to_string(kappa),
                           "alpha just beyond twice the spread radius stays within the defect",
                           a, kappa));
  }
  return out;
}

// A positive concentration value at r forces two well separated subsets:
// half the mass against alpha(r) at mutual distance r.
inline std::vector<CheckResult> checks_separation_from_alpha(const FiniteMMSpace& X) {
  std::vector<CheckResult> out;
  const std::vector<double> rs = support_distances(X);
  if (rs.empty()) return out;
  const std::vector<double> alphas = concentration_profile_exact(X, rs);
  const double m = X.total_mass();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (alphas[i] <= 0.0) continue;
    const double sep = separation_exact(X, m / 2.0, alphas[i], rs[i]);
    out.push_back(check_le("separation_from_alpha:r=" + std::to_string(rs[i]),
                           "subsets of masses (m/2, alpha(r)) reach distance r", rs[i], sep));
  }
  return out;
}

// Remote mass decay under neighborhood growth: any subset holding mass kappa
// with alpha(r0) < kappa leaves at most alpha(r) outside its (r0 + r)
// neighborhood.
inline std::vector<CheckResult> checks_neighborhood_decay(const FiniteMMSpace& X) {
  std::vector<CheckResult> out;
  const std::vector<double> rs = support_distances(X);
  if (rs.size() < 2) return out;
  const std::vector<double> alphas = concentration_profile_exact(X, rs);
  const double m = X.total_mass();
  int made = 0;
  for (std::size_t i = 0; i < rs.size() && made < 3; ++i) {
    const double kappa = alphas[i] + 0.1 * m;
    if (!(alphas[i] < kappa) || kappa > m) continue;
    for (std::size_t j = 0; j < rs.size() && made < 3; j += std::max<std::size_t>(1, rs.size() / 2)) {
      const double worst = worst_remote_mass(X, kappa, rs[i] + rs[j]);
      out.push_back(check_le(
          "neighborhood_decay:r0=" + std::to_string(rs[i]) + ",r=" + std::to_string(rs[j]),
          "mass beyond the grown open neighborhood stays within alpha of the growth", worst,
          alphas[j]));
      ++made;
    }
  }
  return out;
}

// Separation never grows under a 1-Lipschitz map.
inline std::vector<CheckResult> checks_separation_monotone(const FiniteMMSpace& X,
                                                           const std::vector<ScreenMap>& maps) {
  std::vector<CheckResult> out;
  const double m = X.total_mass();
  const double src = separation_exact(X, m / 3.0, m / 4.0);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const FiniteMMSpace img = space_from_pushforward(pushforward(X, maps[i]));
    const double dst = separation_exact(img, m / 3.0, m / 4.0);
    out.push_back(check_le("separation_monotone:" + maps[i].name,
                           "separation of the image measure stays within the source", dst,
                           src));
  }
  return out;
}

// Variation controls: partial diameter against the p-variation both ways,
// and the p-variation ladder in p.
inline std::vector<CheckResult> checks_variation(const FiniteMMSpace& X,
                                                 const std::vector<ScreenMap>& maps,
                                                 const std::vector<double>& ps,
                                                 const std::vector<double>& kappas) {
  std::vector<CheckResult> out;
  const double m = X.total_mass();
  const double diam = X.diameter();
  for (const ScreenMap& f : maps) {
    const PushforwardMeasure nu = pushforward(X, f);
    for (double p : ps) {
      const double vp = lp_variation_measure(nu, p);
      for (double kappa : kappas) {
        if (kappa <= 0.0 || kappa >= m) continue;
        const double pd = partial_diameter(nu, m - kappa, PdMode::Enumerate);
        const double bound = std::isinf(p) ? 2.0 * vp : 2.0 * std::pow(kappa * m, -1.0 / p) * vp;
        out.push_back(check_le("pd_from_variation:" + f.name + ":p=" + std::to_string(p) +
                                   ":k=" + std::to_string(kappa),
                               "partial diameter <= 2 (kappa m)^(-1/p) p-variation", pd, bound));
      }
      if (!std::isinf(p) && diam > 0.0) {
        for (double frac : {0.1, 0.3}) {
          const double kp = frac * m * std::pow(diam, p);
          const double pd = partial_diameter(nu, m - kp / std::pow(diam, p), PdMode::Enumerate);
          const double rhs = m * m * std::pow(pd, p) + (2.0 * m - kp / std::pow(diam, p)) * kp;
          out.push_back(check_le("variation_from_pd:" + f.name + ":p=" + std::to_string(p) +
                                     ":f=" + std::to_string(frac),
                                 "p-variation^p <= m^2 pd^p + remote pair mass term",
                                 std::pow(vp, p), rhs));
        }
      }
    }
    for (std::size_t a = 0; a < ps.size(); ++a)
      for (std::size_t b = a + 1; b < ps.size(); ++b) {
        const double p = ps[a], q = ps[b];
        if (std::isinf(p)) continue;
        const double vp = lp_variation_measure(nu, p);
        const double vq = lp_variation_measure(nu, q);
        const double factor =
            std::isinf(q) ? std::pow(m * m, 1.0 / p) : std::pow(m * m, 1.0 / p - 1.0 / q);
        out.push_back(check_le("variation_ladder:" + f.name + ":p=" + std::to_string(p) +
                                   ":q=" + std::to_string(q),
                               "p-variation <= (m^2)^(1/p - 1/q) q-variation", vp,
                               factor * vq));
      }
  }
  return out;
}

// Central radius controls: ball around the barycenter versus partial
// diameter and variation.
inline std::vector<CheckResult> checks_central_radius(const FiniteMMSpace& X,
                                                      const std::vector<ScreenMap>& maps,
                                                      const std::vector<double>& kappas) {
  std::vector<CheckResult> out;
  const double m = X.total_mass();
  const double diam = X.diameter();
  for (const ScreenMap& f : maps) {
    const PushforwardMeasure nu = pushforward(X, f);
    const bool euclid = std::holds_alternative<EuclideanScreen>(*nu.screen);
    for (double kappa : kappas) {
      if (kappa <= 0.0 || kappa >= m) continue;
      const double crad = central_radius(nu, m - kappa);
      const double pd = partial_diameter(nu, m - kappa,
                                         nu.size() <= kPartialDiamEnumLimit
                                             ? PdMode::Enumerate
                                             : PdMode::BallEstimate);
      out.push_back(check_le("pd_from_crad:" + f.name + ":k=" + std::to_string(kappa),
                             "partial diameter <= 2 central radius", pd, 2.0 * crad));
      if (euclid && nu.size() <= kPartialDiamEnumLimit) {
        out.push_back(check_le("crad_from_pd:" + f.name + ":k=" + std::to_string(kappa),
                               "central radius <= partial diameter + (kappa/m) diameter",
                               crad, pd + (kappa / m) * diam));
      }
      for (double p : {1.0, 2.0}) {
        const double vp = lp_variation_measure(nu, p);
        out.push_back(check_le("crad_from_variation:" + f.name + ":p=" + std::to_string(p) +
                                   ":k=" + std::to_string(kappa),
                               "central radius <= p-variation / (m kappa)^(1/p)", crad,
                               vp / std::pow(m * kappa, 1.0 / p)));
      }
      const double v2 = lp_variation_measure(nu, 2.0);
      out.push_back(check_le("crad_from_v2:" + f.name + ":k=" + std::to_string(kappa),
                             "central radius <= 2-variation / sqrt(2 m kappa)", crad,
                             v2 / std::sqrt(2.0 * m * kappa)));
    }
  }
  return out;
}

// Recentering through the barycenter log: the tangent image loses at most a
// factor two of p-variation, a factor sqrt(2) at p = 2.
inline std::vector<CheckResult> checks_recentering(const FiniteMMSpace& X,
                                                   const std::vector<ScreenMap>& maps,
                                                   const std::vector<double>& ps) {
  std::vector<CheckResult> out;
  for (const ScreenMap& f : maps) {
    const auto* h = std::get_if<HyperbolicScreen>(&*f.screen);
    if (!h) continue;
    const PushforwardMeasure nu = pushforward(X, f);
    const Vec z = as_vec(hyperbolic_barycenter(nu, h->kappa1).point);
    ScreenMap f0;
    f0.screen = std::make_shared<Screen>(EuclideanScreen{h->dim});
    f0.name = "log_recentred:" + f.name;
    for (const ScreenPoint& y : f.image) f0.image.push_back(hyp_log(h->kappa1, z, as_vec(y)));
    const double L = lipschitz_constant(X, f0);
    out.push_back(check_le("recentering_lipschitz:" + f.name,
                           "log at the barycenter keeps the map 1-Lipschitz", L, 1.0,
                           tol::kLipschitz));
    for (double p : ps) {
      const double vf = lp_variation(X, f, p);
      const double v0 = lp_variation(X, f0, p);
      out.push_back(check_le("recentering_variation:" + f.name + ":p=" + std::to_string(p),
                             "p-variation <= 2 p-variation of the recentred tangent map", vf,
                             2.0 * v0));
    }
    const double v2f = lp_variation(X, f, 2.0);
    const double v20 = lp_variation(X, f0, 2.0);
    out.push_back(check_le("recentering_v2:" + f.name,
                           "2-variation <= sqrt(2) 2-variation of the recentred map", v2f,
                           std::sqrt(2.0) * v20));
  }
  return out;
}

// Product of k fields scaled by 1/sqrt(k): the partial diameter at combined
// defect stays within sqrt(k) of the worst single field.
inline std::vector<CheckResult> checks_product_map(const FiniteMMSpace& X, std::size_t k,
                                                   double kappa, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const double m = X.total_mass();
  if (k * kappa >= m) return out;
  Rng rng(seed ^ 0x70726f64u);
  const auto& sup = X.support();
  std::vector<std::size_t> anchors(k);
  for (auto& a : anchors) a = sup[rng.index(sup.size())];
  ScreenMap F;
  F.screen = std::make_shared<Screen>(EuclideanScreen{k});
  F.name = "product";
  const double inv = 1.0 / std::sqrt(static_cast<double>(k));
  for (std::size_t x = 0; x < X.size(); ++x) {
    Vec v(k);
    for (std::size_t j = 0; j < k; ++j) v[j] = X.dist(x, anchors[j]) * inv;
    F.image.push_back(std::move(v));
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    ScalarField f;
    f.values = X.row(anchors[j]);
    worst = std::max(worst, partial_diameter(pushforward(X, f), m - kappa, PdMode::Exact1D));
  }
  const double pdF =
      partial_diameter(pushforward(X, F), m - static_cast<double>(k) * kappa, PdMode::Enumerate);
  out.push_back(check_le("product_map:k=" + std::to_string(k),
                         "product map partial diameter <= sqrt(k) worst coordinate", pdF,
                         std::sqrt(static_cast<double>(k)) * worst));
  return out;
}

// On tree screens the partial diameter is controlled by separation in the
// source: a ball around the splitting point of the image catches the mass.
inline std::vector<CheckResult> checks_tree_diameter(const FiniteMMSpace& X,
                                                     const std::vector<ScreenMap>& maps,
                                                     const std::vector<double>& kappas) {
  std::vector<CheckResult> out;
  const double m = X.total_mass();
  for (double kappa : kappas) {
    if (kappa <= 0.0 || kappa >= m) continue;
    const double sep = separation_exact(X, m / 3.0, kappa / 2.0);
    for (const ScreenMap& f : maps) {
      const double pd =
          partial_diameter(pushforward(X, f), m - kappa, PdMode::BallEstimate);
      out.push_back(check_le("tree_partial_diameter:" + f.name + ":k=" + std::to_string(kappa),
                             "tree image partial diameter <= 2 separation(m/3, kappa/2)", pd,
                             2.0 * sep));
    }
  }
  return out;
}

// Variance at the barycenter: within half the pair energy on nonpositively
// curved screens, and within the Jensen bound for every exponent p >= 1.
inline std::vector<CheckResult> checks_variance(const FiniteMMSpace& X,
                                                const std::vector<ScreenMap>& maps) {
  std::vector<CheckResult> out;
  for (const ScreenMap& f : maps) {
    const PushforwardMeasure nu = pushforward(X, f);
    const VariancePair cat = variance_cat0(nu);
    out.push_back(check_le("variance_cat0:" + f.name,
                           "inf variance <= pair energy / 2m on a nonpositively curved screen",
                           cat.lhs, cat.rhs));
    for (double p : {1.0, 2.0, 3.0}) {
      const VariancePair jen = variance_jensen(nu, p);
      out.push_back(check_le("variance_jensen:" + f.name + ":p=" + std::to_string(p),
                             "barycenter p-energy <= pair p-energy / m", jen.lhs, jen.rhs));
    }
  }
  return out;
}

// The standard battery for a single space: every inequality that exact
// modes can certify, over deterministic seeded map families.
inline VerifySuite run_verify_battery(const FiniteMMSpace& X, std::uint64_t seed) {
  VerifySuite suite;
  const double m = X.total_mass();
  const std::vector<double> kappas{0.1 * m, 0.2 * m, 0.3 * m, 0.45 * m};
  const std::vector<double> small_kappas{0.2 * m, 0.4 * m};

  suite.add(checks_sandwich(X, kappas));
  suite.add(checks_alpha_radius(X, kappas));
  suite.add(checks_separation_from_alpha(X));
  suite.add(checks_neighborhood_decay(X));

  MapFamily md = maps_multi_distance(X, 2, 3, seed);
  suite.add(checks_separation_monotone(X, md.maps));

  std::vector<ScreenMap> line_maps;
  {
    ScalarFamily dist = fields_distance(X);
    std::size_t take = std::min<std::size_t>(4, dist.fields.size());
    for (std::size_t i = 0; i < take; ++i) line_maps.push_back(field_as_map(dist.fields[i]));
  }
  const std::vector<double> ps{0.5, 1.0, 2.0, std::numeric_limits<double>::infinity()};
  suite.add(checks_variation(X, line_maps, ps, small_kappas));

  std::vector<ScreenMap> cat0_maps = line_maps;
  for (auto& f : md.maps) cat0_maps.push_back(f);
  suite.add(checks_central_radius(X, cat0_maps, small_kappas));
  suite.add(checks_variance(X, cat0_maps));

  {
    auto screen = std::make_shared<Screen>(HyperbolicScreen{2, -1.0});
    ScalarFamily dist = fields_distance(X);
    if (!dist.fields.empty()) {
      MapFamily geo = maps_geodesic(X, screen, {dist.fields[0]});
      suite.add(checks_recentering(X, geo.maps, {1.0, 2.0, 3.0}));
    }
  }

  suite.add(checks_product_map(X, 3, 0.1 * m, seed));

  if (X.support().size() >= 2) {
    auto tree = std::make_shared<const MetricTree>(gen_random_tree(5, seed ^ 0x74726565u));
    auto screen = std::make_shared<Screen>(TreeScreen{tree});
    ScalarFamily dist = fields_distance(X);
    MapFamily geo = maps_geodesic(X, screen, {dist.fields[0]});
    suite.add(checks_tree_diameter(X, geo.maps, small_kappas));
  }
  return suite;
}

}  // namespace mmc
