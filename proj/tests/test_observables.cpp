#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "mmc/generators.hpp"
#include "mmc/observables.hpp"
#include "mmc/verify.hpp"

using namespace mmc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PushforwardMeasure line_measure(std::vector<double> xs, std::vector<double> ws) {
  PushforwardMeasure nu;
  nu.screen = std::make_shared<Screen>(EuclideanScreen{1});
  for (double x : xs) nu.atoms.push_back(Vec{x});
  nu.weights = std::move(ws);
  return nu;
}

ScalarField field_of(std::vector<double> values, std::string name = "f") {
  return ScalarField{std::move(values), std::move(name)};
}

// Exhaustive reference: smallest diameter over atom subsets of enough mass.
double brute_partial_diameter(const PushforwardMeasure& nu, double target) {
  if (target <= 0.0) return 0.0;
  const std::size_t n = nu.size();
  double best = kInf;
  for (std::size_t bits = 1; bits < (1u << n); ++bits) {
    double mass = 0.0, diam = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(bits & (1u << i))) continue;
      mass += nu.weights[i];
      for (std::size_t j = i + 1; j < n; ++j)
        if (bits & (1u << j))
          diam = std::max(diam, screen_distance(*nu.screen, nu.atoms[i], nu.atoms[j]));
    }
    if (mass >= target - tol::kMass) best = std::min(best, diam);
  }
  return best == kInf ? 0.0 : best;
}

// Exhaustive reference for the concentration function with open neighborhoods.
double brute_alpha(const FiniteMMSpace& X, double r) {
  const auto& sup = X.support();
  const double half = X.total_mass() / 2.0;
  double best = 0.0;
  for (std::size_t bits = 1; bits < (1u << sup.size()); ++bits) {
    SubsetMask A = SubsetMask::of(X.size());
    for (std::size_t i = 0; i < sup.size(); ++i)
      if (bits & (1u << i)) A.member[sup[i]] = 1;
    if (subset_mass(X, A) < half - tol::kMass) continue;
    double remote = 0.0;
    for (std::size_t y : sup)
      if (distance_to_subset(X, y, A) >= r) remote += X.weight(y);
    best = std::max(best, remote);
  }
  return best;
}

// Exhaustive reference for two-threshold separation over label assignments.
double brute_separation(const FiniteMMSpace& X, double k0, double k1) {
  const auto& sup = X.support();
  if (k0 > X.total_mass() + tol::kMass || k1 > X.total_mass() + tol::kMass) return 0.0;
  std::vector<int> label(sup.size(), -1);
  double best = 0.0;
  auto rec = [&](auto&& self, std::size_t idx) -> void {
    if (idx == sup.size()) {
      double m0 = 0.0, m1 = 0.0;
      double cross = kInf;
      for (std::size_t i = 0; i < sup.size(); ++i) {
        if (label[i] == 0) m0 += X.weight(sup[i]);
        if (label[i] == 1) m1 += X.weight(sup[i]);
      }
      if (m0 < k0 - tol::kMass || m1 < k1 - tol::kMass) return;
      for (std::size_t i = 0; i < sup.size(); ++i)
        for (std::size_t j = 0; j < sup.size(); ++j)
          if (label[i] == 0 && label[j] == 1)
            cross = std::min(cross, X.dist(sup[i], sup[j]));
      if (cross < kInf) best = std::max(best, cross);
      return;
    }
    for (int l : {-1, 0, 1}) {
      label[idx] = l;
      self(self, idx + 1);
    }
    label[idx] = -1;
  };
  rec(rec, 0);
  return best;
}

// Reference for the spread radius straight from its definition as an infimum.
double brute_levy_radius(const std::vector<std::pair<double, double>>& vw, double kappa) {
  const LevyMeanResult lm = levy_mean_of_values(vw);
  std::vector<double> devs{0.0};
  for (const auto& [v, w] : vw) devs.push_back(std::abs(v - lm.mid));
  std::sort(devs.begin(), devs.end());
  for (double rho : devs) {
    double strictly_beyond = 0.0;
    for (const auto& [v, w] : vw)
      if (std::abs(v - lm.mid) > rho + tol::kMass) strictly_beyond += w;
    if (strictly_beyond <= kappa + tol::kMass) return rho;
  }
  return devs.back();
}

}  // namespace

TEST_CASE("partial diameter pinned values", "[observables]") {
  const PushforwardMeasure nu = line_measure({0.0, 1.0}, {0.5, 0.5});
  REQUIRE(partial_diameter(nu, 0.6, PdMode::Enumerate) == 1.0);
  REQUIRE(partial_diameter(nu, 0.5, PdMode::Enumerate) == 0.0);
  REQUIRE(partial_diameter(nu, 0.0, PdMode::Enumerate) == 0.0);
  REQUIRE(partial_diameter(nu, -0.3, PdMode::Exact1D) == 0.0);
  REQUIRE(partial_diameter(nu, 0.6, PdMode::Exact1D) == 1.0);
}

TEST_CASE("partial diameter modes agree with brute force", "[observables]") {
  Rng rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> xs, ws;
    const std::size_t n = 2 + rng.index(8);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(rng.uniform(0.0, 3.0));
      ws.push_back(rng.uniform(0.1, 1.0));
    }
    const PushforwardMeasure nu = line_measure(xs, ws);
    const double target = rng.uniform(0.0, nu.total_mass());
    const double brute = brute_partial_diameter(nu, target);
    REQUIRE_THAT(partial_diameter(nu, target, PdMode::Enumerate),
                 Catch::Matchers::WithinAbs(brute, 1e-12));
    REQUIRE_THAT(partial_diameter(nu, target, PdMode::Exact1D),
                 Catch::Matchers::WithinAbs(brute, 1e-12));
    REQUIRE(partial_diameter(nu, target, PdMode::BallEstimate) >= brute - 1e-12);
  }
}

TEST_CASE("partial diameter enumeration cap", "[observables]") {
  std::vector<double> xs(kPartialDiamEnumLimit + 1), ws(kPartialDiamEnumLimit + 1, 1.0);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  const PushforwardMeasure nu = line_measure(xs, ws);
  REQUIRE_THROWS_AS(partial_diameter(nu, 3.0, PdMode::Enumerate), ModeUnavailable);
  REQUIRE_NOTHROW(partial_diameter(nu, 3.0, PdMode::Auto));
}

TEST_CASE("half mass interval pinned values", "[observables]") {
  const FiniteMMSpace two = gen_two_point();
  const LevyMeanResult lm = levy_mean(two, field_of({0.0, 1.0}));
  REQUIRE(lm.a == 0.0);
  REQUIRE(lm.b == 1.0);
  REQUIRE(lm.mid == 0.5);

  const LevyMeanResult c = levy_mean(two, field_of({2.5, 2.5}));
  REQUIRE(c.a == 2.5);
  REQUIRE(c.b == 2.5);
  REQUIRE(c.mid == 2.5);

  const FiniteMMSpace line({"a", "b", "c"}, {0, 1, 2, 1, 0, 1, 2, 1, 0},
                           {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const LevyMeanResult tri = levy_mean(line, field_of({0.0, 1.0, 2.0}));
  REQUIRE(tri.a == 1.0);
  REQUIRE(tri.b == 1.0);
  REQUIRE(tri.mid == 1.0);
  REQUIRE_THROWS_AS(levy_mean(line, field_of({0.0, 1.0})), BadSpec);
}

TEST_CASE("half mass interval endpoints are ordered", "[observables]") {
  Rng rng(62);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<double, double>> vw;
    const std::size_t n = 1 + rng.index(9);
    for (std::size_t i = 0; i < n; ++i) vw.push_back({rng.uniform(-2.0, 2.0), rng.uniform(0.05, 1.0)});
    const LevyMeanResult lm = levy_mean_of_values(vw);
    REQUIRE(lm.a <= lm.b);
    REQUIRE(lm.mid == 0.5 * (lm.a + lm.b));
  }
}

TEST_CASE("spread radius pinned values", "[observables]") {
  const FiniteMMSpace two = gen_two_point();
  const ScalarField d1 = field_of(two.row(0), "d1");
  REQUIRE(levy_radius(two, 0.4, {d1}) == 0.5);
  REQUIRE(levy_radius(two, 1.5, {d1}) == 0.0);  // threshold at least the mass
  const FiniteMMSpace single({"x"}, {0}, {1});
  REQUIRE(levy_radius(single, 0.2, {field_of({0.0})}) == 0.0);
  REQUIRE_THROWS_AS(levy_radius(two, 0.4, {field_of({0.0, 2.0}, "steep")}),
                    FamilyNotLipschitz);
}

TEST_CASE("spread radius matches the infimum definition", "[observables]") {
  Rng rng(63);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> vw;
    const std::size_t n = 1 + rng.index(8);
    for (std::size_t i = 0; i < n; ++i) {
      // Duplicated values exercise tie handling.
      const double v = std::round(rng.uniform(-4.0, 4.0) * 4.0) / 4.0;
      vw.push_back({v, rng.uniform(0.1, 1.0)});
    }
    double mass = 0.0;
    for (const auto& [v, w] : vw) mass += w;
    const double kappa = rng.uniform(0.01, mass);
    REQUIRE_THAT(levy_radius_of_values(vw, kappa),
                 Catch::Matchers::WithinAbs(brute_levy_radius(vw, kappa), 1e-12));
  }
}

TEST_CASE("concentration function pinned values", "[observables]") {
  const FiniteMMSpace two = gen_two_point();
  REQUIRE(concentration_exact(two, 0.5) == 0.5);
  // The neighborhood is open, so at the full distance the far point still counts.
  REQUIRE(concentration_exact(two, 1.0) == 0.5);
  REQUIRE(concentration_exact(two, 1.0 + 1e-9) == 0.0);
  const FiniteMMSpace single({"x"}, {0}, {1});
  REQUIRE(concentration_exact(single, 0.7) == 0.0);
}

TEST_CASE("concentration function against brute force", "[observables]") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const FiniteMMSpace X = gen_cloud(2, 8, seed);
    for (double r : {0.1, 0.25, 0.5, 0.9}) {
      REQUIRE_THAT(concentration_exact(X, r), Catch::Matchers::WithinAbs(brute_alpha(X, r), 1e-12));
      REQUIRE(concentration_estimate(X, r, seed) <= concentration_exact(X, r) + 1e-12);
    }
  }
}

TEST_CASE("concentration bounds and limits", "[observables]") {
  const FiniteMMSpace X = gen_cloud(2, 10, 9);
  for (double r : {0.2, 0.6})
    REQUIRE(concentration_exact(X, r) <= X.total_mass() / 2.0 + tol::kMass);
  const FiniteMMSpace big = gen_cloud(2, kAlphaExactLimit + 1, 10);
  REQUIRE_THROWS_AS(concentration_exact(big, 0.5), ModeUnavailable);
  REQUIRE_NOTHROW(concentration_estimate(big, 0.5, 1));
}

TEST_CASE("separation pinned values", "[observables]") {
  const FiniteMMSpace two = gen_two_point();
  REQUIRE(separation_exact(two, 0.5, 0.5) == 1.0);
  REQUIRE(separation_exact(two, 0.6, 0.4) == 0.0);
  REQUIRE(separation_exact(two, 1.5, 0.5) == 0.0);  // threshold above the mass
}

TEST_CASE("separation against brute force", "[observables]") {
  for (std::uint64_t seed : {4, 5}) {
    const FiniteMMSpace X = gen_cloud(2, 7, seed);
    const double m = X.total_mass();
    for (double f0 : {0.15, 0.3})
      for (double f1 : {0.2, 0.45}) {
        const double exact = separation_exact(X, f0 * m, f1 * m);
        REQUIRE_THAT(exact, Catch::Matchers::WithinAbs(brute_separation(X, f0 * m, f1 * m), 1e-12));
        REQUIRE(separation_estimate(X, {f0 * m, f1 * m}) <= exact + 1e-12);
      }
  }
  const FiniteMMSpace big = gen_cloud(2, kSeparationExactLimit + 1, 6);
  REQUIRE_THROWS_AS(separation_exact(big, 0.5, 0.5), ModeUnavailable);
}

TEST_CASE("variation pinned values", "[observables]") {
  const FiniteMMSpace two = gen_two_point();
  const ScreenMap id = field_as_map(field_of({0.0, 1.0}, "id"));
  REQUIRE_THAT(lp_variation(two, id, 1.0), Catch::Matchers::WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(lp_variation(two, id, 2.0), Catch::Matchers::WithinAbs(std::sqrt(0.5), 1e-15));
  REQUIRE(lp_variation(two, id, kInf) == 1.0);
  const ScreenMap c = field_as_map(field_of({3.0, 3.0}, "const"));
  for (double p : {0.5, 1.0, 2.0, kInf}) REQUIRE(lp_variation(two, c, p) == 0.0);
  REQUIRE_THROWS_AS(lp_variation(two, id, 0.0), BadSpec);
}

TEST_CASE("observable functionals over families", "[observables]") {
  const FiniteMMSpace two = gen_two_point();
  const std::vector<ScreenMap> fam{field_as_map(field_of({0.0, 1.0}, "id"))};
  REQUIRE(obs_diameter(two, 0.4, fam).value == 1.0);
  REQUIRE(obs_diameter(two, 1.2, fam).value == 0.0);
  REQUIRE_THAT(obs_lp_variation(two, 1.0, fam).value, Catch::Matchers::WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(obs_central_radius(two, 0.4, fam).value, Catch::Matchers::WithinAbs(0.5, 1e-15));
  REQUIRE(obs_central_radius(two, 1.2, fam).value == 0.0);

  const FiniteMMSpace line({"a", "b", "c"}, {0, 1, 2, 1, 0, 1, 2, 1, 0},
                           {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const std::vector<ScreenMap> fam3{field_as_map(field_of({0.0, 1.0, 2.0}, "id"))};
  REQUIRE_THAT(obs_diameter(line, 1.0 / 3, fam3).value, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("hyperbolic geodesic image keeps scalar variation", "[observables]") {
  const FiniteMMSpace two = gen_two_point();
  auto screen = std::make_shared<Screen>(HyperbolicScreen{2, -1.0});
  const auto fam = maps_geodesic(two, screen, {field_of({0.0, 1.0}, "id")});
  REQUIRE_THAT(lp_variation(two, fam.maps[0], 1.0), Catch::Matchers::WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(obs_central_radius(two, 0.4, fam.maps).value,
               Catch::Matchers::WithinAbs(0.5, 1e-9));
}

TEST_CASE("central radius pinned values", "[observables]") {
  const PushforwardMeasure nu = line_measure({0.0, 1.0}, {0.5, 0.5});
  REQUIRE_THAT(central_radius(nu, 0.6), Catch::Matchers::WithinAbs(0.5, 1e-15));
  REQUIRE_THAT(central_radius(nu, 0.4), Catch::Matchers::WithinAbs(0.5, 1e-15));
  REQUIRE(central_radius(nu, -1.0) == 0.0);
  const PushforwardMeasure one = line_measure({2.0}, {1.0});
  REQUIRE(central_radius(one, 0.8) == 0.0);
  REQUIRE_THROWS_AS(central_radius(nu, 1.5), BadSpec);
}

TEST_CASE("tree split holds a third on each side", "[observables]") {
  auto star = std::make_shared<MetricTree>(
      MetricTree(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}));
  PushforwardMeasure nu;
  nu.screen = std::make_shared<Screen>(TreeScreen{star});
  for (int leaf : {1, 2, 3}) {
    nu.atoms.push_back(TreePoint::at_vertex(leaf));
    nu.weights.push_back(1.0 / 3);
  }
  // Any atom vertex splits this star validly; the exact stop is not pinned.
  const TreeSplit split = pre_levy_mean_tree(nu);
  REQUIRE(split.point.is_vertex());
  REQUIRE(split.mass_a >= 1.0 / 3 - tol::kMass);
  REQUIRE(split.mass_b >= 1.0 / 3 - tol::kMass);

  auto path = std::make_shared<MetricTree>(MetricTree(2, {{0, 1, 2.0}}));
  PushforwardMeasure pm;
  pm.screen = std::make_shared<Screen>(TreeScreen{path});
  pm.atoms = {ScreenPoint(TreePoint::at_vertex(0)), ScreenPoint(TreePoint::at_vertex(1))};
  pm.weights = {0.5, 0.5};
  const TreeSplit ps = pre_levy_mean_tree(pm);
  REQUIRE(ps.mass_a >= 1.0 / 3 - tol::kMass);
  REQUIRE(ps.mass_b >= 1.0 / 3 - tol::kMass);

  PushforwardMeasure single;
  single.screen = pm.screen;
  single.atoms = {ScreenPoint(TreePoint::at_vertex(1))};
  single.weights = {1.0};
  const TreeSplit ss = pre_levy_mean_tree(single);
  REQUIRE(ss.point.is_vertex());
  REQUIRE(ss.point.vertex == 1);
  REQUIRE(ss.mass_a >= 1.0 / 3 - tol::kMass);
  REQUIRE(ss.mass_b >= 1.0 / 3 - tol::kMass);
}

TEST_CASE("worst remote mass generalizes the concentration function", "[observables]") {
  const FiniteMMSpace X = gen_cloud(2, 9, 12);
  for (double r : {0.2, 0.5})
    REQUIRE_THAT(worst_remote_mass(X, X.total_mass() / 2.0, r),
                 Catch::Matchers::WithinAbs(concentration_exact(X, r), 1e-15));
}

TEST_CASE("invariant battery passes on reference spaces", "[observables]") {
  for (const char* spec : {"two_point", "cloud:d=2,N=9,seed=3", "cube:k=3"}) {
    const FiniteMMSpace X = gen_space(spec, 0);
    const VerifySuite suite = run_verify_battery(X, 17);
    for (const CheckResult& c : suite.checks) {
      INFO(spec << " " << c.id << " lhs=" << c.lhs << " rhs=" << c.rhs);
      REQUIRE(c.pass);
    }
  }
}
