#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mmc/generators.hpp"
#include "mmc/hyperbolic.hpp"
#include "mmc/rng.hpp"
#include "mmc/screens.hpp"
#include "mmc/tree.hpp"

using namespace mmc;

namespace {

Vec disk_point(Rng& rng, std::size_t dim, double rmax = 0.9) {
  Vec v(dim);
  for (;;) {
    for (auto& c : v) c = rng.uniform(-rmax, rmax);
    if (norm(v) < rmax) return v;
  }
}

MetricTree unit_star() {
  return MetricTree(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
}

}  // namespace

TEST_CASE("euclidean distance is the norm of the difference", "[screens]") {
  const Screen s = EuclideanScreen{3};
  REQUIRE(screen_distance(s, Vec{1, 2, 2}, Vec{1, 2, 2}) == 0.0);
  REQUIRE(screen_distance(s, Vec{0, 0, 0}, Vec{3, 4, 0}) == 5.0);
  REQUIRE_THROWS_AS(screen_distance(s, Vec{0, 0}, Vec{3, 4, 0}), ScreenMismatch);
  REQUIRE(screen_dim(s) == 3);
}

TEST_CASE("hyperbolic axial distances match the closed form", "[screens]") {
  // d(0, (r,0)) = log((1+r)/(1-r)) for kappa1 = -1, scaled by 1/sqrt(-kappa1).
  const Vec o{0.0, 0.0}, x{0.5, 0.0};
  REQUIRE_THAT(hyp_distance(-1.0, o, x), Catch::Matchers::WithinAbs(std::log(3.0), 1e-12));
  REQUIRE_THAT(hyp_distance(-4.0, o, x), Catch::Matchers::WithinAbs(std::log(3.0) / 2.0, 1e-12));
  REQUIRE_THAT(hyp_distance(-0.25, o, x), Catch::Matchers::WithinAbs(2.0 * std::log(3.0), 1e-12));
  REQUIRE(hyp_distance(-1.0, x, x) == 0.0);
  const Screen s = HyperbolicScreen{2, -1.0};
  REQUIRE_THAT(screen_distance(s, o, x), Catch::Matchers::WithinAbs(std::log(3.0), 1e-12));
}

TEST_CASE("boundary points are rejected", "[screens]") {
  REQUIRE_THROWS_AS(hyp_distance(-1.0, Vec{1.0 - 1e-14, 0.0}, Vec{0.0, 0.0}), OutOfDisk);
  REQUIRE_THROWS_AS(hyp_distance(-1.0, Vec{0.0, 0.0}, Vec{0.0, 1.1}), OutOfDisk);
  REQUIRE_NOTHROW(hyp_distance(-1.0, Vec{0.9, 0.0}, Vec{0.0, 0.0}));
}

TEST_CASE("radial isometry of the exponential map", "[screens]") {
  Rng rng(31);
  for (double kappa1 : {-0.5, -1.0, -4.0})
    for (int trial = 0; trial < 50; ++trial) {
      Vec v(3);
      for (auto& c : v) c = rng.uniform(-1.0, 1.0);
      const Vec y = hyp_exp_origin(kappa1, v);
      REQUIRE(norm(y) < 1.0);
      REQUIRE_THAT(hyp_distance(kappa1, Vec(3, 0.0), y),
                   Catch::Matchers::WithinAbs(norm(v), 1e-10));
    }
}

TEST_CASE("exp and log round trip", "[screens]") {
  Rng rng(32);
  for (double kappa1 : {-0.5, -1.0, -4.0})
    for (int trial = 0; trial < 60; ++trial) {
      const Vec base = disk_point(rng, 2), y = disk_point(rng, 2);
      const Vec v = hyp_log(kappa1, base, y);
      const Vec back = hyp_exp(kappa1, base, v);
      REQUIRE(euclid_dist(back, y) < tol::kRoundTrip);
      // Opposite order: exp then log recovers the tangent vector.
      const Vec w = scale(disk_point(rng, 2), 0.5);
      const Vec z = hyp_exp(kappa1, base, w);
      REQUIRE(euclid_dist(hyp_log(kappa1, base, z), w) < tol::kRoundTrip);
      // The log norm is the distance.
      REQUIRE_THAT(norm(v), Catch::Matchers::WithinAbs(hyp_distance(kappa1, base, y), 1e-10));
    }
}

TEST_CASE("log maps are nonexpansive", "[screens]") {
  Rng rng(33);
  for (int trial = 0; trial < 1000; ++trial) {
    const double kappa1 = (trial % 3 == 0) ? -0.5 : (trial % 3 == 1 ? -1.0 : -4.0);
    const Vec base = disk_point(rng, 2), x = disk_point(rng, 2), y = disk_point(rng, 2);
    const double tangent = euclid_dist(hyp_log(kappa1, base, x), hyp_log(kappa1, base, y));
    REQUIRE(tangent <= hyp_distance(kappa1, x, y) + 1e-9);
  }
}

TEST_CASE("distortion map dominates euclidean distances", "[screens]") {
  Rng rng(34);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec x = disk_point(rng, 3, 0.97), y = disk_point(rng, 3, 0.97);
    REQUIRE(euclid_dist(phi_distortion(x), phi_distortion(y)) >= euclid_dist(x, y) - 1e-12);
  }
}

TEST_CASE("mobius translation is an isometry", "[screens]") {
  Rng rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec a = disk_point(rng, 2, 0.8), x = disk_point(rng, 2, 0.8), y = disk_point(rng, 2, 0.8);
    const double before = hyp_distance(-1.0, x, y);
    const double after = hyp_distance(-1.0, mobius_add(a, x), mobius_add(a, y));
    REQUIRE_THAT(after, Catch::Matchers::WithinAbs(before, 1e-9));
  }
}

TEST_CASE("star tree distances", "[screens]") {
  const MetricTree t = unit_star();
  REQUIRE(t.vertex_distance(1, 2) == 2.0);
  REQUIRE(t.vertex_distance(0, 3) == 1.0);
  REQUIRE(t.distance(TreePoint::at_vertex(1), TreePoint::at_vertex(3)) == 2.0);
  // Interior points on different edges meet through the center.
  const TreePoint p = TreePoint::on_edge(0, 0.25), q = TreePoint::on_edge(1, 0.75);
  REQUIRE_THAT(t.distance(p, q), Catch::Matchers::WithinAbs(0.25 + 0.75, 1e-12));
  const Screen s = TreeScreen{std::make_shared<MetricTree>(t)};
  REQUIRE(screen_distance(s, TreePoint::at_vertex(1), TreePoint::at_vertex(2)) == 2.0);
  REQUIRE(is_tree_screen(s));
}

TEST_CASE("tree point validation", "[screens]") {
  const MetricTree t = unit_star();
  REQUIRE_THROWS_AS(t.canonical(TreePoint::at_vertex(9)), InvalidTreePoint);
  REQUIRE_THROWS_AS(t.canonical(TreePoint::on_edge(7, 0.5)), InvalidTreePoint);
  REQUIRE_THROWS_AS(t.canonical(TreePoint::on_edge(0, 1.5)), InvalidTreePoint);
  // Offsets at the ends snap to the endpoint vertices.
  REQUIRE(t.canonical(TreePoint::on_edge(0, 0.0)).vertex == 0);
  REQUIRE(t.canonical(TreePoint::on_edge(0, 1.0)).vertex == 1);
}

TEST_CASE("tree metric satisfies the four point condition", "[screens]") {
  const MetricTree t = gen_random_tree(12, 44);
  Rng rng(45);
  auto random_point = [&](void) -> TreePoint {
    if (rng.uniform() < 0.3) return TreePoint::at_vertex(static_cast<int>(rng.index(12)));
    const int e = static_cast<int>(rng.index(t.edges().size()));
    return t.canonical(TreePoint::on_edge(e, rng.uniform() * t.edge(e).len));
  };
  for (int trial = 0; trial < 300; ++trial) {
    const TreePoint a = random_point(), b = random_point(), c = random_point(),
                    d = random_point();
    double s1 = t.distance(a, b) + t.distance(c, d);
    double s2 = t.distance(a, c) + t.distance(b, d);
    double s3 = t.distance(a, d) + t.distance(b, c);
    if (s1 > s2) std::swap(s1, s2);
    if (s2 > s3) std::swap(s2, s3);
    if (s1 > s2) std::swap(s1, s2);
    REQUIRE(s3 - s2 <= 1e-9);  // the two largest sums agree
  }
}

TEST_CASE("tree interpolation walks the geodesic", "[screens]") {
  const MetricTree t = gen_random_tree(10, 46);
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const int e1 = static_cast<int>(rng.index(t.edges().size()));
    const int e2 = static_cast<int>(rng.index(t.edges().size()));
    const TreePoint p = t.canonical(TreePoint::on_edge(e1, rng.uniform() * t.edge(e1).len));
    const TreePoint q = t.canonical(TreePoint::on_edge(e2, rng.uniform() * t.edge(e2).len));
    const double total = t.distance(p, q);
    REQUIRE(t.distance(t.interpolate(p, q, 0.0), p) < 1e-12);
    REQUIRE(t.distance(t.interpolate(p, q, 1.0), q) < 1e-12);
    const TreePoint mid = t.interpolate(p, q, 0.5);
    REQUIRE_THAT(t.distance(p, mid), Catch::Matchers::WithinAbs(total / 2.0, 1e-9));
    REQUIRE_THAT(t.distance(mid, q), Catch::Matchers::WithinAbs(total / 2.0, 1e-9));
  }
}

TEST_CASE("subdivision keeps every distance", "[screens]") {
  const MetricTree t = gen_random_tree(9, 48);
  Rng rng(49);
  std::vector<TreePoint> pts;
  for (int i = 0; i < 12; ++i) {
    const int e = static_cast<int>(rng.index(t.edges().size()));
    pts.push_back(t.canonical(TreePoint::on_edge(e, rng.uniform() * t.edge(e).len)));
  }
  const auto [t2, where] = t.subdivide(pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      REQUIRE_THAT(t2.vertex_distance(where[i], where[j]),
                   Catch::Matchers::WithinAbs(t.distance(pts[i], pts[j]), 1e-9));
}

TEST_CASE("cat0 midpoint inequality on both curved screens", "[screens]") {
  Rng rng(50);
  for (int trial = 0; trial < 200; ++trial) {
    const double kappa1 = (trial % 2 == 0) ? -1.0 : -2.0;
    const Vec x = disk_point(rng, 2), y = disk_point(rng, 2), z = disk_point(rng, 2);
    const Vec mid = hyp_interpolate(kappa1, y, z, 0.5);
    const double lhs = std::pow(hyp_distance(kappa1, x, mid), 2);
    const double rhs = 0.5 * std::pow(hyp_distance(kappa1, x, y), 2) +
                       0.5 * std::pow(hyp_distance(kappa1, x, z), 2) -
                       0.25 * std::pow(hyp_distance(kappa1, y, z), 2);
    REQUIRE(lhs <= rhs + 1e-9);
  }
  const MetricTree t = gen_random_tree(11, 51);
  auto random_point = [&](void) -> TreePoint {
    const int e = static_cast<int>(rng.index(t.edges().size()));
    return t.canonical(TreePoint::on_edge(e, rng.uniform() * t.edge(e).len));
  };
  for (int trial = 0; trial < 200; ++trial) {
    const TreePoint x = random_point(), y = random_point(), z = random_point();
    const TreePoint mid = t.interpolate(y, z, 0.5);
    const double lhs = std::pow(t.distance(x, mid), 2);
    const double rhs = 0.5 * std::pow(t.distance(x, y), 2) +
                       0.5 * std::pow(t.distance(x, z), 2) - 0.25 * std::pow(t.distance(y, z), 2);
    REQUIRE(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("screen interpolation endpoints", "[screens]") {
  const Screen h = HyperbolicScreen{2, -1.0};
  Rng rng(52);
  const Vec a = disk_point(rng, 2), b = disk_point(rng, 2);
  REQUIRE(euclid_dist(as_vec(screen_interpolate(h, a, b, 0.0)), a) < 1e-12);
  REQUIRE(euclid_dist(as_vec(screen_interpolate(h, a, b, 1.0)), b) < 1e-12);
  const Vec m = as_vec(screen_interpolate(h, a, b, 0.5));
  REQUIRE_THAT(screen_distance(h, a, m),
               Catch::Matchers::WithinAbs(screen_distance(h, a, b) / 2.0, 1e-9));
  const Screen e = EuclideanScreen{2};
  REQUIRE(euclid_dist(as_vec(screen_interpolate(e, Vec{0, 0}, Vec{2, 2}, 0.25)), Vec{0.5, 0.5}) <
          1e-12);
}

TEST_CASE("screen names round readable", "[screens]") {
  REQUIRE(screen_name(EuclideanScreen{3}) == "euclid:3");
  REQUIRE(screen_name(HyperbolicScreen{2, -1.0}) == "hyperbolic:2:-1");
  REQUIRE(screen_name(TreeScreen{std::make_shared<MetricTree>(unit_star())}) == "tree");
}
