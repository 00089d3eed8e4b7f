#include <cmath>
#include <functional>
#include <random>

#include "bfrb/bregman.hpp"
#include "doctest.h"

using namespace bfrb;

namespace {

std::mt19937 rng(7u);

double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec rand_vec(std::size_t d, double lo, double hi) {
  Vec v(d);
  for (auto& x : v) x = uni(lo, hi);
  return v;
}

Vec rand_simplex(std::size_t d) {
  Vec v(d);
  double s = 0.0;
  for (auto& x : v) {
    x = uni(0.05, 1.0);
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

// reference evaluation of the entropy three-point gap in extended precision
double gap_long_double(const Vec& x, const Vec& y, const Vec& z) {
  auto dist = [](const Vec& a, const Vec& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const long double ai = a[i], bi = b[i];
      s += ai * (std::log(static_cast<long double>(ai)) - std::log(bi)) - ai + bi;
    }
    return s;
  };
  long double inner = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i)
    inner += (std::log(static_cast<long double>(z[i])) - std::log(static_cast<long double>(y[i]))) *
             static_cast<long double>(x[i] - y[i]);
  return static_cast<double>(std::fabs(dist(x, y) + dist(y, z) - dist(x, z) - inner));
}

}  // namespace

TEST_CASE("euclidean distance is half the squared norm") {
  const auto g = LegendreGeometry::euclidean(2);
  CHECK(bregman_distance(g, {1.0, 0.0}, {0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bregman_distance(g, {1.0, 2.0}, {1.0, 2.0}) == 0.0);
}

TEST_CASE("entropy distance is the generalized KL divergence") {
  const auto g = LegendreGeometry::shannon_entropy(2, 1.0);
  const double e = std::exp(1.0);
  // x=(1,1), y=(e,1): 1*ln(1/e) - 1 + e + 0 = e - 2
  CHECK(bregman_distance(g, {1.0, 1.0}, {e, 1.0}) == doctest::Approx(e - 2.0).epsilon(1e-12));
  CHECK(bregman_distance(g, {0.3, 0.7}, {0.3, 0.7}) == 0.0);
}

TEST_CASE("weighted quadratic geometry") {
  const auto g = LegendreGeometry::weighted_quadratic({2.0, 5.0});
  CHECK(g.gamma() == 2.0);
  CHECK(bregman_distance(g, {1.0, 0.0}, {0.0, 0.0}) == doctest::Approx(1.0));  // 0.5*2*1
  const Vec grad = g.gradient({1.0, 2.0});
  CHECK(grad[0] == 2.0);
  CHECK(grad[1] == 10.0);
}

TEST_CASE("domain violations and dimension mismatches") {
  const auto g = LegendreGeometry::shannon_entropy(2, 1.0);
  CHECK_THROWS_AS(bregman_distance(g, {1.0, 0.0}, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(bregman_distance(g, {1.0, -2.0}, {1.0, 1.0}), Error);
  try {
    g.gradient({1.0, 1.0, 1.0});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::dimension_mismatch);
  }
  try {
    g.gradient({1e-301, 1.0});  // at the positivity floor: rejected, not clamped
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::domain_violation);
  }
}

TEST_CASE("gradient round trip across geometries") {
  struct Case {
    LegendreGeometry g;
    double lo, hi;
  };
  const Case cases[] = {
      {LegendreGeometry::euclidean(5), -10.0, 10.0},
      {LegendreGeometry::weighted_quadratic({2.0, 0.5, 1.0, 3.0, 7.0}), -10.0, 10.0},
      {LegendreGeometry::shannon_entropy(5, 1.0), 0.05, 8.0}};
  for (const auto& c : cases) {
    for (int k = 0; k < 1000; ++k) {
      const Vec x = rand_vec(5, c.lo, c.hi);
      const Vec back = c.g.gradient_conjugate(c.g.gradient(x));
      CHECK(dist2(back, x) <= 1e-10 * (1.0 + norm2(x)));
    }
  }
}

TEST_CASE("gradient matches central finite differences") {
  struct Case {
    LegendreGeometry g;
    Vec base;
  };
  const Case cases[] = {
      {LegendreGeometry::euclidean(3), {0.3, -1.2, 2.0}},
      {LegendreGeometry::weighted_quadratic({2.0, 0.5, 1.5}), {0.4, 1.1, -0.7}},
      {LegendreGeometry::shannon_entropy(3, 1.0), {0.8, 0.2, 1.7}}};
  for (const auto& c : cases) {
    for (int k = 0; k < 50; ++k) {
      Vec x = c.base;
      for (auto& xi : x) xi *= uni(0.6, 1.4);
      const Vec grad = c.g.gradient(x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::fabs(x[i]));
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (c.g.value(xp) - c.g.value(xm)) / (2.0 * h);
        CHECK(std::fabs(fd - grad[i]) <= 1e-6 * (1.0 + std::fabs(grad[i])));
      }
    }
  }
}

TEST_CASE("three-point identity") {
  SUBCASE("exact for quadratics") {
    const auto g = LegendreGeometry::euclidean(2);
    CHECK(three_point_gap(g, {1.0, 2.0}, {0.0, 0.0}, {3.0, -1.0}) <= 1e-12);
    const Vec p{0.4, -0.7};
    CHECK(three_point_gap(g, p, p, p) == 0.0);
  }
  SUBCASE("random positive triples under entropy") {
    const auto g = LegendreGeometry::shannon_entropy(4, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const Vec x = rand_vec(4, 0.05, 4.0), y = rand_vec(4, 0.05, 4.0), z = rand_vec(4, 0.05, 4.0);
      const double tol = 1e-9 * (1.0 + std::fabs(bregman_distance(g, x, z)));
      CHECK(three_point_gap(g, x, y, z) <= tol);
      // independent extended-precision evaluation agrees
      CHECK(gap_long_double(x, y, z) <= tol);
    }
  }
  SUBCASE("random triples for the quadratic geometries") {
    const auto gw = LegendreGeometry::weighted_quadratic({2.0, 0.5, 1.5});
    const auto ge = LegendreGeometry::euclidean(3);
    for (int k = 0; k < 1000; ++k) {
      const Vec x = rand_vec(3, -4.0, 4.0), y = rand_vec(3, -4.0, 4.0), z = rand_vec(3, -4.0, 4.0);
      CHECK(three_point_gap(gw, x, y, z) <= 1e-9 * (1.0 + std::fabs(bregman_distance(gw, x, z))));
      CHECK(three_point_gap(ge, x, y, z) <= 1e-9 * (1.0 + std::fabs(bregman_distance(ge, x, z))));
    }
  }
}

TEST_CASE("strong convexity certificate") {
  SUBCASE("euclidean ratios are exactly the modulus") {
    const auto g = LegendreGeometry::euclidean(3);
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int k = 0; k < 100; ++k)
      pairs.emplace_back(rand_vec(3, -5.0, 5.0), rand_vec(3, -5.0, 5.0));
    const auto rep = strong_convexity_certificate(g, pairs);
    CHECK(rep.pass);
    CHECK(rep.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("weighted: the minimum weight attains the modulus") {
    const auto g = LegendreGeometry::weighted_quadratic({2.0, 5.0});
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int k = 0; k < 20; ++k) {
      const double base = uni(-2.0, 2.0);
      pairs.emplace_back(Vec{base, 1.0}, Vec{base + uni(0.1, 2.0), 1.0});
    }
    const auto rep = strong_convexity_certificate(g, pairs);
    CHECK(rep.pass);
    CHECK(rep.min_ratio == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("entropy with modulus 1 holds inside the unit simplex") {
    const auto g = LegendreGeometry::shannon_entropy(4, 1.0);
    std::vector<std::pair<Vec, Vec>> pairs;
    // deterministic sweep over a simplex grid plus random interior pairs
    for (double a = 0.1; a <= 0.7; a += 0.1)
      for (double b = 0.1; a + b <= 0.8; b += 0.1)
        pairs.emplace_back(Vec{a, b, 0.1, 0.9 - a - b}, rand_simplex(4));
    for (int k = 0; k < 1000; ++k) pairs.emplace_back(rand_simplex(4), rand_simplex(4));
    const auto rep = strong_convexity_certificate(g, pairs);
    CHECK(rep.pass);
    CHECK(rep.min_ratio >= 1.0 - 1e-8);
  }
  SUBCASE("random pairs satisfy the modulus bound per geometry") {
    struct Case {
      LegendreGeometry g;
      std::function<Vec()> sample;
    };
    const Case cases[] = {
        {LegendreGeometry::euclidean(4), [] { return rand_vec(4, -6.0, 6.0); }},
        {LegendreGeometry::weighted_quadratic({0.5, 2.0, 1.0, 4.0}),
         [] { return rand_vec(4, -6.0, 6.0); }},
        {LegendreGeometry::shannon_entropy(4, 1.0), [] { return rand_simplex(4); }}};
    for (const auto& c : cases) {
      std::vector<std::pair<Vec, Vec>> pairs;
      for (int k = 0; k < 1000; ++k) pairs.emplace_back(c.sample(), c.sample());
      CHECK(strong_convexity_certificate(c.g, pairs).pass);
    }
  }
  SUBCASE("empty or degenerate samples are rejected") {
    const auto g = LegendreGeometry::euclidean(2);
    CHECK_THROWS_AS(strong_convexity_certificate(g, {}), Error);
    const Vec p{1.0, 1.0};
    CHECK_THROWS_AS(strong_convexity_certificate(g, {{p, p}}), Error);
  }
}

TEST_CASE("open-box domains restrict inputs") {
  DomainDescriptor dom;
  dom.kind = DomainKind::open_box;
  dom.lower = {0.0, 0.0};
  dom.upper = {1.0, 1.0};
  const LegendreGeometry g(
      "box_quadratic", 2, 1.0, dom, GeometryStructure::euclidean,
      [](const Vec& x) { return 0.5 * dot(x, x); }, [](const Vec& x) { return x; },
      [](const Vec& y) { return y; });
  CHECK(g.value({0.5, 0.5}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(g.value({0.0, 0.5}), Error);  // boundary excluded
  CHECK_THROWS_AS(g.value({0.5, 1.5}), Error);
}

TEST_CASE("distance nonnegativity with equality only at identical points") {
  const auto g = LegendreGeometry::shannon_entropy(3, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec x = rand_vec(3, 0.1, 3.0), y = rand_vec(3, 0.1, 3.0);
    const double d = bregman_distance(g, x, y);
    CHECK(d >= 0.0);
    if (dist2(x, y) > 1e-3) CHECK(d > 0.0);
  }
}
