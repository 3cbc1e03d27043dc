#include "fixtures.hpp"

#include "umbir/error.hpp"
#include "umbir/prior.hpp"

#include <doctest.h>

using namespace umbir;
using namespace fixtures;

TEST_CASE("prior parameters are validated field by field") {
  QggmrfParams p;
  CHECK_NOTHROW(p.validate());
  p.q = 3.0;
  p.T = -1.0;
  try {
    p.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError &e) {
    CHECK(e.fields().size() == 2);
  }
  p = {};
  p.p = 2.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("rho is even, zero at the origin and grows") {
  const QggmrfParams prm;
  CHECK(rho(0.0, 1.0, prm) == 0.0);
  double prev = 0.0;
  for (double d = 0.001; d < 5.0; d *= 1.7) {
    CHECK(rho(d, 0.5, prm) == doctest::Approx(rho(-d, 0.5, prm)));
    CHECK(rho(d, 0.5, prm) > prev);
    prev = rho(d, 0.5, prm);
  }
}

TEST_CASE("rho_prime matches central differences") {
  for (double p : {1.1, 1.5, 1.9}) {
    QggmrfParams prm;
    prm.p = p;
    for (double d : {-3.0, -0.2, -0.004, 0.0007, 0.01, 0.05, 0.9, 4.0}) {
      const double h = 1e-6 * std::max(std::abs(d), 1e-3);
      const double fd = (rho(d + h, 0.3, prm) - rho(d - h, 0.3, prm)) / (2 * h);
      CHECK(rho_prime(d, 0.3, prm) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("rho is convex") {
  for (double p : {1.1, 1.5, 1.9}) {
    QggmrfParams prm;
    prm.p = p;
    const double h = 1e-3;
    for (double d = -2.0; d <= 2.0; d += 0.0137) {
      const double second =
          rho(d + h, 1.0, prm) - 2 * rho(d, 1.0, prm) + rho(d - h, 1.0, prm);
      CHECK(second >= -1e-12);
    }
  }
}

TEST_CASE("surrogate majorizes rho and touches it at the expansion point") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  QggmrfParams prm;
  for (int i = 0; i < 1000; ++i) {
    const double d0 = u(rng);
    const double d = u(rng);
    const double b = surrogate_coeff(d0, 0.7, prm);
    const double bound = rho(d0, 0.7, prm) + b * (d * d - d0 * d0);
    CHECK(rho(d, 0.7, prm) <= bound + 1e-12 * (1 + std::abs(bound)));
    // tangent: derivative of b d^2 at d0 is rho'(d0)
    CHECK(2 * b * d0 == doctest::Approx(rho_prime(d0, 0.7, prm)).epsilon(1e-9));
  }
}

TEST_CASE("surrogate limit at zero difference") {
  const QggmrfParams prm;
  const double s = 0.4;
  const double k = prm.q - prm.p;
  const double limit = 1.0 / (2 * std::pow(s, prm.p) * std::pow(prm.T * s, k)) * prm.q / prm.p;
  CHECK(surrogate_coeff(0.0, s, prm) == doctest::Approx(limit));
  CHECK(surrogate_coeff(1e-12, s, prm) == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("equal exponents give a quadratic potential") {
  // With p = q the shape factor u^0 / (1 + u^0) is 1/2, so rho = d^2 / (4 s^2)
  // and the surrogate coefficient is the constant rho / d^2.
  QggmrfParams prm;
  prm.p = 2.0;
  const double s = 0.8;
  for (double d : {0.01, 0.3, 2.0}) {
    CHECK(rho(d, s, prm) == doctest::Approx(d * d / (4 * s * s)));
    CHECK(surrogate_coeff(d, s, prm) == doctest::Approx(1.0 / (4 * s * s)));
  }
}

TEST_CASE("eight-connected weights are inverse distance and sum to one") {
  const auto offs = eight_connected();
  REQUIRE(offs.size() == 8);
  double total = 0.0;
  double edge = 0.0;
  double corner = 0.0;
  for (const auto &o : offs) {
    total += o.weight;
    (std::abs(o.drow) + std::abs(o.dcol) == 1 ? edge : corner) = o.weight;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(edge / corner == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("variance field grows with distance from the array") {
  const auto grid = small_grid();
  const auto geometry = small_geometry();
  const auto f = variance_field(grid, geometry, 10.0, 2.0, 2.0);
  const Point2 ref = geometry.assembly_reference();
  std::size_t far = 0;
  std::size_t near = 0;
  for (std::size_t v = 0; v < grid.size(); ++v) {
    if (distance(voxel_center(grid, v), ref) > distance(voxel_center(grid, far), ref)) {
      far = v;
    }
    if (distance(voxel_center(grid, v), ref) < distance(voxel_center(grid, near), ref)) {
      near = v;
    }
  }
  CHECK(f.nu[far] == doctest::Approx(10.0));
  const double ratio = distance(voxel_center(grid, near), ref) /
                       distance(voxel_center(grid, far), ref);
  CHECK(f.nu[near] == doctest::Approx(1.0 + 9.0 * ratio * ratio));
  CHECK(f.sigma(near, far) == doctest::Approx(2.0 * std::sqrt(f.nu[near] * 10.0)));
}

TEST_CASE("prior cost counts each clique once and its gradient matches") {
  const auto grid = small_grid(5, 4);
  const QggmrfPrior prior(grid, {}, variance_field(grid, small_geometry(), 10, 2, 2));
  // interior voxel has 8 neighbors, corner has 3
  CHECK(prior.neighbors(grid.index(2, 2)).size() == 8);
  CHECK(prior.neighbors(0).size() == 3);
  std::mt19937_64 rng(8);
  auto x = random_vector(grid.size(), rng);
  // symmetric clique weights and scales
  for (std::size_t s = 0; s < grid.size(); ++s) {
    for (const auto &nb : prior.neighbors(s)) {
      bool found = false;
      for (const auto &back : prior.neighbors(nb.index)) {
        if (back.index == s) {
          found = true;
          CHECK(back.weight == nb.weight);
          CHECK(back.sigma == doctest::Approx(nb.sigma));
        }
      }
      CHECK(found);
    }
  }
  double brute = 0.0;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    for (const auto &nb : prior.neighbors(s)) {
      brute += 0.5 * nb.weight * rho(x[s] - x[nb.index], nb.sigma, prior.params());
    }
  }
  CHECK(prior.cost(x) == doctest::Approx(brute));
  const auto g = prior.gradient(x);
  for (std::size_t i = 0; i < x.size(); i += 3) {
    auto xp = x;
    auto xm = x;
    xp[i] += 1e-6;
    xm[i] -= 1e-6;
    CHECK(g[i] == doctest::Approx((prior.cost(xp) - prior.cost(xm)) / 2e-6).epsilon(1e-5));
  }
}
