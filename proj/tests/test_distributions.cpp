// Tests for channel-input distribution constructors and convolution algebra.
// Closed-form densities (hypoexponential, triangle, exact step heights) serve
// as independent oracles for the convolution paths.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "oimac/common.hpp"
#include "oimac/distribution.hpp"

using namespace oimac;
using Catch::Approx;

TEST_CASE("point mass", "[dist]") {
  auto d = make_point_mass(2.5);
  REQUIRE(d.atoms.size() == 1);
  CHECK(d.atoms[0].x == 2.5);
  CHECK(d.atoms[0].mass == 1.0);
  CHECK_FALSE(d.has_continuous());
  CHECK(d.mean == 2.5);
  d.validate();
  Rng rng(428);
  CHECK(d.sampler(rng) == 2.5);
}

TEST_CASE("exponential input", "[dist]") {
  auto d = make_exponential(1.0);
  CHECK(d.density(0.0) == Approx(1.0).epsilon(1e-13));
  CHECK(d.density(1.0) == Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(d.density(-0.5) == 0.0);
  CHECK(d.mean == Approx(1.0).epsilon(1e-12));
  CHECK(d.atoms.empty());
  CHECK(d.has_continuous());
  d.validate();

  Rng rng(428);
  double s = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) s += d.sampler(rng);
  CHECK(s / n == Approx(1.0).margin(0.03));

  CHECK_THROWS_AS(make_exponential(-1.0), std::domain_error);
}

TEST_CASE("uniform input is an exact step density", "[dist]") {
  auto d = make_uniform(2.0);
  REQUIRE(d.steps.has_value());
  CHECK(d.steps->at(1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(d.steps->at(-0.1) == 0.0);
  CHECK(d.steps->at(2.1) == 0.0);
  CHECK(d.steps->exact_entropy() == Approx(kLn2).epsilon(1e-14));
  CHECK(d.mean == Approx(1.0).epsilon(1e-14));
  d.validate();
}

TEST_CASE("erlang input", "[dist]") {
  auto d = make_erlang(2, 1.0);
  for (double x : {0.1, 1.0, 5.0})
    CHECK(d.density(x) == Approx(x * std::exp(-x)).epsilon(1e-11));
  CHECK(d.mean == Approx(2.0).epsilon(1e-12));
  d.validate();
  Rng rng(428);
  double s = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) s += d.sampler(rng);
  CHECK(s / n == Approx(2.0).margin(0.05));
}

TEST_CASE("atom-plus-exponential mixture", "[dist]") {
  // Mixture with atom mass En/S at zero and exponential(S) body, S = Es + En.
  auto d = make_aen_mix(2.0, 1.0);
  CHECK(d.atom_mass() == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(d.continuous_mass == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(d.mean == Approx(2.0).epsilon(1e-11));
  CHECK(d.density(1.0) == Approx((2.0 / 9.0) * std::exp(-1.0 / 3.0)).epsilon(1e-12));
  d.validate();
}

TEST_CASE("geometric lattice input", "[dist]") {
  auto d = make_geometric_spaced(1.0, 1.0);  // mean 1, spacing 1 => q = 1/2
  REQUIRE(d.atoms.size() == 40);             // retained mass >= 1 - 1e-12
  double mass = 0.0, mean = 0.0;
  for (std::size_t m = 0; m < d.atoms.size(); ++m) {
    CHECK(d.atoms[m].x == Approx(static_cast<double>(m)).margin(1e-12));
    mass += d.atoms[m].mass;
    mean += d.atoms[m].x * d.atoms[m].mass;
  }
  CHECK(mass == Approx(1.0).epsilon(1e-14));
  CHECK(d.mean == Approx(mean).epsilon(1e-14));
  CHECK(d.mean == Approx(1.0).margin(1e-9));
  CHECK(d.atoms[0].mass == Approx(0.5).epsilon(1e-11));
  CHECK(d.atoms[1].mass / d.atoms[0].mass == Approx(0.5).epsilon(1e-12));
  d.validate();
}

TEST_CASE("max-mass discrete inputs", "[dist]") {
  SECTION("integer a collapses to equiprobable atoms") {
    auto d = make_maxmass_discrete(4.0, 2.0, MaxMassStyle::symmetric_pm);
    REQUIRE(d.atoms.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(d.atoms[i].mass == Approx(0.2).epsilon(1e-13));
      CHECK(d.atoms[i].x == Approx(-4.0 + 2.0 * static_cast<double>(i)).margin(1e-12));
    }
  }
  SECTION("fractional a, symmetric") {
    auto d = make_maxmass_discrete(4.7, 2.0, MaxMassStyle::symmetric_pm);
    REQUIRE(d.atoms.size() == 10);
    double mass = 0.0;
    for (const auto& at : d.atoms) {
      CHECK(std::abs(at.x) <= 4.7 + 1e-12);
      mass += at.mass;
    }
    CHECK(mass == Approx(1.0).epsilon(1e-14));
    CHECK(d.atoms.back().x == Approx(4.7).margin(1e-12));
    CHECK(d.atoms.back().mass == Approx(5.0 / 30.0).epsilon(1e-13));
  }
  SECTION("fractional a, shifted nonnegative") {
    auto d = make_maxmass_discrete(1.5, 2.0, MaxMassStyle::shifted_nonneg);
    REQUIRE(d.atoms.size() == 4);
    CHECK(d.atoms[0].x == Approx(0.0).margin(1e-12));
    CHECK(d.atoms[0].mass == Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(d.atoms[1].x == Approx(1.0 * 2.0 / 2.0).margin(1e-12));  // m=1 site at spacing
    CHECK(d.atoms[1].mass == Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(d.atoms[2].x == Approx(2.0).margin(1e-12));
    CHECK(d.atoms[2].mass == Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(d.atoms[3].x == Approx(3.0).margin(1e-12));
    CHECK(d.atoms[3].mass == Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(d.mean == Approx(1.5).epsilon(1e-13));
  }
}

TEST_CASE("erlang differential entropy closed form", "[dist]") {
  CHECK(erlang_entropy(2, 1.0) == Approx(1.5772156649015328606).epsilon(1e-14));
  CHECK(erlang_entropy(4, 0.25) == Approx(0.6371121028127629638).epsilon(1e-13));
  CHECK(erlang_entropy(1, 7.0) == Approx(2.9459101490553133051).epsilon(1e-14));
  CHECK_THROWS_AS(erlang_entropy(0, 1.0), std::domain_error);
}

TEST_CASE("convolution: atoms against steps stays an exact step density", "[dist]") {
  auto d = density_convolve(make_maxmass_discrete(1.5, 2.0, MaxMassStyle::shifted_nonneg),
                            make_uniform(2.0));
  REQUIRE(d.steps.has_value());
  CHECK(d.mean == Approx(2.5).epsilon(1e-12));
  const double expected_h[5] = {1.0 / 6, 1.0 / 4, 1.0 / 6, 1.0 / 4, 1.0 / 6};
  for (int i = 0; i < 5; ++i)
    CHECK(d.steps->at(0.5 + i) == Approx(expected_h[i]).epsilon(1e-13));
  CHECK(d.steps->mass() == Approx(1.0).epsilon(1e-13));
  CHECK(d.steps->exact_entropy() == Approx(1.5890269151739728).epsilon(1e-12));
  d.validate();
}

TEST_CASE("convolution: two continuous laws, pointwise against closed forms", "[dist]") {
  SECTION("exp(1) + exp(2) is hypoexponential") {
    auto d = density_convolve(make_exponential(1.0), make_exponential(2.0));
    const double ys[6] = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
    const double ref[6] = {0.046392006464754435927, 0.17227012335877144464,
                           0.23865121854119110201, 0.2325441579348296297,
                           0.075347051624813328073, 0.0066925470693229822451};
    for (int i = 0; i < 6; ++i) CHECK(d.density(ys[i]) == Approx(ref[i]).margin(1e-8));
    CHECK(d.mean == Approx(3.0).epsilon(1e-11));
  }
  SECTION("two equal uniforms give the triangle density") {
    auto d = density_convolve(make_uniform(2.0), make_uniform(2.0));
    auto tri = [](double y) {
      if (y < 0.0 || y > 4.0) return 0.0;
      return (y <= 2.0 ? y : 4.0 - y) / 4.0;
    };
    for (double y : {0.3, 1.0, 1.9, 2.0, 2.7, 3.6})
      CHECK(d.density(y) == Approx(tri(y)).margin(1e-8));
    CHECK(d.mean == Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("mixture decomposition: atom+exponential plus exponential is exponential",
          "[dist]") {
  // aen_mix(Es, En) + exponential(En) must reproduce exponential(Es + En).
  const double pairs[3][2] = {{2.0, 1.0}, {1.0, 1.0}, {5.0, 0.5}};
  for (const auto& pr : pairs) {
    double es = pr[0], en = pr[1], s = es + en;
    auto d = density_convolve(make_aen_mix(es, en), make_exponential(en));
    for (int i = 1; i <= 40; ++i) {
      double y = 5.0 * s * i / 40.0;
      CHECK(d.density(y) == Approx(std::exp(-y / s) / s).margin(1e-8));
    }
    CHECK(d.mean == Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("samplers are deterministic per seed", "[dist]") {
  auto d1 = make_erlang(2, 1.0);
  auto d2 = make_erlang(2, 1.0);
  Rng a(99), b(99);
  for (int i = 0; i < 32; ++i) CHECK(d1.sampler(a) == d2.sampler(b));

  auto g1 = make_geometric_spaced(10.0, 3.0);
  auto g2 = make_geometric_spaced(10.0, 3.0);
  Rng c(7), e(7);
  for (int i = 0; i < 32; ++i) CHECK(g1.sampler(c) == g2.sampler(e));
}

TEST_CASE("validation rejects inconsistent hand-built distributions", "[dist]") {
  InputDistribution bad;
  bad.atoms = {{0.0, 0.7}};  // mass deficit, no continuous part
  bad.support = {0.0, 1.0};
  bad.mean = 0.0;
  bad.family = "test";
  CHECK_THROWS(bad.validate());
}
