#include "doctest.h"
#include "fixtures.hpp"

#include "error.hpp"
#include "model.hpp"

#include <cmath>

using namespace optomech;
using doctest::Approx;

TEST_CASE("set A constants") {
  const auto d = model::derive_constants(fixtures::set_a());
  CHECK(d.g0_si == Approx(950.0).epsilon(0.01));
  CHECK(d.kappa == Approx(0.90).epsilon(0.01));
  CHECK(std::abs(d.n_bar - 833.0) <= 1.0);
}

TEST_CASE("set B constants") {
  const auto d = model::derive_constants(fixtures::set_b());
  CHECK(d.g0_si == Approx(430.0).epsilon(0.02));
  CHECK(d.kappa == Approx(0.75).epsilon(0.01));
  CHECK(d.coupling == Approx(0.41).epsilon(0.02));
  CHECK(d.detuning == Approx(1.0));
  // G = sqrt(2) G0 alpha_s on the effective-detuning route.
  CHECK(d.coupling_si == Approx(std::sqrt(2.0) * d.g0_si * d.alpha_s).epsilon(1e-12));
}

TEST_CASE("kappa from finesse") {
  CHECK(model::kappa_from_finesse(1e-3, 2e4) == Approx(3.14159265358979 * 299792458.0 / 20.0).epsilon(1e-14));
}

TEST_CASE("doubling the power scales alpha_s^2 by 2 and G by sqrt 2") {
  auto p = fixtures::set_b();
  const auto d1 = model::derive_constants(p);
  p.power *= 2.0;
  const auto d2 = model::derive_constants(p);
  CHECK(d2.alpha_s * d2.alpha_s == Approx(2.0 * d1.alpha_s * d1.alpha_s).epsilon(1e-12));
  CHECK(d2.coupling == Approx(std::sqrt(2.0) * d1.coupling).epsilon(1e-12));
}

TEST_CASE("thermal occupancy") {
  const double w = 2.0 * 3.14159265358979 * 10e6;
  CHECK(model::thermal_occupancy(w, 0.0) == 0.0);
  CHECK(model::thermal_occupancy(w, 1e-6) < 1e-200);
  double last = 0.0;
  for (double t = 1e-3; t < 100.0; t *= 1.5) {
    const double n = model::thermal_occupancy(w, t);
    CHECK(n > last);
    last = n;
  }
}

TEST_CASE("validation rejects bad inputs") {
  auto p = fixtures::set_b();
  p.mass = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = fixtures::set_b();
  p.kappa = 1e6;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = fixtures::set_b();
  p.finesse.reset();
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = fixtures::set_b();
  p.quality = 0.5;
  CHECK_THROWS_AS(model::derive_constants(p), InvalidArgument);
}

TEST_CASE("steady-state cubic: degenerate cases") {
  auto undriven = model::steady_state_branches(0.75, 1.3, 1e-5, 0.0);
  REQUIRE(undriven.size() == 1);
  CHECK(undriven[0].alpha_s_sq == 0.0);
  CHECK(undriven[0].effective_detuning == 1.3);

  auto free = model::steady_state_branches(0.75, 1.3, 0.0, 100.0);
  REQUIRE(free.size() == 1);
  CHECK(free[0].alpha_s_sq == Approx(1e4 / (0.75 * 0.75 + 1.3 * 1.3)).epsilon(1e-14));
  CHECK(free[0].effective_detuning == 1.3);
}

TEST_CASE("steady-state branches satisfy both defining relations") {
  // Scan into the bistable region.
  for (double d0 : {-1.0, 0.5, 2.0, 4.0, 8.0}) {
    for (double drive : {1e3, 1e4, 3e4}) {
      const double k = 0.4, g0 = 1e-4;
      const auto branches = model::steady_state_branches(k, d0, g0, drive);
      REQUIRE(!branches.empty());
      for (std::size_t i = 0; i < branches.size(); ++i) {
        const auto& b = branches[i];
        const double delta = b.effective_detuning;
        CHECK(std::abs(delta - (d0 - g0 * g0 * b.alpha_s_sq)) <= 1e-10 * std::max(1.0, std::abs(d0)));
        const double rhs = drive * drive / (k * k + delta * delta);
        CHECK(std::abs(b.alpha_s_sq - rhs) <= 1e-10 * rhs);
        if (i > 0) CHECK(b.alpha_s_sq > branches[i - 1].alpha_s_sq);
      }
    }
  }
  CHECK(model::steady_state_branches(0.4, 8.0, 1e-4, 3e4).size() == 3);
}

TEST_CASE("bare detuning round trip reproduces Delta = omega_m") {
  const auto eff = model::derive_constants(fixtures::set_b());
  auto p = fixtures::set_b();
  p.detuning = eff.detuning0_si;
  p.detuning_kind = model::DetuningKind::Bare;
  const auto branches = model::classical_steady_state(p);
  bool found = false;
  for (const auto& b : branches) {
    if (std::abs(b.effective_detuning / p.omega_m - 1.0) < 1e-10) found = true;
  }
  CHECK(found);
  const auto bare = model::derive_constants(p);
  CHECK(bare.detuning == Approx(1.0).epsilon(1e-10));
  CHECK(bare.coupling == Approx(eff.coupling).epsilon(1e-9));
}

TEST_CASE("classical steady state requires the bare form") {
  CHECK_THROWS_AS(model::classical_steady_state(fixtures::set_b()), InvalidArgument);
}
