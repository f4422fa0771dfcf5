#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gbbm/error.hpp"
#include "gbbm/flow.hpp"
#include "helpers.hpp"

using namespace gbbm;
using gbbm::testing::max_abs_diff;
using gbbm::testing::random_field;

namespace {

const double kPi = std::numbers::pi;

SpectralField scaled_to(SpectralField u, double sigma, double norm) {
  u *= norm / sobolev_norm(u, sigma);
  return u;
}

double hs_distance(const SpectralField& a, const SpectralField& b, double sigma) { return sobolev_norm(a - b, sigma); }

SpectralField smooth_field(int n_max) {
  std::vector<Complex> c(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) c[n - 1] = 0.5 * std::pow(n, -4.0);
  return SpectralField(std::move(c));
}

}  // namespace

TEST_SUITE("flow") {
  TEST_CASE("params validation and phase speeds") {
    CHECK_THROWS_AS(GbbmParams(1.0, 1, 4), DomainError);
    CHECK_THROWS_AS(GbbmParams(2.0, 0, 4), DomainError);
    CHECK_THROWS_AS(GbbmParams(2.0, 1, 0), DomainError);
    const GbbmParams p(1.4, 1, 100);
    for (int n = 1; n <= 100; ++n) {
      CHECK(p.phase_speed(n) > 0.0);
      CHECK(p.phase_speed(n) <= 1.0);
    }
    CHECK(GbbmParams(2.0, 1, 4).phase_speed(1) == 0.5);
  }

  TEST_CASE("free evolution") {
    const SpectralField one = SpectralField::single_mode(1, 1, 1.0);
    const Complex phase = free_evolution(one, 2.0, kPi)[1];
    CHECK(std::abs(phase - Complex(0.0, -1.0)) < 1e-15);
    const SpectralField u = random_field(40, 3);
    CHECK(free_evolution(u, 1.7, 0.0) == u);
    const SpectralField v = free_evolution(u, 1.7, 3.3);
    for (double sigma : {0.0, 1.0, 2.0})
      CHECK(sobolev_norm(v, sigma) == doctest::Approx(sobolev_norm(u, sigma)).epsilon(1e-14));
  }

  TEST_CASE("vector field") {
    const GbbmParams p(2.0, 1, 2);
    const SpectralField r = gbbm_rhs(SpectralField::single_mode(2, 1, 1.0), p);
    CHECK(std::abs(r[1] - Complex(0.0, -0.5)) < 1e-15);
    CHECK(std::abs(r[2] - Complex(0.0, -0.4)) < 1e-15);
    CHECK(gbbm_rhs(SpectralField(2), p).is_zero());
    CHECK_THROWS_AS(gbbm_rhs(SpectralField::single_mode(3, 3, 1.0), p), DomainError);
  }

  TEST_CASE("vector field matches the direct convolution oracle") {
    for (int n : {8, 31, 32, 48}) {
      const GbbmParams p(1.6, 1, n);
      const SpectralField u = random_field(n, 100 + n);
      const SpectralField r = gbbm_rhs(u, p);
      const auto conv = gbbm::testing::direct_convolution(u, u, n);
      double worst = 0.0;
      for (int k = 1; k <= n; ++k) {
        const Complex expected = Complex(0.0, -p.phase_speed(k)) * (u[k] + conv[k - 1]);
        worst = std::max(worst, std::abs(r[k] - expected));
      }
      CHECK(worst < 1e-12);
    }
  }

  TEST_CASE("conserved quantity is stationary along the vector field") {
    CHECK(conserved_quantity(SpectralField::single_mode(1, 1, 1.0), 2.0) == doctest::Approx(8 * kPi));
    CHECK(conserved_quantity(SpectralField(3), 2.0) == 0.0);
    for (double gamma : {1.4, 2.0, 2.5}) {
      const GbbmParams p(gamma, 1, 24);
      const SpectralField u = random_field(24, 7);
      const SpectralField r = gbbm_rhs(u, p);
      double rate = 0.0;
      for (int n = 1; n <= 24; ++n) rate += (1 + std::pow(n, gamma)) * (std::conj(u[n]) * r[n]).real();
      CHECK(std::abs(8 * kPi * rate) < 1e-12 * conserved_quantity(u, gamma));
    }
  }

  TEST_CASE("integrate basics") {
    const GbbmParams p(2.0, 1, 8);
    const SpectralField u = random_field(8, 5);
    const Trajectory zero = integrate(u, p, 0.0, 1e-2);
    CHECK(zero.size() == 1);
    CHECK(zero.final_state() == u);

    const Trajectory fwd = integrate(u, p, 0.35, 0.1);
    CHECK(fwd.size() == 5);
    CHECK(fwd.times.back() == 0.35);
    for (std::size_t k = 1; k < fwd.size(); ++k) CHECK(fwd.times[k] > fwd.times[k - 1]);
    CHECK(fwd.states.size() == fwd.conserved_log.size());
    CHECK(fwd.energy_log.size() == fwd.times.size());

    const Trajectory back = integrate(u, p, -0.35, 0.1);
    for (std::size_t k = 1; k < back.size(); ++k) CHECK(back.times[k] < back.times[k - 1]);
    CHECK_THROWS_AS(integrate(u, p, 1.0, 0.0), DomainError);
  }

  TEST_CASE("flow reversibility") {
    const GbbmParams p(2.0, 1, 16);
    const SpectralField u = random_field(16, 9);
    const SpectralField there = flow_map(u, p, 1.0, 1e-3);
    const SpectralField back = flow_map(there, p, -1.0, 1e-3);
    CHECK(max_abs_diff(back, u) < 1e-8);
  }

  TEST_CASE("fourth order self-convergence") {
    const GbbmParams p(1.5, 1, 8);
    const SpectralField u = scaled_to(random_field(8, 13), 0.0, 1.5);
    const SpectralField a = flow_map(u, p, 2.0, 0.2);
    const SpectralField b = flow_map(u, p, 2.0, 0.1);
    const SpectralField c = flow_map(u, p, 2.0, 0.05);
    const double ratio = hs_distance(a, b, 0.0) / hs_distance(b, c, 0.0);
    CHECK(ratio == doctest::Approx(16.0).epsilon(3.0 / 16.0));
  }

  TEST_CASE("conservation over a moderate run") {
    const GbbmParams p(2.0, 1, 32);
    const Trajectory traj = integrate(random_field(32, 17, 1.5), p, 2.0, 1e-3);
    CHECK(traj.max_relative_drift() < 1e-8);
    CHECK_FALSE(traj.flagged);
    const Trajectory strict = integrate(random_field(32, 17, 1.5), p, 2.0, 0.5, IntegrateOptions{1e-30});
    CHECK(strict.flagged);
  }

  TEST_CASE("overflow is reported with its time") {
    const GbbmParams p(2.0, 1, 4);
    const SpectralField huge = SpectralField::single_mode(4, 1, 1e150);
    try {
      integrate(huge, p, 10.0, 1.0);
      FAIL("expected FlowError");
    } catch (const FlowError& e) {
      CHECK(e.time() > 0.0);
      CHECK(e.time() <= 10.0);
    }
  }

  TEST_CASE("galerkin flow splits off the free tail") {
    const GbbmParams p(2.0, 1, 8);
    const SpectralField u = random_field(24, 19, 2.0);
    const SpectralField out = galerkin_flow(u, p, 0.7, 1e-3);
    const SpectralField head = flow_map(u.resized(8), p, 0.7, 1e-3);
    const SpectralField tail = free_evolution(u - dirichlet_project(u, 8), 2.0, 0.7);
    CHECK(max_abs_diff(out, head.resized(24) + tail) < 1e-15);
  }

  TEST_CASE("nesting: backward coarse flow undoes the forward fine flow as N grows") {
    const SpectralField u0 = smooth_field(128);
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {8, 16, 32}) {
      const SpectralField fine = galerkin_flow(u0, GbbmParams(2.0, 1, 2 * n), 1.0, 1e-3);
      const SpectralField back = galerkin_flow(fine, GbbmParams(2.0, 1, n), -1.0, 1e-3);
      const double err = hs_distance(back, u0, 1.0);
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("picard solver") {
    const GbbmParams p(2.0, 1, 8);
    const PicardResult zero = picard_local_solve(SpectralField(8), p, 0.05, 1e-12, 50);
    CHECK(zero.state.is_zero());

    const SpectralField u0 = scaled_to(random_field(8, 23), 1.0, 0.9);
    const double tau = 0.05;
    REQUIRE(tau <= picard_time_limit(u0, p));
    const PicardResult res = picard_local_solve(u0, p, tau, 1e-13, 60);
    CHECK(max_abs_diff(res.state, flow_map(u0, p, tau, 1e-4)) < 1e-7);
    REQUIRE(res.distances.size() >= 3);
    for (std::size_t k = 1; k < res.distances.size(); ++k) {
      if (res.distances[k - 1] < 1e-13) break;
      CHECK(res.distances[k] <= 0.5 * res.distances[k - 1]);
    }
  }

  TEST_CASE("picard reports non-contraction") {
    const GbbmParams p(2.0, 1, 8);
    const SpectralField u0 = scaled_to(random_field(8, 29), 1.0, 50.0);
    try {
      picard_local_solve(u0, p, 20.0, 1e-12, 6);
      FAIL("expected PicardError");
    } catch (const PicardError& e) {
      CHECK(e.distances().size() == 6);
    }
  }

  TEST_CASE("divergence vanishes mode by mode") {
    CHECK(divergence_diagnostic(SpectralField(8), GbbmParams(2.0, 1, 8)) == 0.0);
    for (double gamma : {1.4, 1.7, 2.0}) {
      const GbbmParams p(gamma, 1, 8);
      const SpectralField u = random_field(8, 31, 0.5);
      CHECK(divergence_diagnostic(u, p) < 1e-8);
    }
  }

  TEST_CASE("individual diagonal partials follow the (2n, -n) interaction") {
    const GbbmParams p(2.0, 1, 8);
    const SpectralField u = random_field(8, 37, 0.5);
    const auto partials = diagonal_partials(u, p);
    for (int n = 1; n <= 8; ++n) {
      const double expected = 2.0 * p.phase_speed(n) * u[2 * n].imag();
      CHECK(std::abs(partials[n - 1].first - expected) < 1e-8);
      CHECK(std::abs(partials[n - 1].second + expected) < 1e-8);
    }
    CHECK(std::abs(partials[0].first) > 1e-3);
  }

  TEST_CASE("linearized flow") {
    const GbbmParams p(2.0, 1, 8);
    const SpectralField v0 = random_field(8, 41);
    const Trajectory rest = integrate(SpectralField(8), p, 0.8, 1e-2);
    CHECK(max_abs_diff(linearized_flow(rest, v0).final_state(), free_evolution(v0, 2.0, 0.8)) < 1e-10);

    const SpectralField u0 = random_field(8, 43);
    const Trajectory base = integrate(u0, p, 0.8, 1e-3);
    const SpectralField lin = linearized_flow(base, v0).final_state();
    CHECK(max_abs_diff(linearized_flow(base, 3.0 * v0).final_state(), 3.0 * lin) < 1e-12);

    const double eps = 1e-5;
    const SpectralField fd = (1.0 / eps) * (flow_map(u0 + eps * v0, p, 0.8, 1e-3) - base.final_state());
    CHECK(max_abs_diff(fd, lin) < 50 * eps);

    const Trajectory coarse = integrate(u0, p, 10.0, 5.0);
    CHECK_THROWS_AS(linearized_flow(coarse, v0), ResolutionError);
  }

  TEST_CASE("jacobian determinant") {
    const GbbmParams p(2.0, 1, 4);
    const SpectralField u0 = random_field(4, 47);
    CHECK(jacobian_determinant(u0, p, 0.0, 1e-2) == 1.0);
    CHECK(std::abs(jacobian_determinant(u0, p, 1.0, 1e-3) - 1.0) < 1e-6);
    const double fwd = jacobian_determinant(u0, p, 1.3, 1e-3);
    const double bwd = jacobian_determinant(flow_map(u0, p, 1.3, 1e-3), p, -1.3, 1e-3);
    CHECK(std::abs(fwd * bwd - 1.0) < 1e-6);
    for (int n : {2, 6, 8}) {
      const GbbmParams q(1.4, 1, n);
      CHECK(std::abs(jacobian_determinant(random_field(n, 53), q, 2.0, 1e-3) - 1.0) < 1e-6);
    }
    CHECK_THROWS_AS(jacobian_determinant(random_field(21, 1), GbbmParams(2.0, 1, 21), 1.0, 1e-2), DomainError);
  }

  TEST_CASE("forced linear flow") {
    const SpectralField h = random_field(20, 59);
    CHECK(forced_linear_flow(h, 1.5, 0.0).is_zero());
    const double t = 1.7;
    const SpectralField f = forced_linear_flow(h, 1.5, t);
    const GbbmParams p(1.5, 1, 20);
    for (int n = 1; n <= 20; ++n) {
      const double w = p.phase_speed(n);
      CHECK(std::abs(f[n]) == doctest::Approx(2 * std::abs(h[n]) * std::abs(std::sin(t * w / 2))).epsilon(1e-13));
      // Duhamel: -iω ĥ ∫_0^t e^{-i(t-τ)ω} dτ by composite Simpson.
      const int m = 2000;
      Complex integral{};
      for (int j = 0; j <= m; ++j) {
        const double tau = t * j / m;
        const double weight = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        integral += weight * std::polar(1.0, -(t - tau) * w);
      }
      integral *= t / (3.0 * m);
      CHECK(std::abs(f[n] - Complex(0.0, -w) * h[n] * integral) < 1e-10);
    }
    const SpectralField one = forced_linear_flow(SpectralField::single_mode(1, 1, 1.0), 2.0, 2 * kPi);
    CHECK(std::abs(one[1] - Complex(-2.0, 0.0)) < 1e-14);
  }

  TEST_CASE("DK(t) columns match finite differences") {
    const GbbmParams p(2.0, 1, 8);
    const SpectralField u0 = random_field(8, 61);
    const SpectralField v0 = random_field(8, 67);
    const double t = 0.4;
    const Trajectory base = integrate(u0, p, t, 1e-3);
    const SpectralField dk = dk_apply(base, v0);
    const double eps = 1e-5;
    const SpectralField moved = flow_map(u0 + eps * v0, p, t, 1e-3);
    const SpectralField fd = free_evolution((1.0 / eps) * (moved - base.final_state()), 2.0, -t) - v0;
    CHECK(max_abs_diff(dk, fd) < 50 * eps);
  }

  TEST_CASE("hilbert-schmidt diagnostics") {
    const GbbmParams p(2.0, 2, 16);
    // Zero data: the linearized flow is free, so only RK4 phase error remains.
    CHECK(dk_hilbert_schmidt(SpectralField(16), p, 0.3, 8) < 1e-12);
    CHECK(dk_hilbert_schmidt(smooth_field(16), p, 0.0, 8) == 0.0);

    const std::vector<int> dims{2, 4, 8, 16};
    const DkPartialSums one = dk_partial_sums(smooth_field(16), p, 0.3, dims, 1e-3, 1);
    const DkPartialSums many = dk_partial_sums(smooth_field(16), p, 0.3, dims, 1e-3, 4);
    CHECK(one.hs_squared == many.hs_squared);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      CHECK(one.hs_norm[i] == doctest::Approx(std::sqrt(one.hs_squared[i])));
      if (i > 0) CHECK(one.hs_squared[i] >= one.hs_squared[i - 1]);
    }
    CHECK(dk_hilbert_schmidt(smooth_field(16), p, 0.3, 8) == doctest::Approx(one.hs_norm[2]).epsilon(1e-12));
  }
}
