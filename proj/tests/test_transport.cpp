#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gbbm/error.hpp"
#include "gbbm/transport.hpp"

using namespace gbbm;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("set membership") {
    CHECK(set_contains(SobolevBall{1.0, 10.0}, SpectralField(4)));
    CHECK_FALSE(set_contains(HalfSpace{1, Component::re, 0.0}, SpectralField::single_mode(4, 1, 1.0)));
    CHECK(set_contains(HalfSpace{1, Component::im, 0.0}, SpectralField::single_mode(4, 1, 1.0)));
    CHECK(set_contains(HalfSpace{9, Component::re, 0.0}, SpectralField::single_mode(4, 1, 1.0)));

    const MeasureSpec spec{1, 2.0, 8};
    for (std::uint64_t i = 0; i < 50; ++i) {
      const SpectralField u = sample_mu_s(spec, sample_seed(11, i));
      const SobolevBall ball{1.0, 0.3};
      CHECK(set_contains(ball, u) == set_contains(ball, free_evolution(u, 2.0, 0.7 * i)));
    }
  }

  TEST_CASE("radon-nikodym weight") {
    const GbbmParams p(2.0, 1, 4);
    const SpectralField u = sample_mu_s(MeasureSpec{1, 2.0, 4}, 3);
    CHECK(radon_nikodym_weight(u, p, 0.0, 1e-2) == 1.0);
    CHECK(std::abs(radon_nikodym_weight(u, p.linear(), 0.8, 1e-2) - 1.0) < 1e-12);

    const double t = 0.5, dt = 1e-3;
    const double forward = radon_nikodym_weight(u, p, t, dt);
    const double back = radon_nikodym_weight(flow_map(u, p, t, dt), p, -t, dt);
    CHECK(std::abs(forward * back - 1.0) < 1e-8);

    const double w1 = radon_nikodym_weight(u, p, 0.3, dt);
    const double w2 = radon_nikodym_weight(flow_map(u, p, 0.3, dt), p, 0.2, dt);
    CHECK(std::abs(radon_nikodym_weight(u, p, 0.5, dt) - w1 * w2) < 1e-6);
  }

  TEST_CASE("estimators at t = 0 reduce to the plain estimate") {
    const MeasureSpec spec{1, 2.0, 4, 20.0};
    const GbbmParams p(2.0, 1, 4);
    const TransportRun run{0.0, 1e-2, 2000, 5, 0};
    const SetSpec ball = SobolevBall{1.0, 1.0};
    const EstimateWithError plain = plain_probability(ball, spec, run);
    const EstimateWithError direct = transported_probability_direct(ball, spec, p, run);
    const EstimateWithError weighted = transported_probability_weighted(ball, spec, p, run);
    CHECK(direct.value == plain.value);
    CHECK(weighted.value == plain.value);
    CHECK(plain.value > 0.0);
    CHECK(plain.value < 1.0);

    const MeasureSpec open{1, 2.0, 4};
    const EstimateWithError everything = transported_probability_direct(SobolevBall{1.0, kInf}, open, p, run);
    CHECK(everything.value == 1.0);
    CHECK(everything.std_error == 0.0);
  }

  TEST_CASE("estimator preconditions") {
    const MeasureSpec spec{1, 2.0, 4};
    const TransportRun small{0.1, 1e-2, 999, 0, 0};
    CHECK_THROWS_AS(transported_probability_direct(SobolevBall{}, spec, GbbmParams(2.0, 1, 4), small), DomainError);
    const TransportRun run{0.1, 1e-2, 1000, 0, 0};
    CHECK_THROWS_AS(transported_probability_weighted(SobolevBall{}, spec, GbbmParams(2.0, 1, 8), run), DomainError);
  }

  TEST_CASE("estimators are worker independent") {
    const MeasureSpec spec{1, 2.0, 4, 20.0};
    const GbbmParams p(2.0, 1, 4);
    TransportRun run{0.3, 1e-2, 1000, 9, 1};
    const double one = transported_probability_weighted(SobolevBall{1.0, 1.0}, spec, p, run).value;
    run.workers = 4;
    CHECK(transported_probability_weighted(SobolevBall{1.0, 1.0}, spec, p, run).value == one);
  }

  TEST_CASE("yudovich bound") {
    CHECK(yudovich_bound(1.0, 1.0, 1.0, 0.5) == doctest::Approx(std::exp(std::numbers::e * std::sqrt(2.0))));
    CHECK(yudovich_bound(1.0, 1.0, 1.0, 0.5) == doctest::Approx(46.71).epsilon(1e-3));
    CHECK(yudovich_bound(std::exp(-2.0), 1.0, 1.0, 0.5) == doctest::Approx(31.08).epsilon(1e-3));
    CHECK(yudovich_bound(0.25, 0.0, 1.0, 0.5) == 0.25);
    CHECK_THROWS_AS(yudovich_bound(0.0, 1.0, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(yudovich_bound(1.5, 1.0, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(yudovich_bound(0.5, 1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(yudovich_bound(0.5, -1.0, 1.0, 0.5), DomainError);
  }

  TEST_CASE("holder check") {
    const std::vector<double> one{1.0};
    CHECK(holder_exponent_check(one, 1.0, 1.0, 0.5, 0.1).ok);

    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(std::exp(-k));
    const HolderCheck h = holder_exponent_check(grid, 1.0, 1.0, 0.5, 0.1);
    CHECK(h.ok);
    CHECK(std::isfinite(h.log_c_tilde));
    CHECK(h.log_c_grid <= h.log_c_tilde);

    // Oracle: brute-force maximum of the log ratio over a fine k grid.
    double brute = -kInf;
    for (int i = 0; i <= 2000000; ++i) {
      const double k = i * 1e-3;
      brute = std::max(brute, std::numbers::e * std::sqrt(2.0 + k) - 0.1 * k);
    }
    CHECK(h.log_c_tilde == doctest::Approx(brute).epsilon(1e-9));

    CHECK_FALSE(holder_exponent_check(grid, 1.0, 1.0, 0.5, 0.0).ok);
    CHECK(holder_exponent_check(grid, 1.0, 1.0, 1.0, 0.0).ok);

    for (double delta : {0.05, 0.1, 0.2}) {
      std::vector<double> fine;
      for (int k = 0; k <= 400; ++k) fine.push_back(std::exp(-0.5 * k));
      CHECK(holder_exponent_check(fine, 1.0, 1.0, 0.05, delta).ok);
    }
  }

  TEST_CASE("singular partial sums") {
    const double gamma = 1.4, t = 1.0;
    const std::vector<int> n_list{1, 2, 3, 10};
    const std::vector<double> sums = singular_partial_sums(gamma, 1, t, n_list);
    // Oracle: n^{2(s+γ/2)}|ĥ(n)|² = 1, so the summand is |e^{-itω_n} - 1|² = 4 sin²(tω_n/2).
    auto summand = [&](int n) {
      const double w = n / (1.0 + std::pow(n, gamma));
      return 4.0 * std::pow(std::sin(t * w / 2.0), 2);
    };
    double acc = 0.0;
    std::size_t j = 0;
    for (int n = 1; n <= 10; ++n) {
      acc += summand(n);
      if (n == n_list[j]) CHECK(sums[j++] == doctest::Approx(acc).epsilon(1e-12));
    }

    std::vector<int> geometric;
    for (int k = 6; k <= 14; ++k) geometric.push_back(1 << k);
    const std::vector<double> growth = singular_partial_sums(gamma, 1, t, geometric);
    for (std::size_t i = 1; i < growth.size(); ++i) CHECK(growth[i] > growth[i - 1]);
    CHECK(std::abs(increment_growth_exponent(geometric, growth) - (3.0 - 2.0 * gamma)) < 0.05);

    // Outside the window the sums converge: dyadic increments shrink like N^{3-2γ}.
    const std::vector<double> tame = singular_partial_sums(1.6, 1, t, geometric, false);
    CHECK(increment_growth_exponent(geometric, tame) == doctest::Approx(3.0 - 2.0 * 1.6).epsilon(0.25));
    for (std::size_t i = 2; i < tame.size(); ++i) CHECK(tame[i] - tame[i - 1] < tame[i - 1] - tame[i - 2]);

    CHECK_THROWS_AS(singular_partial_sums(1.6, 1, t, geometric), DomainError);
    CHECK_THROWS_AS(singular_partial_sums(1.3, 1, t, geometric), DomainError);
    CHECK_THROWS_AS(singular_partial_sums(1.4, 1, 0.0, geometric), DomainError);
  }

  TEST_CASE("witness pairing grows logarithmically") {
    std::vector<int> geometric;
    for (int k = 8; k <= 16; ++k) geometric.push_back(1 << k);
    const std::vector<double> pairing = singular_witness_pairing(1.4, 1, 1.0, geometric);
    // Summand ≈ t/n for large n, so each doubling adds about t log 2.
    for (std::size_t i = 1; i < pairing.size(); ++i) {
      const double step = pairing[i] - pairing[i - 1];
      CHECK(step > 0.0);
      CHECK(step == doctest::Approx(std::log(2.0)).epsilon(0.1));
    }
  }

  TEST_CASE("increment growth exponent") {
    const std::vector<int> n{2, 4, 8, 16, 32};
    std::vector<double> s;
    for (int x : n) s.push_back(5.0 + 3.0 * std::pow(x, 0.5));
    CHECK(increment_growth_exponent(n, s) == doctest::Approx(0.5));
  }
}
