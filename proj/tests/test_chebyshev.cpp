#include <doctest.h>

#include <cmath>
#include <numbers>

#include "signmat/chebyshev.hpp"
#include "signmat/rng.hpp"
#include "signmat/sign_matrix.hpp"
#include "signmat/spectral.hpp"

using namespace signmat;

namespace {

SignMatrix all_ones(int p, int n) {
  return sign_matrix_from_entries(
      p, n, std::vector<std::int8_t>(static_cast<std::size_t>(p) * n, 1));
}

}  // namespace

TEST_CASE("cheb_u base cases and values at 1") {
  for (double x : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
    CHECK(cheb_u(0, x) == 1.0);
    CHECK(cheb_u(1, x) == 2.0 * x);
  }
  CHECK(cheb_u(2, 1.0) == 3.0);  // 2*1*2 - 1
  for (int l = 0; l <= 50; ++l)
    CHECK(cheb_u(l, 1.0) == doctest::Approx(l + 1.0).epsilon(1e-12));
}

TEST_CASE("trigonometric form matches the recurrence") {
  const auto [lhs0, rhs0] = cheb_u_trig_check(0, std::numbers::pi / 3);
  CHECK(lhs0 == doctest::Approx(std::sin(std::numbers::pi / 3)).epsilon(1e-15));
  CHECK(rhs0 == doctest::Approx(std::sin(std::numbers::pi / 3)).epsilon(1e-15));

  const auto [lhs3, rhs3] = cheb_u_trig_check(3, std::numbers::pi / 7);
  CHECK(std::abs(lhs3 - rhs3) <= 1e-10);
  const auto [lhs10, rhs10] = cheb_u_trig_check(10, 1.0);
  CHECK(std::abs(lhs10 - rhs10) <= 1e-9);

  for (int l = 0; l <= 30; ++l)
    for (int k = 0; k < 1000; ++k) {
      const double theta = std::numbers::pi * (k + 0.5) / 1000.0;
      const auto [lhs, rhs] = cheb_u_trig_check(l, theta);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (l + 1));
    }

  CHECK_THROWS_AS(cheb_u_trig_check(3, std::numbers::pi), std::domain_error);
  CHECK_THROWS_AS(cheb_u_trig_check(3, 0.0), std::domain_error);
}

TEST_CASE("shifted polynomial base cases and one recurrence step") {
  ShiftedChebParams params{0.5, 0.25, 0.75, 0};
  for (double mu : {-2.0, 0.0, 1.0, 3.5}) {
    params.degree = 0;
    CHECK(shifted_p(params, mu) == 1.0);
    params.degree = 1;
    CHECK(shifted_p(params, mu) == mu);
  }
  params.degree = 2;
  CHECK(shifted_p(params, 0.0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(shifted_p(params, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("closed form collapses correctly and matches the recurrence") {
  ShiftedChebParams params{0.5, 0.25, 0.75, 1};
  for (double mu : {-1.0, 0.3, 2.0})
    CHECK(shifted_p_via_cheb(params, mu) == doctest::Approx(mu).epsilon(1e-14));
  params.degree = 2;
  CHECK(shifted_p_via_cheb(params, 1.0) ==
        doctest::Approx(0.25).epsilon(1e-13));

  Xoshiro256ss rng(123);
  for (int draw = 0; draw < 1000; ++draw) {
    const int n = 2 + static_cast<int>(rng.next() % 99);
    const int p = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - 1));
    const int l = static_cast<int>(rng.next() % 31);
    const double mu = -10.0 + 20.0 * rng.next_unit();
    const auto draw_params = ShiftedChebParams::from_dims(p, n, l);
    const double a = shifted_p(draw_params, mu);
    const double b = shifted_p_via_cheb(draw_params, mu);
    CHECK(std::abs(a - b) <= 1e-8 * (1.0 + std::max(std::abs(a), std::abs(b))));
  }

  const auto degenerate = ShiftedChebParams::from_dims(1, 5, 3);
  CHECK_THROWS_AS(shifted_p_via_cheb(degenerate, 0.5), std::domain_error);
}

TEST_CASE("parameter invariants from dimensions") {
  for (int n = 2; n <= 60; ++n)
    for (int p = 2; p <= n; ++p) {
      const auto params = ShiftedChebParams::from_dims(p, n, 4);
      CHECK(params.y >= params.y2);
      CHECK(params.y2 >= params.y1);
      CHECK(params.y1 == params.y - 2.0 / n);
      CHECK(params.y1 ==
            doctest::Approx(static_cast<double>(p - 2) / n).epsilon(1e-14));
    }
  CHECK_THROWS_AS(ShiftedChebParams::from_dims(9, 7, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ShiftedChebParams::from_dims(2, 2, -1),
                  std::invalid_argument);
}

TEST_CASE("t_sequence boundary traces and the 2x2 closed case") {
  for (std::uint64_t seed : {3ULL, 4ULL}) {
    const SignMatrix x = gen_sign_matrix(6, 10, seed);
    const TraceSequence seq = t_sequence(x, 5);
    CHECK(seq.normalized[0] == 6.0);
    CHECK(seq.normalized[1] == 0.0);
  }
  // X of all ones at p = n = 2: T = [[0,1],[1,0]], y1 = 0, y2 = 1/4,
  // T(2) = T^2 - I/4 = (3/4) I.
  const TraceSequence seq = t_sequence(all_ones(2, 2), 2);
  CHECK(seq.unnormalized(2) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("matrix and spectral trace routes agree") {
  Xoshiro256ss rng(2026);
  for (int k = 0; k < 10; ++k) {
    const int n = 4 + static_cast<int>(rng.next() % 29);
    const int p = 4 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - 3));
    const SignMatrix x = gen_sign_matrix(p, n, rng.next());
    const int max_l = 12;
    const TraceSequence dense = t_sequence(x, max_l);
    const std::vector<double> mu = symmetric_eigenvalues(t_matrix(x));
    auto params = dense.params;
    for (int l = 0; l <= max_l; ++l) {
      params.degree = l;
      double sum = 0.0, sum_abs = 0.0;
      for (const double m : mu) {
        const double value = shifted_p(params, m);
        sum += value;
        sum_abs += std::abs(value);
      }
      CHECK(std::abs(dense.unnormalized(l) - sum) <=
            1e-8 * (1.0 + sum_abs));
    }
    const TraceSequence spectral = t_sequence_spectral(x, max_l);
    for (int l = 0; l <= max_l; ++l)
      CHECK(spectral.normalized[static_cast<std::size_t>(l)] ==
            doctest::Approx(dense.normalized[static_cast<std::size_t>(l)])
                .epsilon(1e-9));
  }
}

TEST_CASE("t_sequence guards degree and overflow") {
  const SignMatrix x = gen_sign_matrix(3, 5, 1);
  CHECK_THROWS_AS(t_sequence(x, 201), std::invalid_argument);
  CHECK_THROWS_AS(t_sequence(x, -1), std::invalid_argument);
  // Identical rows put the eigenvalue p - 1 far outside the bulk, so the
  // normalized trace grows geometrically and must trip the range guard.
  CHECK_THROWS_AS(t_sequence(all_ones(64, 64), 200), std::range_error);
  CHECK_THROWS_AS(t_sequence_spectral(all_ones(64, 64), 200),
                  std::range_error);
}

TEST_CASE("polynomial lower bound: closed values and quadratic vertex") {
  CHECK(bound_ch1(2, 1.0) == -4.0);
  CHECK_THROWS_AS(bound_ch1(3, 0.5), std::domain_error);
  CHECK_THROWS_AS(bound_ch1(0, 0.5), std::domain_error);
  CHECK_THROWS_AS(bound_ch1(2, 0.0), std::domain_error);
  CHECK_THROWS_AS(bound_ch1(2, 1.5), std::domain_error);

  // Vertex of p_2: minimum over mu is -y2 - y1^2/4, which must respect the
  // universal bound -4y.
  for (int n = 2; n <= 40; ++n)
    for (int p = 2; p <= n; ++p) {
      const auto params = ShiftedChebParams::from_dims(p, n, 2);
      const double vertex_min = -params.y2 - params.y1 * params.y1 / 4.0;
      CHECK(vertex_min >= bound_ch1(2, params.y));
      CHECK(shifted_p(params, params.y1 / 2.0) ==
            doctest::Approx(vertex_min).epsilon(1e-13));
    }
}

TEST_CASE("sampled polynomial values respect the lower bound") {
  Xoshiro256ss rng(55);
  for (int iy = 1; iy <= 10; ++iy) {
    const int n = 100;
    const int p = 10 * iy;
    for (int l = 2; l <= 20; l += 2) {
      const auto params = ShiftedChebParams::from_dims(p, n, l);
      const double floor_value = bound_ch1(l, params.y);
      for (int s = 0; s < 1000; ++s) {
        const double mu = -10.0 + 20.0 * rng.next_unit();
        CHECK(shifted_p(params, mu) >= floor_value);
      }
    }
  }
}

TEST_CASE("growth floor bound_ch2") {
  ShiftedChebParams unit{0.0, 1.0, 1.0, 2};
  CHECK(bound_ch2(2, 1.0, unit, 2.0) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  // C -> infinity sends the exponential factor to 1.
  ShiftedChebParams params = ShiftedChebParams::from_dims(8, 16, 4);
  CHECK(bound_ch2(4, 0.5, params, 1e18) ==
        doctest::Approx(std::pow(params.y2, 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(bound_ch2(4, 0.5, params, 0.0), std::domain_error);
  CHECK_THROWS_AS(bound_ch2(4, 0.5, params, -1.0), std::domain_error);
  CHECK_THROWS_AS(bound_ch2(3, 0.5, params, 1.0), std::domain_error);
  CHECK_THROWS_AS(bound_ch2(4, 1.5, params, 1.0), std::domain_error);
}

TEST_CASE("eps admissibility window") {
  CHECK(trgeq_condition(100, 10, 0.5, 1.0, 0.001));
  CHECK_FALSE(trgeq_condition(100, 10, 0.5, 1.5, 0.001));
  CHECK_FALSE(trgeq_condition(100, 10, 0.5, 0.0, 0.001));
  CHECK_THROWS_AS(trgeq_condition(4, 10, 0.5, 0.5, 1.0),
                  std::invalid_argument);
}

TEST_CASE("trace ceiling closed values") {
  CHECK(trace_upper_bound(2, 1.0) == doctest::Approx(1024.0).epsilon(1e-15));
  CHECK(trace_upper_bound(2, 0.25) == doctest::Approx(8192.0).epsilon(1e-13));
  CHECK_THROWS_AS(trace_upper_bound(0, 0.5), std::domain_error);
  CHECK_THROWS_AS(trace_upper_bound(2, 1.5), std::domain_error);
}

TEST_CASE("fitted growth constant makes the floor hold on its grid") {
  std::vector<std::pair<int, int>> dims = {{4, 8}, {8, 16}, {16, 32}, {50, 100}};
  std::vector<int> degrees = {2, 4, 8, 12, 20};
  std::vector<double> epsilons = {0.25, 0.5, 1.0};
  const Ch2FitResult fit = fit_ch2_constant(dims, degrees, epsilons);
  CHECK(fit.C > 0.0);
  CHECK(fit.points == static_cast<int>(dims.size() * degrees.size() *
                                       epsilons.size()));
  for (const auto& [p, n] : dims)
    for (const int l : degrees)
      for (const double eps : epsilons) {
        const auto params = ShiftedChebParams::from_dims(p, n, l);
        const double mu = params.y1 + 2.0 * std::sqrt(params.y2) + eps;
        CHECK(shifted_p(params, mu) >=
              bound_ch2(l, eps, params, fit.C) * (1.0 - 1e-12));
      }
}

TEST_CASE("constructed escape matrix forces trace growth") {
  // Identical rows: T has the eigenvalue p - 1 = 5 while y = 3/4, a clear
  // escape; the admissibility window holds at l = 2, eps = 1.
  const int p = 6, n = 8, l = 2;
  const double eps = 1.0;
  const SignMatrix x = all_ones(p, n);
  const double y = 0.75;
  const std::vector<double> mu = symmetric_eigenvalues(t_matrix(x));
  double excursion = 0.0;
  for (const double m : mu) excursion = std::max(excursion, std::abs(m - y));
  CHECK(excursion >= 2.0 * std::sqrt(y) + eps);
  CHECK(trgeq_condition(n, l, y, eps, 1.0));
  const TraceSequence seq = t_sequence(x, l);
  CHECK(seq.unnormalized(l) >= std::pow(y, 0.5 * l));
  // Exponential form with the empirically fitted constant.
  const Ch2FitResult fit =
      fit_ch2_constant({{p, n}}, {2, 4, 8, 12, 20}, {0.25, 0.5, 1.0});
  const double floor_fitted =
      std::pow(y, 0.5 * l) *
      std::exp(l * std::sqrt(eps) / (fit.C * std::pow(y, 0.25)));
  CHECK(seq.unnormalized(l) >= floor_fitted);
}
