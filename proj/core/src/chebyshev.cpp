#include "signmat/chebyshev.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "signmat/spectral.hpp"

namespace signmat {

ShiftedChebParams ShiftedChebParams::from_dims(int p, int n, int degree) {
  if (p < 1 || n < 1)
    throw std::invalid_argument("ShiftedChebParams: dimensions must be >= 1");
  if (p > n + 1)
    throw std::invalid_argument(
        "ShiftedChebParams: requires p <= n + 1 so that y2 >= y1");
  if (degree < 0)
    throw std::invalid_argument("ShiftedChebParams: degree must be >= 0");
  ShiftedChebParams params;
  params.y = static_cast<double>(p) / n;
  // Computed as y - 2/n rather than (p-2)/n so the identity holds exactly
  // in floating point as well.
  params.y1 = params.y - 2.0 / n;
  params.y2 = static_cast<double>(p - 1) * (n - 1) / (static_cast<double>(n) * n);
  params.degree = degree;
  return params;
}

double cheb_u(int l, double x) {
  if (l < 0) throw std::invalid_argument("cheb_u: degree must be >= 0");
  if (l == 0) return 1.0;
  double prev = 1.0;
  double curr = 2.0 * x;
  for (int k = 2; k <= l; ++k) {
    const double next = 2.0 * x * curr - prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

std::pair<double, double> cheb_u_trig_check(int l, double theta) {
  const double s = std::sin(theta);
  if (std::abs(s) <= 1e-8)
    throw std::domain_error("cheb_u_trig_check: sin(theta) too close to 0");
  return {cheb_u(l, std::cos(theta)) * s, std::sin((l + 1) * theta)};
}

double shifted_p(const ShiftedChebParams& params, double mu) {
  if (params.degree == 0) return 1.0;
  if (params.degree == 1) return mu;
  double prev = 1.0;
  double curr = mu;
  for (int k = 2; k <= params.degree; ++k) {
    const double next = (mu - params.y1) * curr - params.y2 * prev;
    prev = curr;
    curr = next;
  }
  return curr;
}

double shifted_p_via_cheb(const ShiftedChebParams& params, double mu) {
  if (params.degree == 0) return 1.0;
  if (!(params.y2 > 0.0))
    throw std::domain_error(
        "shifted_p_via_cheb: y2 must be positive (degenerate at p = 1 or "
        "n = 1)");
  const int l = params.degree;
  const double root = std::sqrt(params.y2);
  const double z = (mu - params.y1) / (2.0 * root);
  const double lead = std::pow(root, l) * cheb_u(l, z);
  const double shift = params.y1 * std::pow(root, l - 1) * cheb_u(l - 1, z);
  return lead + shift;
}

double TraceSequence::unnormalized(int l) const {
  if (l < 0 || l >= static_cast<int>(normalized.size()))
    throw std::out_of_range("TraceSequence::unnormalized: degree out of range");
  return normalized[static_cast<std::size_t>(l)] *
         std::pow(params.y, 0.5 * l);
}

namespace {

constexpr int kMaxTraceDegree = 200;
constexpr double kOverflowLimit = 1e300;

[[noreturn]] void throw_trace_overflow(int degree) {
  throw std::range_error("t_sequence: normalized trace exceeded 1e300 at "
                         "degree " +
                         std::to_string(degree));
}

}  // namespace

TraceSequence t_sequence(const SignMatrix& x, int max_degree) {
  if (max_degree < 0 || max_degree > kMaxTraceDegree)
    throw std::invalid_argument(
        "t_sequence: max_degree must lie in [0, 200]");
  const int p = x.rows;
  TraceSequence seq;
  seq.params = ShiftedChebParams::from_dims(p, x.cols, max_degree);
  seq.normalized.reserve(static_cast<std::size_t>(max_degree) + 1);
  seq.normalized.push_back(static_cast<double>(p));  // trace of T(0) = I
  if (max_degree == 0) return seq;

  const double inv_root_y = 1.0 / std::sqrt(seq.params.y);
  const double ratio = seq.params.y2 / seq.params.y;

  const SymMatrix t = t_matrix(x);
  Eigen::Map<const Eigen::MatrixXd> t_map(t.data().data(), p, p);
  // Shifted step matrix (T - y1 I)/sqrt(y), applied on the left each level.
  Eigen::MatrixXd step = t_map * inv_root_y;
  step.diagonal().array() -= seq.params.y1 * inv_root_y;

  Eigen::MatrixXd prev = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd curr = t_map * inv_root_y;
  seq.normalized.push_back(curr.trace());  // exactly 0: diag(T) = 0
  for (int l = 2; l <= max_degree; ++l) {
    Eigen::MatrixXd next = step * curr - ratio * prev;
    const double tau = next.trace();
    if (!std::isfinite(tau) || std::abs(tau) > kOverflowLimit ||
        next.cwiseAbs().maxCoeff() > kOverflowLimit)
      throw_trace_overflow(l);
    seq.normalized.push_back(tau);
    prev.swap(curr);
    curr.swap(next);
  }
  return seq;
}

TraceSequence t_sequence_spectral(const SignMatrix& x, int max_degree,
                                  double tol) {
  if (max_degree < 0 || max_degree > kMaxTraceDegree)
    throw std::invalid_argument(
        "t_sequence_spectral: max_degree must lie in [0, 200]");
  const int p = x.rows;
  TraceSequence seq;
  seq.params = ShiftedChebParams::from_dims(p, x.cols, max_degree);
  seq.normalized.assign(static_cast<std::size_t>(max_degree) + 1, 0.0);
  seq.normalized[0] = static_cast<double>(p);
  if (max_degree == 0) return seq;

  const double inv_root_y = 1.0 / std::sqrt(seq.params.y);
  const double ratio = seq.params.y2 / seq.params.y;
  const std::vector<double> mu = symmetric_eigenvalues(t_matrix(x), tol);

  for (const double m : mu) {
    double prev = 1.0;
    double curr = m * inv_root_y;
    seq.normalized[1] += curr;
    for (int l = 2; l <= max_degree; ++l) {
      const double next = (m - seq.params.y1) * inv_root_y * curr - ratio * prev;
      if (!std::isfinite(next) || std::abs(next) > kOverflowLimit)
        throw_trace_overflow(l);
      seq.normalized[static_cast<std::size_t>(l)] += next;
      prev = curr;
      curr = next;
    }
  }
  return seq;
}

double bound_ch1(int l, double y) {
  if (l < 2 || l % 2 != 0)
    throw std::domain_error("bound_ch1: stated for even l >= 2 only");
  if (!(y > 0.0) || y > 1.0)
    throw std::domain_error("bound_ch1: y must lie in (0, 1]");
  return -2.0 * l * std::pow(y, 0.5 * l);
}

double bound_ch2(int l, double eps, const ShiftedChebParams& params,
                 double C) {
  if (l < 2 || l % 2 != 0)
    throw std::domain_error("bound_ch2: stated for even l >= 2 only");
  if (!(eps > 0.0) || eps > 1.0)
    throw std::domain_error("bound_ch2: eps must lie in (0, 1]");
  if (!(params.y2 > 0.0))
    throw std::domain_error("bound_ch2: y2 must be positive");
  if (!(C > 0.0)) throw std::domain_error("bound_ch2: C must be positive");
  const double exponent =
      l * std::sqrt(eps) / (C * std::pow(params.y2, 0.25));
  return std::pow(params.y2, 0.5 * l) * std::exp(exponent);
}

bool trgeq_condition(int n, int l, double y, double eps, double C) {
  if (l > n)
    throw std::invalid_argument("trgeq_condition: requires l <= n");
  if (!(y > 0.0)) throw std::domain_error("trgeq_condition: y must be > 0");
  if (!(C > 0.0)) throw std::domain_error("trgeq_condition: C must be > 0");
  const double log_n = std::log(static_cast<double>(n));
  const double floor_value =
      C * std::max(1.0 / (std::sqrt(y) * n),
                   std::sqrt(y) * log_n * log_n / (static_cast<double>(l) * l));
  return floor_value <= eps && eps <= 1.0;
}

double trace_upper_bound(int l, double y) {
  if (l < 1) throw std::domain_error("trace_upper_bound: l must be >= 1");
  if (!(y > 0.0) || y > 1.0)
    throw std::domain_error("trace_upper_bound: y must lie in (0, 1]");
  return std::pow(static_cast<double>(l), 10.0) * std::pow(y, 0.5 * (l - 5));
}

Ch2FitResult fit_ch2_constant(const std::vector<std::pair<int, int>>& dims,
                              const std::vector<int>& degrees,
                              const std::vector<double>& epsilons) {
  Ch2FitResult fit;
  for (const auto& [p, n] : dims) {
    for (const int l : degrees) {
      if (l < 2 || l % 2 != 0) continue;
      for (const double eps : epsilons) {
        if (!(eps > 0.0) || eps > 1.0) continue;
        auto params = ShiftedChebParams::from_dims(p, n, l);
        if (!(params.y2 > 0.0)) continue;
        const double mu = params.y1 + 2.0 * std::sqrt(params.y2) + eps;
        const double value = shifted_p(params, mu);
        // log(p_l(mu) / y2^{l/2}); positive since mu clears the band edge.
        const double log_ratio =
            std::log(value) - 0.5 * l * std::log(params.y2);
        if (!(log_ratio > 0.0)) continue;
        const double c_point =
            l * std::sqrt(eps) / (std::pow(params.y2, 0.25) * log_ratio);
        fit.C = std::max(fit.C, c_point);
        ++fit.points;
      }
    }
  }
  return fit;
}

}  // namespace signmat
