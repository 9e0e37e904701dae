#include "signmat/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "signmat/rng.hpp"

namespace signmat {

namespace {

// Solves (T - shift I) z = b for tridiagonal T given by diag/sub, using
// Gaussian elimination with partial pivoting (fill-in limited to two
// superdiagonals). Exact zero pivots are nudged by `pivot_floor`.
void solve_shifted_tridiagonal(const Eigen::VectorXd& diag,
                               const Eigen::VectorXd& sub, double shift,
                               double pivot_floor, Eigen::VectorXd& z) {
  const int n = static_cast<int>(diag.size());
  Eigen::VectorXd d(n), u1(std::max(n - 1, 0)), u2(std::max(n - 2, 0));
  Eigen::VectorXd low(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) d(i) = diag(i) - shift;
  for (int i = 0; i < n - 1; ++i) {
    u1(i) = sub(i);
    low(i) = sub(i);
  }
  u2.setZero();

  for (int k = 0; k < n - 1; ++k) {
    double dk = d(k);
    double lk = low(k);
    if (std::abs(lk) > std::abs(dk)) {
      // Swap row k and k+1.
      std::swap(d(k), low(k));
      const double tmp = u1(k);
      u1(k) = d(k + 1);
      d(k + 1) = tmp;
      if (k + 2 <= n - 1) {
        u2(k) = u1(k + 1);
        u1(k + 1) = 0.0;
      }
      std::swap(z(k), z(k + 1));
      dk = d(k);
      lk = low(k);
    }
    if (dk == 0.0) {
      d(k) = pivot_floor;
      dk = pivot_floor;
    }
    const double mult = lk / dk;
    d(k + 1) -= mult * u1(k);
    if (k + 2 <= n - 1) u1(k + 1) -= mult * u2(k);
    z(k + 1) -= mult * z(k);
  }
  if (d(n - 1) == 0.0) d(n - 1) = pivot_floor;

  for (int k = n - 1; k >= 0; --k) {
    double rhs = z(k);
    if (k + 1 <= n - 1) rhs -= u1(k) * z(k + 1);
    if (k + 2 <= n - 1) rhs -= u2(k) * z(k + 2);
    z(k) = rhs / d(k);
  }
}

// Upper bound on dist(lambda, spec(T)) via two steps of inverse iteration:
// for symmetric T, ||(T - lambda I) z|| / ||z|| dominates the distance for
// every z, and the solve makes that quotient tiny iff lambda is numerically
// in the spectrum.
double eigenvalue_distance_bound(const Eigen::VectorXd& diag,
                                 const Eigen::VectorXd& sub, double lambda,
                                 double scale) {
  const int n = static_cast<int>(diag.size());
  const double pivot_floor =
      std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  Eigen::VectorXd z(n);
  std::uint64_t s = 0x5ca1ab1e00000000ULL ^ static_cast<std::uint64_t>(n);
  for (int i = 0; i < n; ++i)
    z(i) = 2.0 * static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53 - 1.0;
  z.normalize();
  double bound = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 2; ++step) {
    solve_shifted_tridiagonal(diag, sub, lambda, pivot_floor, z);
    const double norm = z.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    bound = 1.0 / norm;  // ||b|| = 1 before each solve
    z /= norm;
  }
  return bound;
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const SymMatrix& m, double tol) {
  const int dim = m.dim();
  if (dim < 1)
    throw std::invalid_argument("symmetric_eigenvalues: empty matrix");
  if (tol <= 0.0) tol = 1e-10 * dim;
  if (dim == 1) return {m(0, 0)};

  Eigen::Map<const Eigen::MatrixXd> a(m.data().data(), dim, dim);
  Eigen::MatrixXd work = a;  // symmetric, so row/col-major agree
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(work);
  const Eigen::VectorXd diag = tri.matrixT().diagonal();
  const Eigen::VectorXd sub = tri.matrixT().diagonal(-1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericFailure(
        "symmetric_eigenvalues: QL iteration did not converge at dim " +
            std::to_string(dim),
        m.origin_seed);

  std::vector<double> values(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + dim);
  std::sort(values.begin(), values.end());

  // Spot-check three eigenvalues against the tridiagonal form. The
  // tridiagonalization is orthogonal up to roundoff, so certifying lambda
  // against T certifies it against M at the same order.
  const double norm = m.frobenius_norm();
  const double budget = tol * std::max(norm, 1e-300);
  std::uint64_t pick = 0x00c0ffee ^ (static_cast<std::uint64_t>(dim) << 32);
  const int middle = 1 + static_cast<int>(splitmix64(pick) %
                                          static_cast<std::uint64_t>(dim));
  const int checks[3] = {0, dim - 1, std::min(middle, dim - 1)};
  for (const int idx : checks) {
    const double bound =
        eigenvalue_distance_bound(diag, sub, values[idx], norm);
    if (!(bound <= budget))
      throw NumericFailure(
          "symmetric_eigenvalues: residual check failed at index " +
              std::to_string(idx) + " (bound " + std::to_string(bound) + ")",
          m.origin_seed);
  }
  return values;
}

SpectralSummary make_spectral_summary(const SymMatrix& s, int n, double tol) {
  const int p = s.dim();
  if (n < 1 || p > n)
    throw std::invalid_argument(
        "make_spectral_summary: requires 1 <= p <= n");
  SpectralSummary summary;
  summary.eigenvalues = symmetric_eigenvalues(s, tol);
  summary.lambda_min = summary.eigenvalues.front();
  summary.lambda_max = summary.eigenvalues.back();
  summary.y = static_cast<double>(p) / n;
  const auto [a, b] = mp_edges(summary.y);
  summary.a = a;
  summary.b = b;
  return summary;
}

EsdCurve esd_curve(std::span<const double> eigenvalues) {
  EsdCurve curve;
  curve.points.assign(eigenvalues.begin(), eigenvalues.end());
  std::sort(curve.points.begin(), curve.points.end());
  const double p = static_cast<double>(curve.points.size());
  curve.cdf.resize(curve.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    curve.cdf[i] = static_cast<double>(i + 1) / p;
  return curve;
}

std::pair<double, double> mp_edges(double y) {
  if (!(y > 0.0) || y > 1.0)
    throw std::domain_error("mp_edges: y must lie in (0, 1]");
  const double r = std::sqrt(y);
  return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r)};
}

double mp_density(double x, double y) {
  const auto [a, b] = mp_edges(y);
  if (x < a || x > b) return 0.0;
  const double radicand = (x - a) * (b - x);
  if (radicand <= 0.0) return 0.0;
  return std::sqrt(radicand) / (2.0 * std::numbers::pi * y * x);
}

double mp_cdf(double x, double y, int quad_steps) {
  const auto [a, b] = mp_edges(y);
  if (quad_steps < 16)
    throw std::invalid_argument("mp_cdf: quad_steps must be >= 16");
  if (x <= a) return 0.0;
  const double xc = std::min(x, b);

  // After x(t) = a + (b - a) sin^2 t the mass element becomes
  //   (b - a)^2 sin^2(2t) / (4 pi y x(t)) dt
  // which extends analytically to t = 0 even when a = 0 (limit b / (pi y)).
  const double width = b - a;
  auto integrand = [&](double t) {
    const double s = std::sin(t);
    const double xt = a + width * s * s;
    if (xt <= 0.0) return b / (std::numbers::pi * y);
    const double s2 = std::sin(2.0 * t);
    return width * width * s2 * s2 / (4.0 * std::numbers::pi * y * xt);
  };

  double ratio = (xc - a) / width;
  ratio = std::clamp(ratio, 0.0, 1.0);
  const double t_end = std::asin(std::sqrt(ratio));

  int panels = quad_steps;
  if (panels % 2 != 0) ++panels;
  const double h = t_end / panels;
  double acc = integrand(0.0) + integrand(t_end);
  for (int k = 1; k < panels; ++k)
    acc += integrand(k * h) * ((k % 2 != 0) ? 4.0 : 2.0);
  const double value = acc * h / 3.0;
  return std::clamp(value, 0.0, 1.0);
}

double ks_distance(std::vector<double> eigenvalues, double y, int quad_steps) {
  if (eigenvalues.empty())
    throw std::invalid_argument("ks_distance: empty spectrum");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  const double p = static_cast<double>(eigenvalues.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double f = mp_cdf(eigenvalues[i], y, quad_steps);
    const double above = static_cast<double>(i + 1) / p;  // right limit
    const double below = static_cast<double>(i) / p;      // left limit
    dist = std::max(dist, std::abs(above - f));
    dist = std::max(dist, std::abs(below - f));
  }
  return dist;
}

double ks_distance(const SpectralSummary& summary, double y, int quad_steps) {
  return ks_distance(summary.eigenvalues, y, quad_steps);
}

}  // namespace signmat
