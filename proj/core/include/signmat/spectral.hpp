#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "signmat/sign_matrix.hpp"

namespace signmat {

/// Thrown when the eigensolver fails to converge or a computed eigenvalue
/// fails its residual spot-check. Carries the origin seed when the matrix
/// came from a generated SignMatrix.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, std::optional<std::uint64_t> seed)
      : std::runtime_error(seed ? what + " (origin seed " +
                                      std::to_string(*seed) + ")"
                                : what),
        origin_seed(seed) {}
  std::optional<std::uint64_t> origin_seed;
};

/// All eigenvalues of a symmetric matrix, ascending.
///
/// Householder tridiagonalization followed by implicitly shifted QL on the
/// tridiagonal matrix. Three eigenvalues (both extremes and one mixed middle
/// index) are spot-checked per call: for symmetric A and any vector z,
/// dist(lambda, spec(A)) <= ||(A - lambda I) z|| / ||z||, so one inverse
/// iteration on the tridiagonal form bounds the distance of the computed
/// eigenvalue from the true spectrum. The check must come out below
/// tol * ||M||_F or NumericFailure is thrown.
///
/// tol <= 0 selects the default 1e-10 * dim.
std::vector<double> symmetric_eigenvalues(const SymMatrix& m,
                                          double tol = -1.0);

struct SpectralSummary {
  std::vector<double> eigenvalues;  // ascending
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double y = 0.0;  // aspect ratio p/n
  double a = 0.0;  // lower MP edge (1 - sqrt(y))^2
  double b = 0.0;  // upper MP edge (1 + sqrt(y))^2
};

/// Spectrum of S = covariance(X) packaged with the MP frame for y = p/n.
/// Requires p <= n so that y lies in (0, 1].
SpectralSummary make_spectral_summary(const SymMatrix& s, int n,
                                      double tol = -1.0);

/// Empirical spectral distribution as a step CDF.
struct EsdCurve {
  std::vector<double> points;  // ascending eigenvalues
  std::vector<double> cdf;     // (i+1)/p at points[i]
};
EsdCurve esd_curve(std::span<const double> eigenvalues);

/// MP support edges a = (1 - sqrt(y))^2, b = (1 + sqrt(y))^2 for y in (0,1].
std::pair<double, double> mp_edges(double y);

/// Marchenko-Pastur density: sqrt((x-a)(b-x)) / (2 pi y x) on [a, b],
/// zero elsewhere.
double mp_density(double x, double y);

/// CDF of the MP law by composite Simpson quadrature after the substitution
/// x = a + (b-a) sin^2 t, which removes the square-root edge singularities
/// (the transformed integrand is analytic). quad_steps panels, >= 16.
double mp_cdf(double x, double y, int quad_steps = 4096);

/// Kolmogorov-Smirnov distance between the ESD of the given eigenvalues and
/// the MP CDF, evaluated at both one-sided limits of each ESD step. The
/// input list is sorted internally, so the result is order-independent.
double ks_distance(std::vector<double> eigenvalues, double y,
                   int quad_steps = 4096);
double ks_distance(const SpectralSummary& summary, double y,
                   int quad_steps = 4096);

}  // namespace signmat
