#pragma once

#include <utility>
#include <vector>

#include "signmat/sign_matrix.hpp"

namespace signmat {

/// Parameters of the shifted Chebyshev recurrence
///   p_0 = 1,  p_1 = mu,  p_{l+1} = (mu - y1) p_l - y2 p_{l-1}
/// with y1 = (p-2)/n, y2 = (p-1)(n-1)/n^2, y = p/n, so that y >= y2 >= y1.
struct ShiftedChebParams {
  double y1 = 0.0;
  double y2 = 0.0;
  double y = 0.0;
  int degree = 0;  // l

  static ShiftedChebParams from_dims(int p, int n, int degree);
};

/// Chebyshev polynomial of the second kind, degree l, by the recurrence
/// U_0 = 1, U_1 = 2x, U_{l+1} = 2x U_l - U_{l-1}. Polynomial, hence valid
/// for |x| > 1 as well.
double cheb_u(int l, double x);

/// Both sides of U_l(cos theta) sin theta = sin((l+1) theta), for checking
/// the trigonometric definition against the recurrence. Requires
/// |sin theta| > 1e-8.
std::pair<double, double> cheb_u_trig_check(int l, double theta);

/// p_l(mu) by the three-term recurrence.
double shifted_p(const ShiftedChebParams& params, double mu);

/// p_l(mu) by the closed form
///   y2^{l/2} U_l(z) + y1 y2^{(l-1)/2} U_{l-1}(z),  z = (mu - y1)/(2 sqrt(y2)).
/// Requires y2 > 0 (degenerate when p = 1 or n = 1).
double shifted_p_via_cheb(const ShiftedChebParams& params, double mu);

/// Normalized traces of the matrix sequence
///   T(0) = I, T(1) = T, T(l+1) = (T - y1 I) T(l) - y2 T(l-1)
/// where T = S - I. Stored as tau(l) = y^{-l/2} trace(T(l)) to keep the
/// values O(p) while eigenvalues stay inside the bulk.
struct TraceSequence {
  ShiftedChebParams params;         // degree == max degree L
  std::vector<double> normalized;   // tau(0..L)

  double unnormalized(int l) const;  // trace(T(l)) = y^{l/2} tau(l)
};

/// Dense matrix route: runs the recurrence on p x p matrices. max_degree is
/// capped at 200; if a normalized entry or trace exceeds 1e300 the
/// evaluation aborts with a range error naming the degree reached.
TraceSequence t_sequence(const SignMatrix& x, int max_degree);

/// Spectral route: eigenvalues of T pushed through the scalar recurrence.
/// Agrees with t_sequence to roundoff; O(p^3 + L p) instead of O(L p^3).
TraceSequence t_sequence_spectral(const SignMatrix& x, int max_degree,
                                  double tol = -1.0);

/// Universal lower bound p_l(mu) >= -2 l y^{l/2}, stated for even l >= 2.
double bound_ch1(int l, double y);

/// Growth floor y2^{l/2} exp(l sqrt(eps) / (C y2^{1/4})), valid for even
/// l >= 2 when |mu - y1| >= 2 sqrt(y2) + eps.
double bound_ch2(int l, double eps, const ShiftedChebParams& params, double C);

/// Admissibility of eps for the trace growth lemma:
///   C max(1/(sqrt(y) n), sqrt(y) log^2 n / l^2) <= eps <= 1.
bool trgeq_condition(int n, int l, double y, double eps, double C);

/// Mean-trace ceiling l^10 y^{(l-5)/2}. The companion validity condition
/// l <= y^{5/12} n^{1/6} / C'' is the caller's to check.
double trace_upper_bound(int l, double y);

/// Smallest C for which bound_ch2 holds with mu on the boundary
/// mu = y1 + 2 sqrt(y2) + eps across the given grid.
struct Ch2FitResult {
  double C = 0.0;
  int points = 0;
};
Ch2FitResult fit_ch2_constant(const std::vector<std::pair<int, int>>& dims,
                              const std::vector<int>& degrees,
                              const std::vector<double>& epsilons);

}  // namespace signmat
