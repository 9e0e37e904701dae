#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace signmat {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Outcome of checking the combinatorial trace identity at one (p, n, l).
/// The identity predicts E Tr T(l) = config_count / n^l; the discrepancy is
/// first-class output rather than an assertion, because exhaustive
/// enumeration shows a boundary mismatch already at l = 2 (equal to
/// p(p-1)/n^2).
struct ConfigCountResult {
  int p = 0;
  int n = 0;
  int degree = 0;  // l
  BigInt config_count;
  BigRational exact_mean_trace;  // E Tr T(l) over all 2^{pn} sign matrices
  BigRational predicted_mean;    // config_count / n^l
  BigRational discrepancy;       // exact_mean_trace - predicted_mean
};

/// Number of index tuples (i, u_1..u_{l-1}, v_1..v_l) with
/// 1 <= i, u_r <= p and 1 <= v_s <= n, adjacent inequalities
/// i != u_1 != ... != u_{l-1} != i and v_1 != ... != v_l, in which every
/// edge (u, v) occurs an even number of times along the closed walk
/// i v_1, u_1 v_1, u_1 v_2, ..., u_{l-1} v_l, i v_l.
///
/// Conventions at the boundary: l = 0 counts the p bare choices of i, and
/// l = 1 yields 0 because the constraint chain degenerates to i != i.
/// Budget: p^l n^l <= 1e8.
BigInt count_configurations(int p, int n, int degree);

/// E Tr T(l) averaged in exact rational arithmetic over all 2^{pn} sign
/// matrices, with T(l) computed by the integer-scaled matrix recurrence
/// B(l+1) = (A - (p-2) I) B(l) - (p-1)(n-1) B(l-1), A = X X^T - n I,
/// so that trace T(l) = trace B(l) / n^l exactly.
/// Budget: p*n <= 20 and l <= 8.
BigRational exact_expected_trace(int p, int n, int degree);

/// Same, for every degree 0..max_degree in a single sweep of the 2^{pn}
/// matrices.
std::vector<BigRational> exact_expected_traces(int p, int n, int max_degree);

ConfigCountResult compare_comb_identity(int p, int n, int degree);

/// compare_comb_identity for all degrees 0..max_degree sharing one
/// enumeration sweep.
std::vector<ConfigCountResult> compare_comb_identity_through(int p, int n,
                                                             int max_degree);

/// Exact decimal-free rendering: "num/den", or just "num" when den == 1.
std::string rational_to_string(const BigRational& r);

}  // namespace signmat
