#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace signmat {

/// N = round((1 + delta) n) random sign vectors in {-1, +1}^n. The first
/// v_count = n + ceil(delta n / 2) rows form the v-block (normalized by
/// 1/sqrt(n) on use); the remaining w_count rows form the w-block. Ceiling
/// rounding on the v-block is the adopted convention when delta n is odd.
struct SignSystem {
  int total = 0;  // N
  int dim = 0;    // n
  double delta = 0.0;
  std::uint64_t seed = 0;
  int v_count = 0;
  int w_count = 0;
  std::vector<std::int8_t> vectors;  // row-major N x n

  std::span<const std::int8_t> row(int j) const {
    return {vectors.data() + static_cast<std::size_t>(j) * dim,
            static_cast<std::size_t>(dim)};
  }
};

SignSystem gen_sign_system(int n, double delta, std::uint64_t seed);

/// (1/N) sum_j |<x, eps_j>| over all N rows.
double khinchine_value(std::span<const double> x, const SignSystem& sys);

/// Exact average of |sum_i eps_i x_i| over all 2^n sign patterns; n <= 16.
double khinchine_full_average(std::span<const double> x);

/// Certificate for the sphere minimum of the Khinchine functional.
/// min_estimate is the best value found by multi-start projected subgradient
/// descent (a heuristic upper bound on the true minimum); sigma_min_lower =
/// sigma_min(E)/N is a rigorous floor, since sum |a_j| >= (sum a_j^2)^{1/2}.
struct EmbeddingCertificate {
  int total = 0;
  int dim = 0;
  double delta = 0.0;
  std::uint64_t system_seed = 0;
  double min_estimate = 0.0;
  std::vector<double> minimizer;  // unit vector, dimension n
  double sigma_min_lower = 0.0;
  double c_delta_ref = 0.0;
  int restarts = 0;
  int iterations = 0;
  std::uint64_t optimizer_seed = 0;
};

/// Multi-start projected subgradient descent on the unit sphere with step
/// 0.1/sqrt(t); the subgradient of |<x, eps>| is sign(<x, eps>) eps with
/// sign(0) = 0. Restart r draws its start from derive_seed(seed, r); the
/// reduction takes the lowest value, ties to the lowest restart index, and
/// the first basis vector seeds the incumbent (value exactly 1).
EmbeddingCertificate min_khinchine(const SignSystem& sys, int restarts,
                                   int iters, std::uint64_t seed,
                                   int threads = 1, double c0 = 1.0,
                                   double log_exponent = 1.0);

/// Smallest singular value of the v-block with rows eps_j / sqrt(n),
/// computed as sqrt(lambda_min) of the n x n Gram matrix.
double sigma_min_normalized(const SignSystem& sys);

/// Max over `sample_count` random unit x of (1/sqrt(n)) sum_{w-block}
/// |<x, w_j>| with w_j = eps_j / sqrt(n). Requires a nonempty w-block.
double w_block_upper(const SignSystem& sys, int sample_count,
                     std::uint64_t seed);

/// c0 * delta^{5/2} / log(1/delta)^{log_exponent}. The statement and the
/// proof disagree on the log exponent, hence the parameter; default 1.
double c_delta(double delta, double c0, double log_exponent = 1.0);

/// Covering radius C4 sqrt((m/k) log(m/k)) paired with log covering count k,
/// for covering sqrt(m) B(l_1^m) by euclidean balls. Requires 1 <= k < m.
std::pair<double, double> schutt_bound(int m, int k, double C4);

/// Empirical P(|<x, eps>| >= threshold) over `samples` draws of a random
/// unit x and a random sign vector eps.
double dot_exceed_probability(int n, int samples, std::uint64_t seed,
                              double threshold);

/// dot_exceed_probability at threshold 0.3; requires samples >= 100.
double median_dot_check(int n, int samples, std::uint64_t seed);

nlohmann::json certificate_json(const EmbeddingCertificate& cert);

}  // namespace signmat
