#include "signmat/l1_section.hpp"

#include <cmath>
#include <stdexcept>

#include "signmat/parallel.hpp"
#include "signmat/rng.hpp"
#include "signmat/sign_matrix.hpp"
#include "signmat/spectral.hpp"

namespace signmat {

namespace {

// Functional value and subgradient in one pass over the rows.
double evaluate(std::span<const double> x, const SignSystem& sys,
                std::vector<double>* subgradient) {
  const int n = sys.dim;
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("khinchine functional: dimension mismatch");
  if (subgradient) subgradient->assign(static_cast<std::size_t>(n), 0.0);
  double total = 0.0;
  for (int j = 0; j < sys.total; ++j) {
    const auto row = sys.row(j);
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += x[static_cast<std::size_t>(i)] * row[i];
    total += std::abs(dot);
    if (subgradient && dot != 0.0) {
      const double s = dot > 0.0 ? 1.0 : -1.0;
      for (int i = 0; i < n; ++i)
        (*subgradient)[static_cast<std::size_t>(i)] += s * row[i];
    }
  }
  const double inv_total = 1.0 / sys.total;
  if (subgradient)
    for (auto& g : *subgradient) g *= inv_total;
  return total * inv_total;
}

struct RestartResult {
  double value = 0.0;
  std::vector<double> point;
};

RestartResult run_restart(const SignSystem& sys, int iters,
                          std::uint64_t seed) {
  Xoshiro256ss rng(seed);
  std::vector<double> x = random_unit_vector(rng, sys.dim);
  std::vector<double> grad;
  RestartResult best{evaluate(x, sys, &grad), x};
  for (int t = 1; t <= iters; ++t) {
    const double step = 0.1 / std::sqrt(static_cast<double>(t));
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] -= step * grad[i];
      norm_sq += x[i] * x[i];
    }
    if (norm_sq == 0.0) {
      x = best.point;  // degenerate step; restart from the incumbent
      norm_sq = 1.0;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& v : x) v *= inv;
    const double value = evaluate(x, sys, &grad);
    if (value < best.value) {
      best.value = value;
      best.point = x;
    }
  }
  return best;
}

}  // namespace

SignSystem gen_sign_system(int n, double delta, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_sign_system: n must be >= 1");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("gen_sign_system: delta must lie in (0, 1)");
  SignSystem sys;
  sys.dim = n;
  sys.delta = delta;
  sys.seed = seed;
  sys.total = static_cast<int>(std::llround((1.0 + delta) * n));
  sys.v_count = n + static_cast<int>(std::ceil(delta * n / 2.0));
  if (sys.v_count > sys.total) sys.v_count = sys.total;
  sys.w_count = sys.total - sys.v_count;

  const SignMatrix rows = gen_sign_matrix(sys.total, n, seed);
  sys.vectors = rows.entries;
  return sys;
}

double khinchine_value(std::span<const double> x, const SignSystem& sys) {
  return evaluate(x, sys, nullptr);
}

double khinchine_full_average(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n < 1)
    throw std::invalid_argument("khinchine_full_average: empty vector");
  if (n > 16)
    throw std::length_error(
        "khinchine_full_average: n must be <= 16 (2^n enumeration)");
  const std::uint64_t patterns = std::uint64_t{1} << n;
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i)
      dot += ((mask >> i) & 1u) ? x[static_cast<std::size_t>(i)]
                                : -x[static_cast<std::size_t>(i)];
    total += std::abs(dot);
  }
  return total / static_cast<double>(patterns);
}

EmbeddingCertificate min_khinchine(const SignSystem& sys, int restarts,
                                   int iters, std::uint64_t seed, int threads,
                                   double c0, double log_exponent) {
  if (restarts < 1)
    throw std::invalid_argument("min_khinchine: restarts must be >= 1");
  if (iters < 1)
    throw std::invalid_argument("min_khinchine: iters must be >= 1");
  const int n = sys.dim;

  EmbeddingCertificate cert;
  cert.total = sys.total;
  cert.dim = n;
  cert.delta = sys.delta;
  cert.system_seed = sys.seed;
  cert.restarts = restarts;
  cert.iterations = iters;
  cert.optimizer_seed = seed;
  cert.c_delta_ref = c_delta(sys.delta, c0, log_exponent);

  // sigma_min(E)/N floor via the exact integer Gram of all N rows.
  {
    SymMatrix gram(n);
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) {
        long long acc = 0;
        for (int j = 0; j < sys.total; ++j) {
          const auto row = sys.row(j);
          acc += static_cast<long long>(row[i]) * row[k];
        }
        gram.set(i, k, static_cast<double>(acc));
      }
    const std::vector<double> values = symmetric_eigenvalues(gram);
    cert.sigma_min_lower = std::sqrt(std::max(values.front(), 0.0)) / sys.total;
  }

  // First basis vector as the incumbent: value exactly 1 for +-1 rows.
  std::vector<double> best_point(static_cast<std::size_t>(n), 0.0);
  best_point[0] = 1.0;
  double best_value = khinchine_value(best_point, sys);

  std::vector<RestartResult> results(static_cast<std::size_t>(restarts));
  parallel_for(restarts, threads, [&](int r) {
    results[static_cast<std::size_t>(r)] =
        run_restart(sys, iters, derive_seed(seed, static_cast<std::uint64_t>(r)));
  });
  for (const auto& result : results) {
    if (result.value < best_value) {
      best_value = result.value;
      best_point = result.point;
    }
  }

  cert.minimizer = std::move(best_point);
  cert.min_estimate = khinchine_value(cert.minimizer, sys);
  return cert;
}

double sigma_min_normalized(const SignSystem& sys) {
  if (sys.v_count < 1)
    throw std::domain_error("sigma_min_normalized: empty v-block");
  const int n = sys.dim;
  SymMatrix gram(n);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      long long acc = 0;
      for (int j = 0; j < sys.v_count; ++j) {
        const auto row = sys.row(j);
        acc += static_cast<long long>(row[i]) * row[k];
      }
      gram.set(i, k, static_cast<double>(acc) / n);  // rows carry 1/sqrt(n)
    }
  const std::vector<double> values = symmetric_eigenvalues(gram);
  return std::sqrt(std::max(values.front(), 0.0));
}

double w_block_upper(const SignSystem& sys, int sample_count,
                     std::uint64_t seed) {
  if (sys.w_count < 1)
    throw std::domain_error("w_block_upper: empty w-block");
  if (sample_count < 1)
    throw std::invalid_argument("w_block_upper: sample_count must be >= 1");
  const int n = sys.dim;
  Xoshiro256ss rng(seed);
  double best = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    const std::vector<double> x = random_unit_vector(rng, n);
    double total = 0.0;
    for (int j = sys.v_count; j < sys.total; ++j) {
      const auto row = sys.row(j);
      double dot = 0.0;
      for (int i = 0; i < n; ++i)
        dot += x[static_cast<std::size_t>(i)] * row[i];
      total += std::abs(dot);
    }
    best = std::max(best, total / n);  // two 1/sqrt(n) normalizations
  }
  return best;
}

double c_delta(double delta, double c0, double log_exponent) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::domain_error("c_delta: delta must lie in (0, 1)");
  if (!(c0 > 0.0)) throw std::domain_error("c_delta: c0 must be positive");
  return c0 * std::pow(delta, 2.5) /
         std::pow(std::log(1.0 / delta), log_exponent);
}

std::pair<double, double> schutt_bound(int m, int k, double C4) {
  if (k < 1) throw std::domain_error("schutt_bound: k must be >= 1");
  if (k >= m) throw std::domain_error("schutt_bound: requires k < m");
  if (!(C4 > 0.0)) throw std::domain_error("schutt_bound: C4 must be > 0");
  const double ratio = static_cast<double>(m) / k;
  return {C4 * std::sqrt(ratio * std::log(ratio)), static_cast<double>(k)};
}

double dot_exceed_probability(int n, int samples, std::uint64_t seed,
                              double threshold) {
  if (n < 1)
    throw std::invalid_argument("dot_exceed_probability: n must be >= 1");
  if (samples < 1)
    throw std::invalid_argument(
        "dot_exceed_probability: samples must be >= 1");
  Xoshiro256ss rng(seed);
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    const std::vector<double> x = random_unit_vector(rng, n);
    double dot = 0.0;
    std::uint64_t word = 0;
    for (int i = 0; i < n; ++i) {
      if (i % 64 == 0) word = rng.next();
      const double sign = ((word >> (i % 64)) & 1u) ? 1.0 : -1.0;
      dot += sign * x[static_cast<std::size_t>(i)];
    }
    if (std::abs(dot) >= threshold) ++hits;
  }
  return static_cast<double>(hits) / samples;
}

double median_dot_check(int n, int samples, std::uint64_t seed) {
  if (samples < 100)
    throw std::invalid_argument("median_dot_check: samples must be >= 100");
  return dot_exceed_probability(n, samples, seed, 0.3);
}

nlohmann::json certificate_json(const EmbeddingCertificate& cert) {
  return nlohmann::json{{"N", cert.total},
                        {"n", cert.dim},
                        {"delta", cert.delta},
                        {"system_seed", cert.system_seed},
                        {"min_estimate", cert.min_estimate},
                        {"minimizer", cert.minimizer},
                        {"sigma_min_lower", cert.sigma_min_lower},
                        {"c_delta_ref", cert.c_delta_ref},
                        {"restarts", cert.restarts},
                        {"iterations", cert.iterations},
                        {"optimizer_seed", cert.optimizer_seed},
                        {"generator", kGeneratorId}};
}

}  // namespace signmat
