#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace signmat {

enum class TailEvent { outside_edges, lambda_min_below_threshold };

const char* tail_event_name(TailEvent event);

struct TrialRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool hit = false;
};

/// One Monte Carlo batch. `epsilon` holds the event parameter: the edge
/// margin for outside_edges, delta for lambda_min_below_threshold.
/// Trial i draws its matrix from derive_seed(master_seed, i), so the batch
/// reproduces exactly for any worker count.
struct TrialBatchReport {
  int p = 0;
  int n = 0;
  double epsilon = 0.0;
  int trials = 0;
  int hits = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t master_seed = 0;
  TailEvent event = TailEvent::outside_edges;
  std::vector<TrialRecord> records;  // index order
};

/// 95% Wilson score interval; well behaved at zero hits.
std::pair<double, double> wilson_interval(int hits, int trials);

/// Fraction of trials in which S = covariance(X) for a fresh p x n sign
/// matrix has lambda_min < a - eps or lambda_max > b + eps.
TrialBatchReport estimate_outside_probability(int p, int n, double eps,
                                              int trials,
                                              std::uint64_t master_seed,
                                              int threads = 1);

/// Fraction of trials with lambda_min(S) <= delta^2 / 8 at
/// p = round((1 - delta) n). Requires 0 < delta < 1/2 and p >= 2.
TrialBatchReport estimate_lambda_min_tail(int n, double delta, int trials,
                                          std::uint64_t master_seed,
                                          int threads = 1);

/// exp(-p^{1/6} eps^{1/2} / C), the edge-deviation tail ceiling.
double theorem1_bound(int p, double eps, double C);

/// Admissible range C log^2 n / (sqrt(y) n^{1/3}) <= eps <= 1.
bool theorem1_restriction(int n, double y, double eps, double C);

/// exp(-n^{1/6} delta / C), the lambda_min tail ceiling.
double theorem2_bound(int n, double delta, double C);

/// The comparison point (A a^{1/delta}, exp(-C n)): threshold far smaller
/// than delta^2/8 as delta -> 0, probability decaying in n rather than
/// n^{1/6}.
std::pair<double, double> lprt_bound(double delta, double A, double a,
                                     double C, int n);

/// Least-squares fit of C against log theorem1_bound over a set of batches.
/// Zero-hit batches carry no usable log-probability; when every batch is
/// zero-hit the fit falls back to Wilson upper bounds and says so.
struct ConstantFit {
  double C = 0.0;
  int batches_used = 0;
  bool from_upper_bounds = false;
};
ConstantFit fit_theorem1_constant(const std::vector<TrialBatchReport>& batches);

/// C making theorem2_bound pass through the batch estimate (Wilson upper
/// bound when no hits were seen).
ConstantFit fit_theorem2_constant(const TrialBatchReport& batch);

/// Full batch as a single JSON object, including the generator identifier.
nlohmann::json batch_report_json(const TrialBatchReport& report);

}  // namespace signmat
