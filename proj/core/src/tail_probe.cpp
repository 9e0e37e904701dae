#include "signmat/tail_probe.hpp"

#include <cmath>
#include <stdexcept>

#include "signmat/parallel.hpp"
#include "signmat/rng.hpp"
#include "signmat/sign_matrix.hpp"
#include "signmat/spectral.hpp"

namespace signmat {

namespace {

constexpr double kZ95 = 1.959963984540054;  // 97.5th normal percentile

void finalize(TrialBatchReport& report) {
  report.hits = 0;
  for (const auto& r : report.records) report.hits += r.hit ? 1 : 0;
  report.estimate =
      static_cast<double>(report.hits) / static_cast<double>(report.trials);
  const auto [low, high] = wilson_interval(report.hits, report.trials);
  report.ci_low = low;
  report.ci_high = high;
}

}  // namespace

const char* tail_event_name(TailEvent event) {
  switch (event) {
    case TailEvent::outside_edges:
      return "outside_edges";
    case TailEvent::lambda_min_below_threshold:
      return "lambda_min_below_threshold";
  }
  return "unknown";
}

std::pair<double, double> wilson_interval(int hits, int trials) {
  if (trials < 1)
    throw std::domain_error("wilson_interval: trials must be >= 1");
  if (hits < 0 || hits > trials)
    throw std::domain_error("wilson_interval: hits must lie in [0, trials]");
  const double nt = trials;
  const double phat = hits / nt;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nt;
  const double center = (phat + z2 / (2.0 * nt)) / denom;
  const double half =
      kZ95 * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt)) /
      denom;
  // The interval contains phat mathematically; enforce it exactly so the
  // containment survives the cancellation at 0 and trials hits.
  const double low = std::min(std::max(0.0, center - half), phat);
  const double high = std::max(std::min(1.0, center + half), phat);
  return {low, high};
}

TrialBatchReport estimate_outside_probability(int p, int n, double eps,
                                              int trials,
                                              std::uint64_t master_seed,
                                              int threads) {
  if (trials < 1)
    throw std::domain_error(
        "estimate_outside_probability: trials must be >= 1");
  if (!(eps > 0.0))
    throw std::domain_error("estimate_outside_probability: eps must be > 0");
  if (p < 1 || p > n)
    throw std::domain_error(
        "estimate_outside_probability: requires 1 <= p <= n");

  const double y = static_cast<double>(p) / n;
  const auto [a, b] = mp_edges(y);

  TrialBatchReport report;
  report.p = p;
  report.n = n;
  report.epsilon = eps;
  report.trials = trials;
  report.master_seed = master_seed;
  report.event = TailEvent::outside_edges;
  report.records.resize(static_cast<std::size_t>(trials));

  parallel_for(trials, threads, [&](int i) {
    TrialRecord& rec = report.records[static_cast<std::size_t>(i)];
    rec.index = i;
    rec.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
    const SignMatrix x = gen_sign_matrix(p, n, rec.seed);
    std::vector<double> values;
    try {
      values = symmetric_eigenvalues(covariance(x));
    } catch (const NumericFailure& failure) {
      throw NumericFailure(std::string(failure.what()) + " at trial " +
                               std::to_string(i),
                           failure.origin_seed);
    }
    rec.lambda_min = values.front();
    rec.lambda_max = values.back();
    rec.hit = rec.lambda_min < a - eps || rec.lambda_max > b + eps;
  });

  finalize(report);
  return report;
}

TrialBatchReport estimate_lambda_min_tail(int n, double delta, int trials,
                                          std::uint64_t master_seed,
                                          int threads) {
  if (!(delta > 0.0) || delta > 0.5)
    throw std::domain_error(
        "estimate_lambda_min_tail: delta must lie in (0, 1/2]");
  if (trials < 1)
    throw std::domain_error("estimate_lambda_min_tail: trials must be >= 1");
  const int p = static_cast<int>(std::llround((1.0 - delta) * n));
  if (p < 2)
    throw std::domain_error(
        "estimate_lambda_min_tail: round((1 - delta) n) must be >= 2");
  const double threshold = delta * delta / 8.0;

  TrialBatchReport report;
  report.p = p;
  report.n = n;
  report.epsilon = delta;
  report.trials = trials;
  report.master_seed = master_seed;
  report.event = TailEvent::lambda_min_below_threshold;
  report.records.resize(static_cast<std::size_t>(trials));

  parallel_for(trials, threads, [&](int i) {
    TrialRecord& rec = report.records[static_cast<std::size_t>(i)];
    rec.index = i;
    rec.seed = derive_seed(master_seed, static_cast<std::uint64_t>(i));
    const SignMatrix x = gen_sign_matrix(p, n, rec.seed);
    std::vector<double> values;
    try {
      values = symmetric_eigenvalues(covariance(x));
    } catch (const NumericFailure& failure) {
      throw NumericFailure(std::string(failure.what()) + " at trial " +
                               std::to_string(i),
                           failure.origin_seed);
    }
    rec.lambda_min = values.front();
    rec.lambda_max = values.back();
    rec.hit = rec.lambda_min <= threshold;
  });

  finalize(report);
  return report;
}

double theorem1_bound(int p, double eps, double C) {
  if (p < 1) throw std::domain_error("theorem1_bound: p must be >= 1");
  if (!(eps > 0.0) || eps > 1.0)
    throw std::domain_error("theorem1_bound: eps must lie in (0, 1]");
  if (!(C > 0.0)) throw std::domain_error("theorem1_bound: C must be > 0");
  return std::exp(-std::pow(static_cast<double>(p), 1.0 / 6.0) *
                  std::sqrt(eps) / C);
}

bool theorem1_restriction(int n, double y, double eps, double C) {
  if (n < 2)
    throw std::domain_error("theorem1_restriction: n must be >= 2");
  if (!(y > 0.0))
    throw std::domain_error("theorem1_restriction: y must be > 0");
  if (!(C > 0.0))
    throw std::domain_error("theorem1_restriction: C must be > 0");
  const double log_n = std::log(static_cast<double>(n));
  const double lower =
      C * log_n * log_n / (std::sqrt(y) * std::cbrt(static_cast<double>(n)));
  return lower <= eps && eps <= 1.0;
}

double theorem2_bound(int n, double delta, double C) {
  if (n < 1) throw std::domain_error("theorem2_bound: n must be >= 1");
  if (!(delta > 0.0) || delta > 0.5)
    throw std::domain_error("theorem2_bound: delta must lie in (0, 1/2]");
  if (!(C > 0.0)) throw std::domain_error("theorem2_bound: C must be > 0");
  return std::exp(-std::pow(static_cast<double>(n), 1.0 / 6.0) * delta / C);
}

std::pair<double, double> lprt_bound(double delta, double A, double a,
                                     double C, int n) {
  if (!(delta > 0.0)) throw std::domain_error("lprt_bound: delta must be > 0");
  if (!(a > 0.0) || !(a < 1.0))
    throw std::domain_error("lprt_bound: a must lie in (0, 1)");
  return {A * std::pow(a, 1.0 / delta), std::exp(-C * n)};
}

ConstantFit fit_theorem1_constant(
    const std::vector<TrialBatchReport>& batches) {
  // log theorem1_bound = -s / C with s = p^{1/6} sqrt(eps); minimizing
  // sum (log phat + s/C)^2 over 1/C gives 1/C = -sum(s log phat) / sum s^2.
  ConstantFit fit;
  double num = 0.0;
  double den = 0.0;
  int used = 0;
  for (const auto& batch : batches) {
    if (batch.hits < 1) continue;
    const double s = std::pow(static_cast<double>(batch.p), 1.0 / 6.0) *
                     std::sqrt(batch.epsilon);
    num += -s * std::log(batch.estimate);
    den += s * s;
    ++used;
  }
  if (used == 0) {
    // Only censored observations: fit through the Wilson upper bounds,
    // which yields an upper-bound-consistent C rather than an estimate.
    fit.from_upper_bounds = true;
    for (const auto& batch : batches) {
      const double s = std::pow(static_cast<double>(batch.p), 1.0 / 6.0) *
                       std::sqrt(batch.epsilon);
      if (!(batch.ci_high > 0.0) || batch.ci_high >= 1.0) continue;
      num += -s * std::log(batch.ci_high);
      den += s * s;
      ++used;
    }
  }
  fit.batches_used = used;
  fit.C = (used > 0 && num > 0.0) ? den / num : 0.0;
  return fit;
}

ConstantFit fit_theorem2_constant(const TrialBatchReport& batch) {
  ConstantFit fit;
  fit.batches_used = 1;
  const double target =
      batch.hits > 0 ? batch.estimate : batch.ci_high;
  fit.from_upper_bounds = batch.hits == 0;
  if (!(target > 0.0) || target >= 1.0) {
    fit.batches_used = 0;
    return fit;
  }
  const double scale =
      std::pow(static_cast<double>(batch.n), 1.0 / 6.0) * batch.epsilon;
  fit.C = scale / (-std::log(target));
  return fit;
}

nlohmann::json batch_report_json(const TrialBatchReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records) {
    records.push_back({{"index", r.index},
                       {"seed", r.seed},
                       {"lambda_min", r.lambda_min},
                       {"lambda_max", r.lambda_max},
                       {"hit", r.hit}});
  }
  return nlohmann::json{{"p", report.p},
                        {"n", report.n},
                        {"epsilon", report.epsilon},
                        {"trials", report.trials},
                        {"hits", report.hits},
                        {"estimate", report.estimate},
                        {"ci_low", report.ci_low},
                        {"ci_high", report.ci_high},
                        {"master_seed", report.master_seed},
                        {"event", tail_event_name(report.event)},
                        {"generator", kGeneratorId},
                        {"records", std::move(records)}};
}

}  // namespace signmat
