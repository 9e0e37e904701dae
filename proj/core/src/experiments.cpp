#include "signmat/experiments.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "signmat/chebyshev.hpp"
#include "signmat/comb_oracle.hpp"
#include "signmat/l1_section.hpp"
#include "signmat/parallel.hpp"
#include "signmat/rng.hpp"
#include "signmat/sign_matrix.hpp"
#include "signmat/spectral.hpp"
#include "signmat/tail_probe.hpp"
#include "signmat/version.hpp"

namespace signmat {

namespace {

using nlohmann::json;
using Kind = ParamSpec::Kind;

ParamSpec integer(std::string name, long long min, long long max,
                  long long fallback, std::string help) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = Kind::integer;
  spec.min = static_cast<double>(min);
  spec.max = static_cast<double>(max);
  spec.fallback = fallback;
  spec.help = std::move(help);
  return spec;
}

ParamSpec real(std::string name, double min, double max, double fallback,
               std::string help) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = Kind::real;
  spec.min = min;
  spec.max = max;
  spec.fallback = fallback;
  spec.help = std::move(help);
  return spec;
}

ParamSpec seed_param() {
  ParamSpec spec;
  spec.name = "seed";
  spec.kind = Kind::unsigned64;
  spec.fallback = std::uint64_t{1};
  spec.help = "master seed; per-job seeds are derived from it";
  return spec;
}

ParamSpec text(std::string name, std::vector<std::string> choices,
               std::string fallback, std::string help) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = Kind::text;
  spec.choices = std::move(choices);
  spec.fallback = std::move(fallback);
  spec.help = std::move(help);
  return spec;
}

std::vector<ExperimentSpec> build_registry() {
  std::vector<ExperimentSpec> reg;

  reg.push_back(
      {"mp-convergence",
       "KS distance between the empirical spectral distribution of S and the "
       "Marchenko-Pastur law over seeded samples",
       {integer("p", 1, 1 << 20, 512, "row count"),
        integer("n", 1, 1 << 20, 1024, "column count (requires p <= n)"),
        integer("seeds", 1, 1000000, 20, "number of seeded samples"),
        seed_param(),
        integer("quad_steps", 16, 1 << 24, 4096,
                "Simpson panels for the MP CDF")}});

  reg.push_back(
      {"edge-deviation",
       "Monte Carlo probability of an eigenvalue of S outside "
       "[a - eps, b + eps], next to the closed-form tail bound",
       {integer("p", 1, 1 << 20, 512, "row count"),
        integer("n", 1, 1 << 20, 1024, "column count (requires p <= n)"),
        real("eps", 1e-9, 1.0, 0.5, "edge margin"),
        integer("trials", 1, 1000000000, 200, "Monte Carlo trials"),
        seed_param(),
        real("C", 1e-9, 1e9, 1.0, "constant in the tail bound")}});

  reg.push_back(
      {"lambda-min-tail",
       "Monte Carlo probability of lambda_min(S) <= delta^2/8 at "
       "p = round((1-delta) n), with the closed-form bound and the (LPRT) "
       "comparison",
       {integer("n", 4, 1 << 20, 4096, "column count"),
        real("delta", 1e-9, 0.5, 0.5, "aspect defect, p = round((1-delta)n)"),
        integer("trials", 1, 1000000000, 100, "Monte Carlo trials"),
        seed_param(),
        real("C", 1e-9, 1e9, 1.0, "constant in the tail bound"),
        real("lprt_A", 1e-9, 1e9, 1.0, "A in the comparison threshold"),
        real("lprt_a", 1e-9, 0.999999999, 0.5,
             "a in the comparison threshold"),
        real("lprt_C", 1e-9, 1e9, 1.0, "C in the comparison probability")}});

  reg.push_back(
      {"cheb-identities",
       "Recurrence vs trigonometric Chebyshev values and recurrence vs "
       "closed-form shifted polynomials on dense grids",
       {integer("l_max", 0, 200, 30, "highest degree checked"),
        integer("theta_points", 1, 1000000, 1000, "theta grid size"),
        integer("draws", 1, 10000000, 1000, "random parameter draws"),
        seed_param()}});

  reg.push_back(
      {"comb-oracle",
       "Exhaustive configuration count vs exact mean trace of T(l); all "
       "values exact rationals",
       {integer("p", 1, 64, 2, "row count (p*n <= 20)"),
        integer("n", 1, 64, 2, "column count"),
        integer("l", 0, 8, 2, "degree")}});

  reg.push_back(
      {"trace-bounds",
       "Polynomial lower-bound sampling, the mean-trace ceiling at desk "
       "scale, and the trace-growth floor on a constructed escape matrix",
       {integer("l_max", 2, 200, 20, "highest (even) degree"),
        integer("mu_samples", 1, 100000000, 10000, "mu samples per cell"),
        integer("n_ref", 10, 1 << 20, 100, "column count realizing the y grid"),
        seed_param(),
        real("C", 1e-9, 1e9, 1.0, "constant for the growth-floor check")}});

  reg.push_back(
      {"l1-embed",
       "Embedding certificates for random sign systems: sphere minimum of "
       "the Khinchine functional with a sigma_min floor",
       {integer("n", 1, 1 << 16, 128, "ambient dimension"),
        real("delta", 1e-9, 0.99, 0.5, "oversampling, N = round((1+delta)n)"),
        integer("seeds", 1, 100000, 20, "number of sign systems"),
        integer("restarts", 1, 100000, 64, "descent restarts"),
        integer("iters", 1, 1000000, 500, "descent iterations per restart"),
        seed_param(),
        real("c0", 1e-9, 1e9, 1.0, "constant in the reference c(delta)"),
        real("log_exponent", 0.0, 4.0, 1.0,
             "exponent on log(1/delta) in c(delta)"),
        integer("w_samples", 1, 10000000, 1000,
                "unit vectors sampled for the w-block ceiling"),
        integer("median_samples", 100, 100000000, 10000,
                "samples for the single-row dot probability")}});

  reg.push_back(
      {"constant-fit",
       "Empirical fits of the unspecified universal constants",
       {text("target", {"theorem1", "cheb2", "c0"}, "theorem1",
             "which constant to fit"),
        integer("n", 4, 1 << 20, 256, "column count"),
        real("y", 1e-6, 1.0, 0.5, "aspect ratio, p = round(y n)"),
        integer("trials", 1, 1000000000, 100, "Monte Carlo trials per cell"),
        seed_param(),
        real("eps_min", 1e-9, 1.0, 0.25, "smallest eps in the grid"),
        real("eps_max", 1e-9, 1.0, 1.0, "largest eps in the grid"),
        integer("eps_count", 1, 1000, 4, "eps grid size"),
        integer("l_max", 2, 200, 20, "highest even degree (cheb2)"),
        real("delta", 1e-9, 0.99, 0.5, "oversampling (c0)"),
        integer("seeds", 1, 100000, 8, "sign systems (c0)"),
        integer("restarts", 1, 100000, 16, "descent restarts (c0)"),
        integer("iters", 1, 1000000, 300, "descent iterations (c0)")}});

  return reg;
}

const ParamSpec* find_param(const ExperimentSpec& spec,
                            const std::string& name) {
  for (const auto& param : spec.params)
    if (param.name == name) return &param;
  return nullptr;
}

void validate_parameter(const std::string& experiment, const ParamSpec& spec,
                        const json& value) {
  const std::string where =
      "config: parameter '" + spec.name + "' of " + experiment;
  switch (spec.kind) {
    case Kind::integer: {
      if (!value.is_number_integer() && !value.is_number_unsigned())
        throw ConfigError(where + " must be an integer");
      const double v = value.get<double>();
      if (v < spec.min || v > spec.max)
        throw ConfigError(where + " out of range [" +
                          std::to_string(static_cast<long long>(spec.min)) +
                          ", " +
                          std::to_string(static_cast<long long>(spec.max)) +
                          "]");
      break;
    }
    case Kind::unsigned64: {
      if (value.is_number_unsigned()) break;
      if (value.is_number_integer() && value.get<long long>() >= 0) break;
      throw ConfigError(where + " must be a nonnegative integer");
    }
    case Kind::real: {
      if (!value.is_number())
        throw ConfigError(where + " must be a number");
      const double v = value.get<double>();
      if (!(v >= spec.min) || !(v <= spec.max))
        throw ConfigError(where + " out of range [" + std::to_string(spec.min) +
                          ", " + std::to_string(spec.max) + "]");
      break;
    }
    case Kind::text: {
      if (!value.is_string()) throw ConfigError(where + " must be a string");
      const std::string v = value.get<std::string>();
      for (const auto& choice : spec.choices)
        if (choice == v) return;
      std::string allowed;
      for (const auto& choice : spec.choices)
        allowed += (allowed.empty() ? "" : ", ") + choice;
      throw ConfigError(where + " must be one of: " + allowed);
    }
  }
}

int get_int(const json& params, const char* key) {
  return params.at(key).get<int>();
}
double get_real(const json& params, const char* key) {
  return params.at(key).get<double>();
}
std::uint64_t get_seed(const json& params, const char* key = "seed") {
  return params.at(key).get<std::uint64_t>();
}

std::string cell(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

json make_report(const ExperimentConfig& config, json results) {
  return json{{"experiment", config.experiment},
              {"version", std::string(kToolName) + " " + kVersion},
              {"generator", kGeneratorId},
              {"config",
               {{"experiment", config.experiment},
                {"parameters", config.parameters},
                {"out", config.out},
                {"format", config.format}}},
              {"results", std::move(results)}};
}

// --- runners -------------------------------------------------------------

ExperimentOutput run_mp_convergence(const ExperimentConfig& config,
                                    int threads) {
  const json& prm = config.parameters;
  const int p = get_int(prm, "p");
  const int n = get_int(prm, "n");
  const int seeds = get_int(prm, "seeds");
  const int quad_steps = get_int(prm, "quad_steps");
  const std::uint64_t master = get_seed(prm);
  if (p > n) throw std::domain_error("mp-convergence: requires p <= n");

  struct Row {
    std::uint64_t seed;
    double ks, lambda_min, lambda_max;
  };
  std::vector<Row> rows(static_cast<std::size_t>(seeds));
  parallel_for(seeds, threads, [&](int i) {
    const std::uint64_t s = derive_seed(master, static_cast<std::uint64_t>(i));
    const SignMatrix x = gen_sign_matrix(p, n, s);
    const SpectralSummary summary = make_spectral_summary(covariance(x), n);
    rows[static_cast<std::size_t>(i)] = {
        s, ks_distance(summary, summary.y, quad_steps), summary.lambda_min,
        summary.lambda_max};
  });

  const double y = static_cast<double>(p) / n;
  const auto [a, b] = mp_edges(y);
  double mean_ks = 0.0;
  json per_seed = json::array();
  ExperimentOutput out;
  out.csv_header = {"index", "seed", "ks", "lambda_min", "lambda_max"};
  for (int i = 0; i < seeds; ++i) {
    const Row& row = rows[static_cast<std::size_t>(i)];
    mean_ks += row.ks;
    per_seed.push_back({{"index", i},
                        {"seed", row.seed},
                        {"ks", row.ks},
                        {"lambda_min", row.lambda_min},
                        {"lambda_max", row.lambda_max}});
    out.csv_rows.push_back({cell(i), cell(row.seed), cell(row.ks),
                            cell(row.lambda_min), cell(row.lambda_max)});
  }
  mean_ks /= seeds;

  out.report = make_report(config, json{{"y", y},
                                        {"a", a},
                                        {"b", b},
                                        {"per_seed", std::move(per_seed)},
                                        {"mean_ks", mean_ks}});
  return out;
}

void append_trial_csv(ExperimentOutput& out, const TrialBatchReport& batch) {
  out.csv_header = {"index", "seed", "lambda_min", "lambda_max", "hit"};
  for (const auto& rec : batch.records)
    out.csv_rows.push_back({cell(rec.index), cell(rec.seed),
                            cell(rec.lambda_min), cell(rec.lambda_max),
                            cell(rec.hit)});
}

ExperimentOutput run_edge_deviation(const ExperimentConfig& config,
                                    int threads) {
  const json& prm = config.parameters;
  const int p = get_int(prm, "p");
  const int n = get_int(prm, "n");
  const double eps = get_real(prm, "eps");
  const double C = get_real(prm, "C");
  const TrialBatchReport batch = estimate_outside_probability(
      p, n, eps, get_int(prm, "trials"), get_seed(prm), threads);

  json results = batch_report_json(batch);
  const double y = static_cast<double>(p) / n;
  results["theorem1"] = {{"C", C},
                         {"bound", theorem1_bound(p, eps, C)},
                         {"restriction_ok", theorem1_restriction(n, y, eps, C)}};
  const ConstantFit fit = fit_theorem1_constant({batch});
  results["theorem1_fit"] = {{"C", fit.C},
                             {"batches_used", fit.batches_used},
                             {"from_upper_bounds", fit.from_upper_bounds}};

  ExperimentOutput out;
  out.report = make_report(config, std::move(results));
  append_trial_csv(out, batch);
  return out;
}

ExperimentOutput run_lambda_min_tail(const ExperimentConfig& config,
                                     int threads) {
  const json& prm = config.parameters;
  const int n = get_int(prm, "n");
  const double delta = get_real(prm, "delta");
  const double C = get_real(prm, "C");
  const TrialBatchReport batch = estimate_lambda_min_tail(
      n, delta, get_int(prm, "trials"), get_seed(prm), threads);

  json results = batch_report_json(batch);
  results["threshold"] = delta * delta / 8.0;
  results["theorem2"] = {{"C", C}, {"bound", theorem2_bound(n, delta, C)}};
  const ConstantFit fit = fit_theorem2_constant(batch);
  json fitted = {{"C", fit.C}, {"from_upper_bounds", fit.from_upper_bounds}};
  fitted["bound"] =
      fit.C > 0.0 ? json(theorem2_bound(n, delta, fit.C)) : json();
  results["theorem2_fit"] = std::move(fitted);
  const auto [lprt_threshold, lprt_probability] =
      lprt_bound(delta, get_real(prm, "lprt_A"), get_real(prm, "lprt_a"),
                 get_real(prm, "lprt_C"), n);
  results["lprt"] = {{"threshold", lprt_threshold},
                     {"probability", lprt_probability}};

  ExperimentOutput out;
  out.report = make_report(config, std::move(results));
  append_trial_csv(out, batch);
  return out;
}

ExperimentOutput run_cheb_identities(const ExperimentConfig& config,
                                     int /*threads*/) {
  const json& prm = config.parameters;
  const int l_max = get_int(prm, "l_max");
  const int theta_points = get_int(prm, "theta_points");
  const int draws = get_int(prm, "draws");

  double trig_max = 0.0;
  double trig_scaled_max = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    for (int k = 0; k < theta_points; ++k) {
      const double theta =
          std::numbers::pi * (k + 0.5) / static_cast<double>(theta_points);
      const auto [lhs, rhs] = cheb_u_trig_check(l, theta);
      const double dev = std::abs(lhs - rhs);
      trig_max = std::max(trig_max, dev);
      trig_scaled_max = std::max(trig_scaled_max, dev / (l + 1));
    }
  }

  Xoshiro256ss rng(get_seed(prm));
  double closed_max = 0.0;
  for (int d = 0; d < draws; ++d) {
    const int n = 2 + static_cast<int>(rng.next() % 99);  // 2..100
    const int p = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(
                                                        n - 1));  // 2..n
    const int l = static_cast<int>(rng.next() % 31);
    const double mu = -10.0 + 20.0 * rng.next_unit();
    const auto params = ShiftedChebParams::from_dims(p, n, l);
    const double via_recurrence = shifted_p(params, mu);
    const double via_cheb = shifted_p_via_cheb(params, mu);
    const double rel =
        std::abs(via_recurrence - via_cheb) /
        (1.0 + std::max(std::abs(via_recurrence), std::abs(via_cheb)));
    closed_max = std::max(closed_max, rel);
  }

  const bool trig_pass = trig_max <= 1e-9;
  const bool closed_pass = closed_max <= 1e-8;
  json results = {
      {"trig",
       {{"l_max", l_max},
        {"theta_points", theta_points},
        {"max_abs_dev", trig_max},
        {"max_scaled_dev", trig_scaled_max},
        {"tolerance", 1e-9},
        {"pass", trig_pass}}},
      {"closed_form",
       {{"draws", draws},
        {"max_rel_dev", closed_max},
        {"tolerance", 1e-8},
        {"pass", closed_pass}}}};

  ExperimentOutput out;
  out.report = make_report(config, std::move(results));
  out.csv_header = {"check", "max_dev", "tolerance", "pass"};
  out.csv_rows.push_back(
      {"trig", cell(trig_max), cell(1e-9), cell(trig_pass)});
  out.csv_rows.push_back(
      {"closed_form", cell(closed_max), cell(1e-8), cell(closed_pass)});
  return out;
}

ExperimentOutput run_comb_oracle(const ExperimentConfig& config,
                                 int /*threads*/) {
  const json& prm = config.parameters;
  const ConfigCountResult r = compare_comb_identity(
      get_int(prm, "p"), get_int(prm, "n"), get_int(prm, "l"));

  json results = {{"p", r.p},
                  {"n", r.n},
                  {"l", r.degree},
                  {"config_count", r.config_count.str()},
                  {"exact_mean_trace", rational_to_string(r.exact_mean_trace)},
                  {"predicted_mean", rational_to_string(r.predicted_mean)},
                  {"discrepancy", rational_to_string(r.discrepancy)}};

  ExperimentOutput out;
  out.report = make_report(config, std::move(results));
  out.csv_header = {"p", "n", "l", "config_count", "exact_mean_trace",
                    "predicted_mean", "discrepancy"};
  out.csv_rows.push_back({cell(r.p), cell(r.n), cell(r.degree),
                          r.config_count.str(),
                          rational_to_string(r.exact_mean_trace),
                          rational_to_string(r.predicted_mean),
                          rational_to_string(r.discrepancy)});
  return out;
}

ExperimentOutput run_trace_bounds(const ExperimentConfig& config,
                                  int threads) {
  const json& prm = config.parameters;
  const int l_max = get_int(prm, "l_max");
  const int mu_samples = get_int(prm, "mu_samples");
  const int n_ref = get_int(prm, "n_ref");
  const double C = get_real(prm, "C");
  const std::uint64_t master = get_seed(prm);

  // Sample the universal polynomial floor across the y grid {0.1, ..., 1.0}.
  struct Cell {
    double y;
    int degree;
    long long violations;
    double min_margin;
  };
  std::vector<std::pair<int, int>> dims;
  std::vector<Cell> cells;
  for (int iy = 1; iy <= 10; ++iy) {
    const int p = std::max(
        2, static_cast<int>(std::llround(0.1 * iy * n_ref)));
    dims.emplace_back(p, n_ref);
    for (int l = 2; l <= l_max; l += 2)
      cells.push_back({static_cast<double>(p) / n_ref, l, 0, 0.0});
  }
  parallel_for(static_cast<int>(cells.size()), threads, [&](int c) {
    Cell& cur = cells[static_cast<std::size_t>(c)];
    const int p = static_cast<int>(std::llround(cur.y * n_ref));
    const auto params = ShiftedChebParams::from_dims(p, n_ref, cur.degree);
    const double floor_value = bound_ch1(cur.degree, params.y);
    Xoshiro256ss rng(derive_seed(master, static_cast<std::uint64_t>(c)));
    double min_margin = std::numeric_limits<double>::infinity();
    long long violations = 0;
    for (int s = 0; s < mu_samples; ++s) {
      const double mu = -10.0 + 20.0 * rng.next_unit();
      const double margin = shifted_p(params, mu) - floor_value;
      min_margin = std::min(min_margin, margin);
      if (margin < 0.0) ++violations;
    }
    cur.violations = violations;
    cur.min_margin = min_margin;
  });

  long long total_violations = 0;
  json cell_rows = json::array();
  ExperimentOutput out;
  out.csv_header = {"y", "l", "violations", "min_margin"};
  for (const auto& c : cells) {
    total_violations += c.violations;
    cell_rows.push_back({{"y", c.y},
                         {"l", c.degree},
                         {"violations", c.violations},
                         {"min_margin", c.min_margin}});
    out.csv_rows.push_back(
        {cell(c.y), cell(c.degree), cell(c.violations), cell(c.min_margin)});
  }

  const Ch2FitResult ch2 =
      fit_ch2_constant(dims, [&] {
        std::vector<int> degrees;
        for (int l = 2; l <= l_max; l += 2) degrees.push_back(l);
        return degrees;
      }(), {0.25, 0.5, 1.0});

  // Mean-trace ceiling at desk scale: exact E Tr T(2) at p = n = 2 against
  // l^10 y^{(l-5)/2}.
  const BigRational exact_desk = exact_expected_trace(2, 2, 2);
  const double ceiling_desk = trace_upper_bound(2, 1.0);

  // Constructed escape matrix: identical rows give lambda_max(S) = p, so T
  // has the eigenvalue p - 1 far outside the bulk.
  json lemma3;
  {
    const int p = 6, n = 8, l = 2;
    const double eps = 1.0;
    const SignMatrix x = sign_matrix_from_entries(
        p, n, std::vector<std::int8_t>(static_cast<std::size_t>(p) * n, 1));
    const double y = static_cast<double>(p) / n;
    const std::vector<double> mu = symmetric_eigenvalues(t_matrix(x));
    double max_excursion = 0.0;
    for (const double m : mu)
      max_excursion = std::max(max_excursion, std::abs(m - y));
    const bool escaped = max_excursion >= 2.0 * std::sqrt(y) + eps;
    const bool admissible = trgeq_condition(n, l, y, eps, C);
    const TraceSequence seq = t_sequence(x, l);
    const double trace_value = seq.unnormalized(l);
    const double floor_core = std::pow(y, 0.5 * l);
    const double floor_fitted =
        ch2.C > 0.0 ? floor_core * std::exp(l * std::sqrt(eps) /
                                            (ch2.C * std::pow(y, 0.25)))
                    : floor_core;
    lemma3 = {{"p", p},
              {"n", n},
              {"l", l},
              {"eps", eps},
              {"max_excursion", max_excursion},
              {"escaped", escaped},
              {"condition_ok", admissible},
              {"trace", trace_value},
              {"floor_core", floor_core},
              {"core_ok", trace_value >= floor_core},
              {"floor_fitted", floor_fitted},
              {"fitted_ok", trace_value >= floor_fitted}};
  }

  out.report = make_report(
      config,
      json{{"ch1",
            {{"cells", std::move(cell_rows)},
             {"total_violations", total_violations}}},
           {"ch2_fit", {{"C", ch2.C}, {"points", ch2.points}}},
           {"trace_ceiling_desk",
            {{"p", 2},
             {"n", 2},
             {"l", 2},
             {"exact_mean_trace", rational_to_string(exact_desk)},
             {"ceiling", ceiling_desk},
             {"holds", static_cast<double>(exact_desk) <= ceiling_desk}}},
           {"lemma3", std::move(lemma3)}});
  return out;
}

ExperimentOutput run_l1_embed(const ExperimentConfig& config, int threads) {
  const json& prm = config.parameters;
  const int n = get_int(prm, "n");
  const double delta = get_real(prm, "delta");
  const int seeds = get_int(prm, "seeds");
  const int restarts = get_int(prm, "restarts");
  const int iters = get_int(prm, "iters");
  const double c0 = get_real(prm, "c0");
  const double log_exponent = get_real(prm, "log_exponent");
  const int w_samples = get_int(prm, "w_samples");
  const int median_samples = get_int(prm, "median_samples");
  const std::uint64_t master = get_seed(prm);

  struct PerSeed {
    EmbeddingCertificate cert;
    double sigma_min_v = 0.0;
    double w_upper = 0.0;
    bool has_w = false;
  };
  std::vector<PerSeed> rows(static_cast<std::size_t>(seeds));
  parallel_for(seeds, threads, [&](int i) {
    PerSeed& row = rows[static_cast<std::size_t>(i)];
    const std::uint64_t base = 3 * static_cast<std::uint64_t>(i);
    const SignSystem sys =
        gen_sign_system(n, delta, derive_seed(master, base));
    row.cert = min_khinchine(sys, restarts, iters,
                             derive_seed(master, base + 1), 1, c0,
                             log_exponent);
    row.sigma_min_v = sigma_min_normalized(sys);
    row.has_w = sys.w_count >= 1;
    if (row.has_w)
      row.w_upper = w_block_upper(sys, w_samples, derive_seed(master, base + 2));
  });

  const double delta_scale =
      std::pow(delta, 2.5) / std::pow(std::log(1.0 / delta), log_exponent);
  double c0_fit_min = std::numeric_limits<double>::infinity();
  double c0_fit_max = 0.0;
  json per_seed = json::array();
  ExperimentOutput out;
  out.csv_header = {"index",          "system_seed", "min_estimate",
                    "sigma_min_lower", "c0_fit",      "sigma_min_v",
                    "w_upper"};
  for (int i = 0; i < seeds; ++i) {
    const PerSeed& row = rows[static_cast<std::size_t>(i)];
    const double c0_fit = row.cert.min_estimate / delta_scale;
    c0_fit_min = std::min(c0_fit_min, c0_fit);
    c0_fit_max = std::max(c0_fit_max, c0_fit);
    json entry = {{"index", i},
                  {"certificate", certificate_json(row.cert)},
                  {"sigma_min_v", row.sigma_min_v},
                  {"c1_sample", row.sigma_min_v / delta},
                  {"c0_fit", c0_fit}};
    if (row.has_w) {
      entry["w_upper"] = row.w_upper;
      entry["c3_sample"] = row.w_upper / std::sqrt(delta);
    }
    per_seed.push_back(std::move(entry));
    out.csv_rows.push_back({cell(i), cell(row.cert.system_seed),
                            cell(row.cert.min_estimate),
                            cell(row.cert.sigma_min_lower), cell(c0_fit),
                            cell(row.sigma_min_v),
                            row.has_w ? cell(row.w_upper) : ""});
  }

  const double median_prob = median_dot_check(
      n, median_samples, derive_seed(master, 3 * static_cast<std::uint64_t>(seeds)));

  out.report = make_report(
      config,
      json{{"n", n},
           {"delta", delta},
           {"per_seed", std::move(per_seed)},
           {"c0_fit_min", c0_fit_min},
           {"c0_fit_max", c0_fit_max},
           {"c0_fit_ratio", c0_fit_min > 0.0 ? c0_fit_max / c0_fit_min : 0.0},
           {"c_delta_ref", c_delta(delta, c0, log_exponent)},
           {"median_dot_probability", median_prob}});
  return out;
}

ExperimentOutput run_constant_fit(const ExperimentConfig& config,
                                  int threads) {
  const json& prm = config.parameters;
  const std::string target = prm.at("target").get<std::string>();
  const std::uint64_t master = get_seed(prm);
  ExperimentOutput out;

  if (target == "theorem1") {
    const int n = get_int(prm, "n");
    const int p =
        std::max(1, static_cast<int>(std::llround(get_real(prm, "y") * n)));
    const int trials = get_int(prm, "trials");
    const double eps_min = get_real(prm, "eps_min");
    const double eps_max = get_real(prm, "eps_max");
    const int eps_count = get_int(prm, "eps_count");
    std::vector<TrialBatchReport> batches;
    json cells = json::array();
    out.csv_header = {"eps", "hits", "trials", "estimate", "ci_low",
                      "ci_high"};
    for (int k = 0; k < eps_count; ++k) {
      const double eps =
          eps_count == 1
              ? eps_min
              : eps_min + (eps_max - eps_min) * k / (eps_count - 1.0);
      batches.push_back(estimate_outside_probability(
          p, n, eps, trials, derive_seed(master, static_cast<std::uint64_t>(k)),
          threads));
      const TrialBatchReport& b = batches.back();
      cells.push_back({{"eps", eps},
                       {"hits", b.hits},
                       {"trials", b.trials},
                       {"estimate", b.estimate},
                       {"ci_low", b.ci_low},
                       {"ci_high", b.ci_high}});
      out.csv_rows.push_back({cell(eps), cell(b.hits), cell(b.trials),
                              cell(b.estimate), cell(b.ci_low),
                              cell(b.ci_high)});
    }
    const ConstantFit fit = fit_theorem1_constant(batches);
    out.report = make_report(
        config, json{{"target", target},
                     {"p", p},
                     {"n", n},
                     {"cells", std::move(cells)},
                     {"fit",
                      {{"C", fit.C},
                       {"batches_used", fit.batches_used},
                       {"from_upper_bounds", fit.from_upper_bounds}}}});
    return out;
  }

  if (target == "cheb2") {
    const int n = get_int(prm, "n");
    const int p =
        std::max(2, static_cast<int>(std::llround(get_real(prm, "y") * n)));
    const int l_max = get_int(prm, "l_max");
    std::vector<int> degrees;
    for (int l = 2; l <= l_max; l += 2) degrees.push_back(l);
    const double eps_min = get_real(prm, "eps_min");
    const double eps_max = get_real(prm, "eps_max");
    const int eps_count = get_int(prm, "eps_count");
    std::vector<double> epsilons;
    for (int k = 0; k < eps_count; ++k)
      epsilons.push_back(eps_count == 1 ? eps_min
                                        : eps_min + (eps_max - eps_min) * k /
                                              (eps_count - 1.0));
    const Ch2FitResult fit = fit_ch2_constant({{p, n}}, degrees, epsilons);
    out.report = make_report(config, json{{"target", target},
                                          {"p", p},
                                          {"n", n},
                                          {"fit",
                                           {{"C", fit.C},
                                            {"points", fit.points}}}});
    out.csv_header = {"target", "C", "points"};
    out.csv_rows.push_back({target, cell(fit.C), cell(fit.points)});
    return out;
  }

  // target == "c0"
  const int n = get_int(prm, "n");
  const double delta = get_real(prm, "delta");
  const int seeds = get_int(prm, "seeds");
  const int restarts = get_int(prm, "restarts");
  const int iters = get_int(prm, "iters");
  const double delta_scale = std::pow(delta, 2.5) / std::log(1.0 / delta);
  std::vector<double> fits(static_cast<std::size_t>(seeds));
  parallel_for(seeds, threads, [&](int i) {
    const std::uint64_t base = 2 * static_cast<std::uint64_t>(i);
    const SignSystem sys = gen_sign_system(n, delta, derive_seed(master, base));
    const EmbeddingCertificate cert = min_khinchine(
        sys, restarts, iters, derive_seed(master, base + 1), 1);
    fits[static_cast<std::size_t>(i)] = cert.min_estimate / delta_scale;
  });
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double mean = 0.0;
  json values = json::array();
  out.csv_header = {"index", "c0_fit"};
  for (int i = 0; i < seeds; ++i) {
    const double f = fits[static_cast<std::size_t>(i)];
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    mean += f;
    values.push_back(f);
    out.csv_rows.push_back({cell(i), cell(f)});
  }
  mean /= seeds;
  out.report = make_report(config, json{{"target", target},
                                        {"n", n},
                                        {"delta", delta},
                                        {"c0_fits", std::move(values)},
                                        {"c0_fit_min", lo},
                                        {"c0_fit_max", hi},
                                        {"c0_fit_mean", mean},
                                        {"c0_fit_ratio", lo > 0.0 ? hi / lo : 0.0}});
  return out;
}

}  // namespace

const std::vector<ExperimentSpec>& experiment_registry() {
  static const std::vector<ExperimentSpec> registry = build_registry();
  return registry;
}

const ExperimentSpec* find_experiment(const std::string& name) {
  for (const auto& spec : experiment_registry())
    if (spec.name == name) return &spec;
  return nullptr;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& error) {
    throw ConfigError(std::string("config: ") + error.what());
  }
  if (!doc.is_object())
    throw ConfigError("config: top-level document must be an object");

  for (const auto& [key, value] : doc.items()) {
    if (key != "experiment" && key != "parameters" && key != "out" &&
        key != "format")
      throw ConfigError("config: unknown key '" + key + "'");
  }

  if (!doc.contains("experiment") || !doc["experiment"].is_string())
    throw ConfigError("config: missing string key 'experiment'");
  ExperimentConfig config;
  config.experiment = doc["experiment"].get<std::string>();
  const ExperimentSpec* spec = find_experiment(config.experiment);
  if (spec == nullptr)
    throw ConfigError("config: unknown experiment '" + config.experiment +
                      "'");

  json params = json::object();
  if (doc.contains("parameters")) {
    if (!doc["parameters"].is_object())
      throw ConfigError("config: 'parameters' must be an object");
    params = doc["parameters"];
  }
  for (const auto& [key, value] : params.items()) {
    const ParamSpec* param = find_param(*spec, key);
    if (param == nullptr)
      throw ConfigError("config: unknown parameter '" + key +
                        "' for experiment '" + config.experiment + "'");
    validate_parameter(config.experiment, *param, value);
  }
  for (const auto& param : spec->params)
    if (!params.contains(param.name)) params[param.name] = param.fallback;
  config.parameters = std::move(params);

  if (doc.contains("out")) {
    if (!doc["out"].is_string())
      throw ConfigError("config: 'out' must be a string");
    config.out = doc["out"].get<std::string>();
  }
  if (doc.contains("format")) {
    if (!doc["format"].is_string() ||
        (doc["format"] != "json" && doc["format"] != "csv"))
      throw ConfigError("config: 'format' must be \"json\" or \"csv\"");
    config.format = doc["format"].get<std::string>();
  }
  return config;
}

std::string serialize_config(const ExperimentConfig& config) {
  return json{{"experiment", config.experiment},
              {"parameters", config.parameters},
              {"out", config.out},
              {"format", config.format}}
      .dump();
}

ExperimentOutput run_experiment(const ExperimentConfig& config, int threads) {
  if (threads < 1) threads = 1;
  if (config.experiment == "mp-convergence")
    return run_mp_convergence(config, threads);
  if (config.experiment == "edge-deviation")
    return run_edge_deviation(config, threads);
  if (config.experiment == "lambda-min-tail")
    return run_lambda_min_tail(config, threads);
  if (config.experiment == "cheb-identities")
    return run_cheb_identities(config, threads);
  if (config.experiment == "comb-oracle")
    return run_comb_oracle(config, threads);
  if (config.experiment == "trace-bounds")
    return run_trace_bounds(config, threads);
  if (config.experiment == "l1-embed") return run_l1_embed(config, threads);
  if (config.experiment == "constant-fit")
    return run_constant_fit(config, threads);
  throw ConfigError("config: unknown experiment '" + config.experiment + "'");
}

std::string render_csv(const ExperimentOutput& output) {
  std::ostringstream out;
  for (std::size_t i = 0; i < output.csv_header.size(); ++i) {
    if (i > 0) out << ',';
    out << output.csv_header[i];
  }
  out << '\n';
  for (const auto& row : output.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

void write_report(const ExperimentConfig& config,
                  const ExperimentOutput& output) {
  std::string body;
  if (config.format == "csv") {
    body = render_csv(output);
  } else {
    json report = output.report;
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    report["timestamp"] = stamp;
    body = report.dump(2) + "\n";
  }
  if (config.out == "-" || config.out.empty()) {
    std::cout << body;
    std::cout.flush();
  } else {
    std::ofstream file(config.out, std::ios::binary);
    if (!file)
      throw std::runtime_error("write_report: cannot open " + config.out);
    file << body;
  }
}

}  // namespace signmat
