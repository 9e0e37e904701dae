#include "signmat/comb_oracle.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace signmat {

namespace {

using Int128 = __int128;

BigInt to_bigint(Int128 v) {
  const bool negative = v < 0;
  unsigned __int128 u =
      negative ? ~static_cast<unsigned __int128>(v) + 1
               : static_cast<unsigned __int128>(v);
  BigInt result = static_cast<std::uint64_t>(u >> 64);
  result <<= 64;
  result |= static_cast<std::uint64_t>(u);
  return negative ? -result : result;
}

void check_dims(const char* where, int p, int n, int degree) {
  if (p < 1 || n < 1)
    throw std::invalid_argument(std::string(where) +
                                ": dimensions must be >= 1");
  if (degree < 0)
    throw std::invalid_argument(std::string(where) + ": degree must be >= 0");
}

void check_enumeration_budget(int p, int n, int degree) {
  double cost = 1.0;
  for (int k = 0; k < degree; ++k) {
    cost *= static_cast<double>(p) * n;
    if (cost > 1e8)
      throw std::length_error(
          "count_configurations: p^l * n^l exceeds the 1e8 budget");
  }
}

void check_exact_budget(int p, int n, int degree) {
  if (p * n > 20)
    throw std::length_error(
        "exact_expected_trace: p*n must be <= 20 (2^{pn} sweep)");
  if (degree > 8)
    throw std::length_error("exact_expected_trace: degree must be <= 8");
}

// Walk enumerator with incremental edge-parity bookkeeping. Levels
// alternate v_k (edge from the previous row index) and u_k; the last v adds
// the closing edge back to i.
class ConfigCounter {
 public:
  ConfigCounter(int p, int n, int degree)
      : p_(p), n_(n), degree_(degree), edge_count_(p * n, 0) {}

  std::uint64_t run() {
    for (int i = 0; i < p_; ++i) {
      anchor_ = i;
      descend_v(1, i, -1);
    }
    return total_;
  }

 private:
  void bump(int u, int v, int delta) {
    int& count = edge_count_[static_cast<std::size_t>(u) * n_ + v];
    count += delta;
    odd_edges_ += (count % 2 != 0) ? 1 : -1;
  }

  void descend_v(int k, int prev_u, int prev_v) {
    // 2(l - k) + 2 edges are still to come; parity can only be repaired at
    // one edge per addition.
    if (odd_edges_ > 2 * (degree_ - k) + 2) return;
    for (int v = 0; v < n_; ++v) {
      if (v == prev_v) continue;
      bump(prev_u, v, +1);
      if (k == degree_) {
        bump(anchor_, v, +1);
        if (odd_edges_ == 0) ++total_;
        bump(anchor_, v, -1);
      } else {
        descend_u(k, prev_u, v);
      }
      bump(prev_u, v, -1);
    }
  }

  void descend_u(int k, int prev_u, int v) {
    const bool last = (k == degree_ - 1);
    for (int u = 0; u < p_; ++u) {
      if (u == prev_u) continue;
      if (last && u == anchor_) continue;  // u_{l-1} != i
      bump(u, v, +1);
      descend_v(k + 1, u, v);
      bump(u, v, -1);
    }
  }

  int p_;
  int n_;
  int degree_;
  int anchor_ = 0;  // i
  std::vector<int> edge_count_;
  int odd_edges_ = 0;
  std::uint64_t total_ = 0;
};

}  // namespace

BigInt count_configurations(int p, int n, int degree) {
  check_dims("count_configurations", p, n, degree);
  check_enumeration_budget(p, n, degree);
  if (degree == 0) return BigInt(p);
  if (degree == 1) return BigInt(0);  // chain degenerates to i != i
  ConfigCounter counter(p, n, degree);
  return BigInt(counter.run());
}

std::vector<BigRational> exact_expected_traces(int p, int n, int max_degree) {
  check_dims("exact_expected_trace", p, n, max_degree);
  check_exact_budget(p, n, max_degree);

  const int cells = p * p;
  std::vector<Int128> trace_sum(static_cast<std::size_t>(max_degree) + 1, 0);
  std::vector<int> a(cells, 0);       // X X^T - n I
  std::vector<Int128> prev(cells, 0);  // B(l-1)
  std::vector<Int128> curr(cells, 0);  // B(l)
  std::vector<Int128> next(cells, 0);
  std::vector<int> sign(static_cast<std::size_t>(p) * n, 0);

  const std::uint64_t matrices = std::uint64_t{1} << (p * n);
  const Int128 shift_coeff = static_cast<Int128>(p - 2);
  const Int128 mix_coeff =
      static_cast<Int128>(p - 1) * static_cast<Int128>(n - 1);

  for (std::uint64_t mask = 0; mask < matrices; ++mask) {
    for (int k = 0; k < p * n; ++k)
      sign[static_cast<std::size_t>(k)] = ((mask >> k) & 1u) ? 1 : -1;
    for (int i = 0; i < p; ++i)
      for (int j = i; j < p; ++j) {
        int dot = 0;
        for (int k = 0; k < n; ++k)
          dot += sign[static_cast<std::size_t>(i) * n + k] *
                 sign[static_cast<std::size_t>(j) * n + k];
        if (i == j) dot -= n;
        a[i * p + j] = dot;
        a[j * p + i] = dot;
      }

    trace_sum[0] += p;
    if (max_degree >= 1) {
      // trace B(1) = trace A = 0 by construction; still set up the ladder.
      for (int c = 0; c < cells; ++c) {
        prev[c] = 0;
        curr[c] = a[c];
      }
      for (int i = 0; i < p; ++i) prev[i * p + i] = 1;
    }
    for (int l = 2; l <= max_degree; ++l) {
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
          Int128 acc = 0;
          for (int k = 0; k < p; ++k)
            acc += static_cast<Int128>(a[i * p + k]) * curr[k * p + j];
          acc -= shift_coeff * curr[i * p + j];
          acc -= mix_coeff * prev[i * p + j];
          next[i * p + j] = acc;
        }
      Int128 tr = 0;
      for (int i = 0; i < p; ++i) tr += next[i * p + i];
      trace_sum[static_cast<std::size_t>(l)] += tr;
      prev.swap(curr);
      curr.swap(next);
    }
  }

  std::vector<BigRational> result;
  result.reserve(static_cast<std::size_t>(max_degree) + 1);
  BigInt denom_power = 1;
  const BigInt count = BigInt(1) << (p * n);
  for (int l = 0; l <= max_degree; ++l) {
    result.emplace_back(to_bigint(trace_sum[static_cast<std::size_t>(l)]),
                        denom_power * count);
    denom_power *= n;
  }
  return result;
}

BigRational exact_expected_trace(int p, int n, int degree) {
  return exact_expected_traces(p, n, degree).back();
}

ConfigCountResult compare_comb_identity(int p, int n, int degree) {
  ConfigCountResult result;
  result.p = p;
  result.n = n;
  result.degree = degree;
  result.config_count = count_configurations(p, n, degree);
  result.exact_mean_trace = exact_expected_trace(p, n, degree);
  BigInt denom = 1;
  for (int k = 0; k < degree; ++k) denom *= n;
  result.predicted_mean = BigRational(result.config_count, denom);
  result.discrepancy = result.exact_mean_trace - result.predicted_mean;
  return result;
}

std::vector<ConfigCountResult> compare_comb_identity_through(int p, int n,
                                                             int max_degree) {
  const std::vector<BigRational> exact = exact_expected_traces(p, n, max_degree);
  std::vector<ConfigCountResult> results;
  results.reserve(static_cast<std::size_t>(max_degree) + 1);
  BigInt denom = 1;
  for (int l = 0; l <= max_degree; ++l) {
    ConfigCountResult r;
    r.p = p;
    r.n = n;
    r.degree = l;
    r.config_count = count_configurations(p, n, l);
    r.exact_mean_trace = exact[static_cast<std::size_t>(l)];
    r.predicted_mean = BigRational(r.config_count, denom);
    r.discrepancy = r.exact_mean_trace - r.predicted_mean;
    results.push_back(std::move(r));
    denom *= n;
  }
  return results;
}

std::string rational_to_string(const BigRational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace signmat
