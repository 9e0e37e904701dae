#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace signmat {

/// A p x n matrix with entries in {-1, +1}.
///
/// Generated entries come from a single xoshiro256** stream seeded with
/// `seed`: entry (i, j) is bit ((i*n + j) mod 64) of stream word
/// floor((i*n + j) / 64), with a set bit mapping to +1. The layout is part
/// of the reproducibility contract.
struct SignMatrix {
  int rows = 0;  // p
  int cols = 0;  // n
  std::uint64_t seed = 0;  // meaningful only for generated matrices
  std::vector<std::int8_t> entries;  // row-major, values in {-1, +1}

  std::int8_t operator()(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * cols + j];
  }
};

SignMatrix gen_sign_matrix(int p, int n, std::uint64_t seed);

/// Wraps explicit entries (tests, enumeration oracles). Validates that every
/// entry is -1 or +1; `seed` is recorded verbatim.
SignMatrix sign_matrix_from_entries(int p, int n,
                                    std::vector<std::int8_t> entries,
                                    std::uint64_t seed = 0);

/// Dense symmetric matrix. Mutation goes through set(), which writes both
/// (i, j) and (j, i), so symmetry is exact by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim)
      : dim_(dim),
        entries_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim),
                 0.0) {}

  int dim() const { return dim_; }
  double operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * dim_ + j];
  }
  void set(int i, int j, double value) {
    entries_[static_cast<std::size_t>(i) * dim_ + j] = value;
    entries_[static_cast<std::size_t>(j) * dim_ + i] = value;
  }
  const std::vector<double>& data() const { return entries_; }
  std::vector<double>& data() { return entries_; }

  double trace() const;
  double frobenius_norm() const;

  /// Seed of the SignMatrix this matrix was derived from, when known.
  /// Surfaces in numeric-failure diagnostics.
  std::optional<std::uint64_t> origin_seed;

 private:
  int dim_ = 0;
  std::vector<double> entries_;
};

/// S = n^{-1} X X^T. Products of +-1 entries are accumulated exactly (every
/// partial sum is an integer below 2^53) and divided by n once, so the
/// diagonal is exactly 1 and trace(S) = p exactly.
SymMatrix covariance(const SignMatrix& x);

/// T = S - I; the diagonal is exactly zero.
SymMatrix t_matrix(const SignMatrix& x);

/// Binary dump: magic "SGNM", one version byte, then p, n, seed as
/// little-endian 64-bit words, then row-major entries as signed bytes.
void save_sign_matrix(const SignMatrix& x, std::ostream& out);
SignMatrix load_sign_matrix(std::istream& in);
void save_sign_matrix(const SignMatrix& x, const std::string& path);
SignMatrix load_sign_matrix(const std::string& path);

}  // namespace signmat
