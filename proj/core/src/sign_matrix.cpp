#include "signmat/sign_matrix.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "signmat/rng.hpp"

namespace signmat {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'N', 'M'};
constexpr std::uint8_t kFormatVersion = 1;

void write_u64_le(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i]))
         << (8 * i);
  return v;
}

}  // namespace

SignMatrix gen_sign_matrix(int p, int n, std::uint64_t seed) {
  if (p < 1 || n < 1)
    throw std::invalid_argument("gen_sign_matrix: dimensions must be >= 1");
  SignMatrix x;
  x.rows = p;
  x.cols = n;
  x.seed = seed;
  const std::size_t total = static_cast<std::size_t>(p) * n;
  x.entries.resize(total);
  Xoshiro256ss rng(seed);
  std::uint64_t word = 0;
  for (std::size_t k = 0; k < total; ++k) {
    const unsigned bit = static_cast<unsigned>(k % 64);
    if (bit == 0) word = rng.next();
    x.entries[k] = ((word >> bit) & 1u) ? std::int8_t{1} : std::int8_t{-1};
  }
  return x;
}

SignMatrix sign_matrix_from_entries(int p, int n,
                                    std::vector<std::int8_t> entries,
                                    std::uint64_t seed) {
  if (p < 1 || n < 1)
    throw std::invalid_argument(
        "sign_matrix_from_entries: dimensions must be >= 1");
  if (entries.size() != static_cast<std::size_t>(p) * n)
    throw std::invalid_argument(
        "sign_matrix_from_entries: entry count does not match p*n");
  for (const std::int8_t e : entries)
    if (e != 1 && e != -1)
      throw std::invalid_argument(
          "sign_matrix_from_entries: entries must be -1 or +1");
  SignMatrix x;
  x.rows = p;
  x.cols = n;
  x.seed = seed;
  x.entries = std::move(entries);
  return x;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const double v : entries_) s += v * v;
  return std::sqrt(s);
}

SymMatrix covariance(const SignMatrix& x) {
  const int p = x.rows;
  const int n = x.cols;
  // Row-products of +-1 entries summed in double stay exact integers as long
  // as n < 2^53; blocked syrk keeps the working set small at large n.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  constexpr int kBlock = 512;
  Eigen::MatrixXd block(p, kBlock);
  for (int j0 = 0; j0 < n; j0 += kBlock) {
    const int w = std::min(kBlock, n - j0);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < w; ++j)
        block(i, j) = static_cast<double>(x(i, j0 + j));
    gram.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(w));
  }
  SymMatrix s(p);
  s.origin_seed = x.seed;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j) s.set(i, j, gram(i, j) / n);
  return s;
}

SymMatrix t_matrix(const SignMatrix& x) {
  SymMatrix t = covariance(x);
  for (int i = 0; i < t.dim(); ++i) t.set(i, i, t(i, i) - 1.0);
  return t;
}

void save_sign_matrix(const SignMatrix& x, std::ostream& out) {
  out.write(kMagic, 4);
  out.put(static_cast<char>(kFormatVersion));
  write_u64_le(out, static_cast<std::uint64_t>(x.rows));
  write_u64_le(out, static_cast<std::uint64_t>(x.cols));
  write_u64_le(out, x.seed);
  out.write(reinterpret_cast<const char*>(x.entries.data()),
            static_cast<std::streamsize>(x.entries.size()));
  if (!out) throw std::runtime_error("save_sign_matrix: write failed");
}

SignMatrix load_sign_matrix(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("load_sign_matrix: bad magic");
  const int version = in.get();
  if (version != kFormatVersion)
    throw std::runtime_error("load_sign_matrix: unsupported format version " +
                             std::to_string(version));
  const std::uint64_t p = read_u64_le(in);
  const std::uint64_t n = read_u64_le(in);
  const std::uint64_t seed = read_u64_le(in);
  if (!in || p < 1 || n < 1 || p > (1u << 30) || n > (1u << 30))
    throw std::runtime_error("load_sign_matrix: bad header dimensions");
  std::vector<std::int8_t> entries(static_cast<std::size_t>(p * n));
  in.read(reinterpret_cast<char*>(entries.data()),
          static_cast<std::streamsize>(entries.size()));
  if (!in) throw std::runtime_error("load_sign_matrix: truncated entries");
  return sign_matrix_from_entries(static_cast<int>(p), static_cast<int>(n),
                                  std::move(entries), seed);
}

void save_sign_matrix(const SignMatrix& x, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_sign_matrix: cannot open " + path);
  save_sign_matrix(x, out);
}

SignMatrix load_sign_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_sign_matrix: cannot open " + path);
  return load_sign_matrix(in);
}

}  // namespace signmat
