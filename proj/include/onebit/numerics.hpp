#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace onebit {

using cplx = std::complex<double>;

// Dense complex matrix, column-major so that a column-stacked vec() is the
// raw storage itself.
class ComplexMatrix {
public:
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_{rows}, cols_{cols} {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    }
    data_.assign(rows * cols, cplx{0.0, 0.0});
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  // Row-wise literal, handy in tests: from_rows({{1, 2}, {3, 4}}).
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    ComplexMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw std::invalid_argument("ComplexMatrix: ragged rows");
      std::size_t j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[j * rows_ + i];
  }

  std::span<cplx> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const cplx> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  bool same_shape(const ComplexMatrix& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

namespace detail {

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

inline ComplexMatrix hermitian(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(j, i) = std::conj(m(i, j));
  return out;
}

inline ComplexMatrix transpose(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(j, i) = m(i, j);
  return out;
}

inline ComplexMatrix conjugate(const ComplexMatrix& m) {
  ComplexMatrix out = m;
  for (auto& v : out.data()) v = std::conj(v);
  return out;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + ")");
  }
  ComplexMatrix out(a.rows(), b.cols());
  // j-p-i order walks both a and out down contiguous columns.
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto oc = out.col(j);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const cplx bpj = b(p, j);
      const auto ac = a.col(p);
      for (std::size_t i = 0; i < a.rows(); ++i) oc[i] += ac[i] * bpj;
    }
  }
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  return matmul(a, b);
}

inline ComplexMatrix operator*(cplx s, ComplexMatrix m) {
  for (auto& v : m.data()) v *= s;
  return m;
}

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
  detail::require_same_shape(a, b, "operator+");
  auto bd = b.data();
  auto ad = a.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] += bd[i];
  return a;
}

inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
  detail::require_same_shape(a, b, "operator-");
  auto bd = b.data();
  auto ad = a.data();
  for (std::size_t i = 0; i < ad.size(); ++i) ad[i] -= bd[i];
  return a;
}

inline double frobenius_norm_sq(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& v : m.data()) s += std::norm(v);
  return s;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

// x^H y over two equally long columns.
inline cplx inner(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw std::invalid_argument("inner: length mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

inline constexpr double kAsinClipTolerance = 1e-9;

// Applies asin to the real and imaginary parts of every entry separately.
// Parts that overshoot [-1, 1] by at most kAsinClipTolerance are clipped;
// anything larger means the caller built an invalid correlation matrix.
inline ComplexMatrix elementwise_asin_clipped(const ComplexMatrix& m) {
  auto clip = [](double v) {
    if (std::abs(v) > 1.0 + kAsinClipTolerance || std::isnan(v)) {
      throw std::domain_error("elementwise_asin_clipped: correlation part " + std::to_string(v) +
                              " outside [-1, 1]");
    }
    return std::clamp(v, -1.0, 1.0);
  };
  ComplexMatrix out = m;
  for (auto& v : out.data()) v = {std::asin(clip(v.real())), std::asin(clip(v.imag()))};
  return out;
}

// Neumaier-compensated running sum; order-dependent only through the order
// values are added, which callers keep fixed.
class CompensatedSum {
public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double std_error = 0.0;  // stddev / sqrt(n)
  std::size_t count = 0;
};

inline SampleStats sample_stats(std::span<const double> xs) {
  SampleStats st;
  st.count = xs.size();
  if (xs.empty()) return st;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  st.mean = s.value() / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    CompensatedSum ss;
    for (double x : xs) ss.add((x - st.mean) * (x - st.mean));
    st.stddev = std::sqrt(ss.value() / static_cast<double>(xs.size() - 1));
    st.std_error = st.stddev / std::sqrt(static_cast<double>(xs.size()));
  }
  return st;
}

// A reproducible random substream identified by (master_seed, stream_index).
// Owned by one unit of work at a time; never shared across threads.
class RandomStream {
public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : master_seed_{master_seed}, stream_index_{stream_index} {
    const std::uint64_t a = detail::splitmix64(master_seed);
    const std::uint64_t b = detail::splitmix64(stream_index ^ 0x5bd1e9955bd1e995ULL);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  double standard_normal() { return normal_(engine_); }
  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Packs (experiment, cell, trial) into one substream index. Injective for
// experiment < 2^8, cell < 2^24, trial < 2^32.
inline std::uint64_t stream_index_for(std::uint64_t experiment, std::uint64_t cell,
                                      std::uint64_t trial) {
  if (experiment >= (1ULL << 8) || cell >= (1ULL << 24) || trial >= (1ULL << 32)) {
    throw std::out_of_range("stream_index_for: component out of range");
  }
  return (experiment << 56) | (cell << 32) | trial;
}

// Substream factory for one Monte Carlo cell: trial t always maps to the
// same RandomStream no matter which thread runs it.
struct TrialStreams {
  std::uint64_t master_seed = 1;
  std::uint64_t experiment = 0;
  std::uint64_t cell = 0;

  RandomStream for_trial(std::uint64_t trial) const {
    return RandomStream(master_seed, stream_index_for(experiment, cell, trial));
  }
};

// Each entry is CN(0, variance): real and imaginary parts carry variance/2.
inline ComplexMatrix sample_circular_gaussian(RandomStream& stream, std::size_t rows,
                                              std::size_t cols, double variance) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("sample_circular_gaussian: variance must be positive");
  }
  ComplexMatrix out(rows, cols);
  const double sigma = std::sqrt(variance / 2.0);
  for (auto& v : out.data()) {
    const double re = stream.standard_normal();
    const double im = stream.standard_normal();
    v = {sigma * re, sigma * im};
  }
  return out;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace onebit
