#include "hyperconn/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hyperconn/error.hpp"

namespace hyperconn {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step; split to avoid overflow.
    const std::uint64_t num = n - k + i;
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t r = result / g;
    const std::uint64_t q = num / (i / g);
    if (r != 0 && q > std::numeric_limits<std::uint64_t>::max() / r) {
      throw ContractViolation("binomial coefficient overflows 64 bits");
    }
    result = r * q;
  }
  return result;
}

std::uint64_t tuple_count(Index m, Index d) {
  if (m == 0) return d == 0 ? 1 : 0;
  return binomial(m + d - 1, d);
}

namespace {

// Non-decreasing tuples of `length` drawn from [low, m).
std::uint64_t tails(Index m, Index low, Index length) {
  if (length == 0) return 1;
  if (low >= m) return 0;
  return binomial(m - low + length - 1, length);
}

}  // namespace

std::uint64_t tuple_rank(std::span<const Index> tuple, Index m) {
  const Index d = tuple.size();
  std::uint64_t rank = 0;
  Index prev = 0;
  for (Index k = 0; k < d; ++k) {
    const Index v = tuple[k];
    if (v >= m) throw ContractViolation("tuple index out of range");
    if (v < prev) throw ContractViolation("tuple is not sorted non-decreasing");
    for (Index u = prev; u < v; ++u) rank += tails(m, u, d - k - 1);
    prev = v;
  }
  return rank;
}

std::vector<Index> tuple_unrank(std::uint64_t rank, Index m, Index d) {
  if (rank >= tuple_count(m, d)) throw ContractViolation("tuple rank out of range");
  std::vector<Index> tuple(d);
  Index low = 0;
  for (Index k = 0; k < d; ++k) {
    Index v = low;
    for (;; ++v) {
      const std::uint64_t block = tails(m, v, d - k - 1);
      if (rank < block) break;
      rank -= block;
    }
    tuple[k] = v;
    low = v;
  }
  return tuple;
}

bool next_tuple(std::span<Index> tuple, Index m) {
  const Index d = tuple.size();
  for (Index k = d; k-- > 0;) {
    if (tuple[k] + 1 < m) {
      const Index v = tuple[k] + 1;
      for (Index r = k; r < d; ++r) tuple[r] = v;
      return true;
    }
  }
  return false;
}

bool is_degenerate(std::span<const Index> sorted_tuple) {
  return std::adjacent_find(sorted_tuple.begin(), sorted_tuple.end()) != sorted_tuple.end();
}

std::vector<std::string> default_labels(Index m, Index first) {
  std::vector<std::string> labels;
  labels.reserve(m);
  for (Index i = 0; i < m; ++i) labels.push_back(std::to_string(first + i));
  return labels;
}

TimeSeriesMatrix::TimeSeriesMatrix(Index m, Index n, std::vector<double> values,
                                   std::vector<std::string> labels)
    : m_(m), n_(n), values_(std::move(values)), labels_(std::move(labels)) {
  if (m_ == 0 || n_ == 0) throw ContractViolation("time series needs m >= 1 and n >= 1");
  if (values_.size() != m_ * n_) throw ContractViolation("time series value count != m * n");
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw ContractViolation("time series contains non-finite values");
  }
  if (labels_.empty()) labels_ = default_labels(m_);
  if (labels_.size() != m_) throw ContractViolation("label count != variable count");
}

ConnectomeMatrix::ConnectomeMatrix(Index m, std::vector<double> entries,
                                   std::vector<std::string> labels)
    : m_(m), entries_(std::move(entries)), labels_(std::move(labels)) {
  if (entries_.size() != m_ * m_) throw ContractViolation("connectome entry count != m * m");
  for (Index i = 0; i < m_; ++i) {
    if (entries_[i * m_ + i] != 1.0) throw ContractViolation("connectome diagonal must be 1");
    for (Index j = 0; j < m_; ++j) {
      const double v = entries_[i * m_ + j];
      if (!(v >= -1.0 && v <= 1.0)) throw ContractViolation("connectome entry outside [-1, 1]");
      if (v != entries_[j * m_ + i]) throw ContractViolation("connectome is not symmetric");
    }
  }
  if (labels_.empty()) labels_ = default_labels(m_);
  if (labels_.size() != m_) throw ContractViolation("label count != variable count");
}

SymmetricTensor::SymmetricTensor(Index m, Index d)
    : SymmetricTensor(m, d, std::vector<double>(tuple_count(m, d), 0.0)) {}

SymmetricTensor::SymmetricTensor(Index m, Index d, std::vector<double> weights)
    : m_(m), d_(d), weights_(std::move(weights)) {
  if (weights_.size() != tuple_count(m_, d_)) {
    throw ContractViolation("tensor weight count != C(m + d - 1, d)");
  }
  if (!std::all_of(weights_.begin(), weights_.end(), [](double v) { return std::isfinite(v); })) {
    throw ContractViolation("tensor contains non-finite weights");
  }
}

double SymmetricTensor::at_rank(std::uint64_t rank) const {
  if (rank >= weights_.size()) throw ContractViolation("tensor rank out of range");
  return weights_[rank];
}

double SymmetricTensor::at(std::span<const Index> tuple) const {
  if (tuple.size() != d_) throw ContractViolation("tuple length != tensor order");
  std::vector<Index> sorted(tuple.begin(), tuple.end());
  std::sort(sorted.begin(), sorted.end());
  return weights_[tuple_rank(sorted, m_)];
}

}  // namespace hyperconn
