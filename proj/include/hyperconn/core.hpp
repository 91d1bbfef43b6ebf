#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyperconn {

using Index = std::size_t;

/// Binomial coefficient C(n, k). Throws ContractViolation on 64-bit overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Number of non-decreasing d-tuples over [0, m), i.e. C(m + d - 1, d).
std::uint64_t tuple_count(Index m, Index d);

/// Lexicographic rank of a non-decreasing tuple over [0, m).
std::uint64_t tuple_rank(std::span<const Index> tuple, Index m);

std::vector<Index> tuple_unrank(std::uint64_t rank, Index m, Index d);

/// Advances `tuple` to its lexicographic successor among non-decreasing
/// tuples over [0, m). Returns false (leaving `tuple` unspecified) past the end.
bool next_tuple(std::span<Index> tuple, Index m);

/// True when some index occurs more than once in a sorted tuple.
bool is_degenerate(std::span<const Index> sorted_tuple);

/// M variables by N samples of one subject, stored row-major.
class TimeSeriesMatrix {
 public:
  TimeSeriesMatrix(Index m, Index n, std::vector<double> values,
                   std::vector<std::string> labels = {});

  Index rows() const noexcept { return m_; }
  Index cols() const noexcept { return n_; }
  double operator()(Index i, Index j) const noexcept { return values_[i * n_ + j]; }
  std::span<const double> row(Index i) const noexcept { return {values_.data() + i * n_, n_}; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  friend bool operator==(const TimeSeriesMatrix&, const TimeSeriesMatrix&) = default;

 private:
  Index m_;
  Index n_;
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

/// Default variable labels "1".."m" (1-based ROI numbering).
std::vector<std::string> default_labels(Index m, Index first = 1);

/// Symmetric M x M correlation matrix with unit diagonal.
class ConnectomeMatrix {
 public:
  ConnectomeMatrix(Index m, std::vector<double> entries, std::vector<std::string> labels = {});

  Index size() const noexcept { return m_; }
  double operator()(Index i, Index j) const noexcept { return entries_[i * m_ + j]; }
  std::span<const double> entries() const noexcept { return entries_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  Index m_;
  std::vector<double> entries_;
  std::vector<std::string> labels_;
};

/// Weights over non-decreasing d-tuples of [0, m), stored by tuple rank.
/// Lookup by any permutation of a tuple yields the same entry.
class SymmetricTensor {
 public:
  SymmetricTensor(Index m, Index d);
  SymmetricTensor(Index m, Index d, std::vector<double> weights);

  Index variables() const noexcept { return m_; }
  Index order() const noexcept { return d_; }
  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }

  double at_rank(std::uint64_t rank) const;
  /// Entry for `tuple` in any index order.
  double at(std::span<const Index> tuple) const;

  friend bool operator==(const SymmetricTensor&, const SymmetricTensor&) = default;

 private:
  Index m_;
  Index d_;
  std::vector<double> weights_;
};

struct Subject {
  std::string id;
  std::string label;
  TimeSeriesMatrix data;
  std::uint64_t stream_seed = 0;
};

/// Labeled collection of subjects. `positive_label` names the case class.
struct Dataset {
  std::vector<Subject> subjects;
  std::string positive_label;
  std::string negative_label;
  std::uint64_t seed = 0;
};

}  // namespace hyperconn
