#include "hyperconn/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <spdlog/spdlog.h>

#include "hyperconn/error.hpp"

namespace hyperconn {

std::string_view to_string(EstimatorVariant variant) {
  switch (variant) {
    case EstimatorVariant::PaperTupleSum:
      return "paper";
    case EstimatorVariant::DistinctCellPlugin:
      return "plugin";
    case EstimatorVariant::AlignedResubstitution:
      return "aligned";
  }
  return "paper";
}

EstimatorVariant parse_variant(std::string_view name) {
  if (name == "paper") return EstimatorVariant::PaperTupleSum;
  if (name == "plugin") return EstimatorVariant::DistinctCellPlugin;
  if (name == "aligned") return EstimatorVariant::AlignedResubstitution;
  throw ContractViolation("unknown estimator variant '" + std::string(name) +
                          "' (expected paper, plugin or aligned)");
}

EpsilonThreshold::EpsilonThreshold(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ContractViolation("epsilon must be a positive finite number");
  }
}

// ---------------------------------------------------------------------------
// Pearson / connectome

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractViolation("pearson: vectors differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientSamples("pearson needs at least 2 samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateVariance("pearson: zero sample variance");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

ConnectomeMatrix connectome(const TimeSeriesMatrix& ts) {
  const Index m = ts.rows();
  if (ts.cols() < 2) throw InsufficientSamples("connectome needs at least 2 samples");
  std::vector<double> entries(m * m, 0.0);
  std::vector<bool> constant(m);
  for (Index i = 0; i < m; ++i) {
    const auto row = ts.row(i);
    constant[i] = std::all_of(row.begin(), row.end(), [&](double v) { return v == row[0]; });
    if (constant[i] && m > 1) spdlog::warn("constant series {}; its correlations are set to 0", ts.labels()[i]);
  }
  for (Index i = 0; i < m; ++i) {
    entries[i * m + i] = 1.0;
    for (Index j = i + 1; j < m; ++j) {
      const double r = constant[i] || constant[j] ? 0.0 : pearson(ts.row(i), ts.row(j));
      entries[i * m + j] = r;
      entries[j * m + i] = r;
    }
  }
  return ConnectomeMatrix(m, std::move(entries), ts.labels());
}

// ---------------------------------------------------------------------------
// Exact plug-in estimators

namespace {

void check_aligned(const SampleRows& rows) {
  if (rows.empty()) throw ContractViolation("need at least one row");
  const std::size_t n = rows.front().size();
  if (n == 0) throw ContractViolation("rows must be non-empty");
  for (const auto& r : rows) {
    if (r.size() != n) throw ContractViolation("rows differ in length");
  }
}

double entropy_of_counts(const auto& counts, double n) {
  double h = 0.0;
  for (const auto& [value, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  return h;
}

std::map<std::vector<double>, std::size_t> joint_counts(const SampleRows& rows) {
  std::map<std::vector<double>, std::size_t> counts;
  const std::size_t n = rows.front().size();
  std::vector<double> key(rows.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < rows.size(); ++k) key[k] = rows[k][j];
    ++counts[key];
  }
  return counts;
}

std::map<double, std::size_t> marginal_counts(std::span<const double> x) {
  std::map<double, std::size_t> counts;
  for (double v : x) ++counts[v];
  return counts;
}

}  // namespace

double entropy_exact(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("entropy needs at least one sample");
  return entropy_of_counts(marginal_counts(x), static_cast<double>(x.size()));
}

double joint_entropy_exact(const SampleRows& rows) {
  check_aligned(rows);
  return entropy_of_counts(joint_counts(rows), static_cast<double>(rows.front().size()));
}

double total_correlation_exact(const SampleRows& rows) {
  check_aligned(rows);
  double marginal_sum = 0.0;
  for (const auto& r : rows) marginal_sum += entropy_exact(r);
  return marginal_sum - joint_entropy_exact(rows);
}

double total_correlation_kl_exact(const SampleRows& rows) {
  check_aligned(rows);
  const double n = static_cast<double>(rows.front().size());
  std::vector<std::map<double, std::size_t>> marginals;
  marginals.reserve(rows.size());
  for (const auto& r : rows) marginals.push_back(marginal_counts(r));

  double c = 0.0;
  for (const auto& [key, count] : joint_counts(rows)) {
    const double p = static_cast<double>(count) / n;
    double log_product = 0.0;
    for (std::size_t k = 0; k < key.size(); ++k) {
      log_product += std::log(static_cast<double>(marginals[k].at(key[k])) / n);
    }
    c += p * (std::log(p) - log_product);
  }
  return c;
}

double enumerate_total_correlation(const Pmf& pmf) {
  if (pmf.empty()) throw ContractViolation("pmf is empty");
  const std::size_t k = pmf.begin()->first.size();
  if (k == 0) throw ContractViolation("pmf tuples must be non-empty");
  double total = 0.0;
  std::vector<std::map<double, double>> marginals(k);
  for (const auto& [tuple, p] : pmf) {
    if (tuple.size() != k) throw ContractViolation("pmf tuples differ in length");
    if (!(p >= 0.0) || !std::isfinite(p)) throw ContractViolation("pmf has a negative probability");
    total += p;
    for (std::size_t i = 0; i < k; ++i) marginals[i][tuple[i]] += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ContractViolation("pmf does not sum to 1");

  double c = 0.0;
  for (const auto& [tuple, p] : pmf) {
    if (p == 0.0) continue;
    double product = 1.0;
    for (std::size_t i = 0; i < k; ++i) product *= marginals[i].at(tuple[i]);
    c += p * std::log(p / product);
  }
  return c;
}

double gaussian_tc_closed_form(std::span<const double> correlation, Index k) {
  if (k == 0 || correlation.size() != k * k) {
    throw ContractViolation("correlation matrix must be k x k with k >= 1");
  }
  Eigen::MatrixXd r(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      const double v = correlation[i * k + j];
      if (v != correlation[j * k + i]) throw ContractViolation("correlation matrix not symmetric");
      if (i == j && v != 1.0) throw ContractViolation("correlation matrix needs unit diagonal");
      if (i != j && !(std::abs(v) < 1.0 - 1e-9)) {
        throw ContractViolation("correlation too close to +-1");
      }
      r(i, j) = v;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) throw ContractViolation("correlation matrix not positive definite");
  double half_log_det = 0.0;
  const Eigen::MatrixXd l = llt.matrixL();
  for (Index i = 0; i < k; ++i) {
    const double diag = l(i, i);
    if (!(diag > 0.0)) throw ContractViolation("correlation matrix not positive definite");
    half_log_det += std::log(diag);
  }
  return std::max(0.0, -half_log_det);
}

// ---------------------------------------------------------------------------
// Epsilon-ball sweep

namespace {

using Word = std::uint64_t;

// Bitset per (variable, sample) of the samples inside its epsilon ball.
class BallMasks {
 public:
  BallMasks(const TimeSeriesMatrix& ts, double eps)
      : n_(ts.cols()), words_((n_ + 63) / 64), bits_(ts.rows() * n_ * words_, 0),
        counts_(ts.rows() * n_, 0) {
    for (Index i = 0; i < ts.rows(); ++i) {
      const auto row = ts.row(i);
      for (Index s = 0; s < n_; ++s) {
        Word* mask = bits_.data() + (i * n_ + s) * words_;
        std::uint32_t count = 0;
        for (Index j = 0; j < n_; ++j) {
          if (std::abs(row[j] - row[s]) < eps) {
            mask[j / 64] |= Word{1} << (j % 64);
            ++count;
          }
        }
        counts_[i * n_ + s] = count;
      }
    }
  }

  Index words() const noexcept { return words_; }
  const Word* mask(Index var, Index sample) const noexcept {
    return bits_.data() + (var * n_ + sample) * words_;
  }
  std::uint32_t count(Index var, Index sample) const noexcept { return counts_[var * n_ + sample]; }

 private:
  Index n_;
  Index words_;
  std::vector<Word> bits_;
  std::vector<std::uint32_t> counts_;
};

struct Cell {
  Index sample;  // representative sample
  std::uint64_t multiplicity;
};

// Distinct ball masks of one variable, in order of first occurrence.
std::vector<Cell> distinct_cells(const BallMasks& masks, Index var, Index n, bool with_multiplicity) {
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  const Index w = masks.words();
  auto less = [&](Index a, Index b) {
    const Word* ma = masks.mask(var, a);
    const Word* mb = masks.mask(var, b);
    for (Index k = 0; k < w; ++k) {
      if (ma[k] != mb[k]) return ma[k] < mb[k];
    }
    return a < b;
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<Cell> cells;
  for (Index pos = 0; pos < n;) {
    Index end = pos + 1;
    while (end < n && std::equal(masks.mask(var, order[pos]), masks.mask(var, order[pos]) + w,
                                 masks.mask(var, order[end]))) {
      ++end;
    }
    // Sorted by (mask, sample), so order[pos] is the first occurrence.
    cells.push_back({order[pos], with_multiplicity ? end - pos : 1});
    pos = end;
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.sample < b.sample; });
  return cells;
}

// Coefficients of log c, log m and log N whose combination gives one entry.
struct LogHistogram {
  explicit LogHistogram(Index n) : joint(n + 1, 0), marginal(n + 1, 0) {}
  void clear() {
    std::fill(joint.begin(), joint.end(), 0);
    std::fill(marginal.begin(), marginal.end(), 0);
    total = 0;
  }
  std::vector<std::uint64_t> joint;
  std::vector<std::uint64_t> marginal;
  std::uint64_t total = 0;
};

class Sweep {
 public:
  Sweep(const TimeSeriesMatrix& ts, Index d, double eps, EstimatorVariant variant)
      : n_(ts.cols()), d_(d), variant_(variant), masks_(ts, eps), log_(n_ + 1, 0.0) {
    for (Index c = 1; c <= n_; ++c) log_[c] = std::log(static_cast<double>(c));
    if (variant_ != EstimatorVariant::AlignedResubstitution) {
      const bool weighted = variant_ == EstimatorVariant::PaperTupleSum;
      cells_.reserve(ts.rows());
      for (Index i = 0; i < ts.rows(); ++i) cells_.push_back(distinct_cells(masks_, i, n_, weighted));
    }
  }

  void run(std::span<double> out, std::uint64_t begin, std::uint64_t end, Index m) const {
    if (begin >= end) return;
    std::vector<Index> tuple = tuple_unrank(begin, m, d_);
    LogHistogram hist(n_);
    std::vector<Word> scratch(d_ * masks_.words());
    for (std::uint64_t rank = begin; rank < end; ++rank) {
      hist.clear();
      if (variant_ == EstimatorVariant::AlignedResubstitution) {
        aligned(tuple, hist, scratch);
      } else {
        descend(tuple, 0, 1, nullptr, hist, scratch);
      }
      out[rank] = combine(hist);
      if (rank + 1 < end) next_tuple(tuple, m);
    }
  }

 private:
  // Returns the sum of c * multiplicity over the leaves below `level`.
  std::uint64_t descend(const std::vector<Index>& tuple, Index level, std::uint64_t prefix,
                        const Word* partial, LogHistogram& hist, std::vector<Word>& scratch) const {
    const Index w = masks_.words();
    const Index var = tuple[level];
    Word* joined = scratch.data() + level * w;
    std::uint64_t subtotal = 0;
    for (const Cell& cell : cells_[var]) {
      const Word* mask = masks_.mask(var, cell.sample);
      bool any = false;
      if (partial == nullptr) {
        std::copy(mask, mask + w, joined);
        any = true;
      } else {
        for (Index k = 0; k < w; ++k) {
          joined[k] = partial[k] & mask[k];
          any |= joined[k] != 0;
        }
      }
      if (!any) continue;
      const std::uint64_t mult = prefix * cell.multiplicity;
      const std::uint32_t marginal = masks_.count(var, cell.sample);
      std::uint64_t contribution = 0;
      if (level + 1 == d_) {
        std::uint32_t c = 0;
        for (Index k = 0; k < w; ++k) c += static_cast<std::uint32_t>(std::popcount(joined[k]));
        contribution = mult * c;
        hist.joint[c] += contribution;
      } else {
        contribution = descend(tuple, level + 1, mult, joined, hist, scratch);
      }
      hist.marginal[marginal] += contribution;
      subtotal += contribution;
    }
    if (level == 0) hist.total = subtotal;
    return subtotal;
  }

  void aligned(const std::vector<Index>& tuple, LogHistogram& hist, std::vector<Word>& scratch) const {
    const Index w = masks_.words();
    Word* joined = scratch.data();
    for (Index j = 0; j < n_; ++j) {
      const Word* first = masks_.mask(tuple[0], j);
      std::copy(first, first + w, joined);
      hist.marginal[masks_.count(tuple[0], j)] += 1;
      for (Index k = 1; k < d_; ++k) {
        const Word* mask = masks_.mask(tuple[k], j);
        for (Index q = 0; q < w; ++q) joined[q] &= mask[q];
        hist.marginal[masks_.count(tuple[k], j)] += 1;
      }
      std::uint32_t c = 0;
      for (Index q = 0; q < w; ++q) c += static_cast<std::uint32_t>(std::popcount(joined[q]));
      // Sample j is in every one of its own balls, so c >= 1.
      hist.joint[c] += 1;
    }
    hist.total = n_;
  }

  // (1/N) [sum A_c log c - sum B_m log m + (d - 1) S log N]
  double combine(const LogHistogram& hist) const {
    long double acc = 0.0L;
    for (Index c = 1; c <= n_; ++c) {
      if (hist.joint[c] != 0) acc += static_cast<long double>(hist.joint[c]) * log_[c];
    }
    for (Index c = 1; c <= n_; ++c) {
      if (hist.marginal[c] != 0) acc -= static_cast<long double>(hist.marginal[c]) * log_[c];
    }
    acc += static_cast<long double>(d_ - 1) * static_cast<long double>(hist.total) * log_[n_];
    return static_cast<double>(acc / static_cast<long double>(n_));
  }

  Index n_;
  Index d_;
  EstimatorVariant variant_;
  BallMasks masks_;
  std::vector<double> log_;
  std::vector<std::vector<Cell>> cells_;
};

void check_tuple_sum_range(Index n, Index d) {
  // Histogram entries are bounded by N^(d + 1).
  std::uint64_t bound = 1;
  for (Index k = 0; k <= d; ++k) {
    if (bound > (std::numeric_limits<std::uint64_t>::max() >> 1) / n) {
      throw ContractViolation("sample count too large for tuple-sum accumulation at this order");
    }
    bound *= n;
  }
}

}  // namespace

SymmetricTensor alg1_total_correlation(const TimeSeriesMatrix& ts, Index d, EpsilonThreshold eps,
                                       EstimatorVariant variant, unsigned workers) {
  if (d < 2) throw ContractViolation("hyperedge order d must be >= 2");
  if (ts.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw ContractViolation("too many samples");
  }
  if (variant != EstimatorVariant::AlignedResubstitution) check_tuple_sum_range(ts.cols(), d);

  const Index m = ts.rows();
  const std::uint64_t total = tuple_count(m, d);
  std::vector<double> weights(total, 0.0);
  const Sweep sweep(ts, d, eps.value(), variant);

  const std::uint64_t threads = std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(total, 1));
  if (threads == 1) {
    sweep.run(weights, 0, total, m);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (total + threads - 1) / threads;
    for (std::uint64_t t = 0; t < threads; ++t) {
      const std::uint64_t begin = std::min(total, t * chunk);
      const std::uint64_t end = std::min(total, begin + chunk);
      pool.emplace_back([&sweep, &weights, begin, end, m] { sweep.run(weights, begin, end, m); });
    }
  }
  return SymmetricTensor(m, d, std::move(weights));
}

}  // namespace hyperconn
