#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "hyperconn/core.hpp"

namespace hyperconn {

/// How the epsilon-ball sweep weights the sample tuples it visits.
///
/// PaperTupleSum sums p * log(p / prod p_k) over every one of the N^d sample
/// index tuples, so a value cell is weighted by its sample multiplicity.
/// DistinctCellPlugin visits each distinct epsilon-cell combination once.
/// AlignedResubstitution averages log(p / prod p_k) over aligned samples only.
enum class EstimatorVariant { PaperTupleSum, DistinctCellPlugin, AlignedResubstitution };

/// "paper", "plugin" or "aligned".
std::string_view to_string(EstimatorVariant variant);
EstimatorVariant parse_variant(std::string_view name);

/// Ball radius used by the localized sample-mean probability estimates.
class EpsilonThreshold {
 public:
  explicit EpsilonThreshold(double epsilon);
  double value() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

/// Sample Pearson correlation. Throws DegenerateVariance when either input is
/// constant. The result is clamped to [-1, 1].
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation between every pair of rows. Constant rows give 0
/// off-diagonal with a logged warning.
ConnectomeMatrix connectome(const TimeSeriesMatrix& ts);

// Plug-in estimators over exact value equality, natural log.
using SampleRows = std::vector<std::span<const double>>;

double entropy_exact(std::span<const double> x);
double joint_entropy_exact(const SampleRows& rows);
/// Sum of marginal entropies minus joint entropy.
double total_correlation_exact(const SampleRows& rows);
/// Same quantity evaluated as sum p log(p / prod p_i) over observed tuples.
double total_correlation_kl_exact(const SampleRows& rows);

/// Total correlation tensor over every non-decreasing d-tuple of variables.
///
/// Probabilities are epsilon-ball counts with strict inequality; terms whose
/// joint probability is zero contribute nothing. Each entry is accumulated
/// from exact integer histograms, so the result is independent of `workers`,
/// of row order (up to tuple relabeling), and of the order samples are
/// visited in.
SymmetricTensor alg1_total_correlation(const TimeSeriesMatrix& ts, Index d, EpsilonThreshold eps,
                                       EstimatorVariant variant, unsigned workers = 1);

/// Explicit finite joint distribution: value tuple -> probability.
using Pmf = std::map<std::vector<double>, double>;

/// Total correlation of an explicit joint pmf by full enumeration.
double enumerate_total_correlation(const Pmf& pmf);

/// -1/2 ln det R for a Gaussian with correlation matrix R (row-major k x k).
double gaussian_tc_closed_form(std::span<const double> correlation, Index k);

}  // namespace hyperconn
