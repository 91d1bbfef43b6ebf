#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hyperconn/core.hpp"
#include "hyperconn/estimators.hpp"
#include "hyperconn/hyperconnectome.hpp"
#include "hyperconn/random.hpp"

namespace hyperconn {

enum class FeatureKind { Graph, Hypergraph };

std::string_view to_string(FeatureKind kind);

struct FeatureSchema {
  FeatureKind kind = FeatureKind::Graph;
  Index m = 0;
  Index d = 2;
  bool degenerate_excluded = false;

  Index length() const;
  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

struct FeatureVector {
  std::vector<double> values;
  FeatureSchema schema;
};

/// Strict upper triangle, row-major: m(m-1)/2 values.
FeatureVector vectorize_graph(const ConnectomeMatrix& cm);

/// Tensor entries in tuple-rank order, optionally without repeated-index tuples.
FeatureVector vectorize_hypergraph(const HyperConnectome& hc, bool include_degenerate = true);

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Random partition of [0, count). Training gets ceil(fraction * count),
/// clamped so both sides are non-empty.
Split split(Index count, double fraction, RandomStream& stream);

struct SvmConfig {
  double lambda = 1e-4;
  Index epochs = 200;
  std::uint64_t seed = 0;
};

/// Standardized linear classifier. Labels are +1 / -1.
class LinearModel {
 public:
  LinearModel(FeatureSchema schema, std::vector<double> weights, double bias,
              std::vector<double> means, std::vector<double> scales);

  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& scales() const noexcept { return scales_; }

  std::vector<double> standardize(const FeatureVector& x) const;
  double decision(const FeatureVector& x) const;
  /// +1 when decision >= 0.
  int predict(const FeatureVector& x) const;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  FeatureSchema schema_;
  std::vector<double> weights_;
  double bias_;
  std::vector<double> means_;
  std::vector<double> scales_;
};

/// Objective trace recorded by svm_train: the value at the zero model, the
/// running iterate after each epoch, and the returned averaged model last.
struct TrainingTrace {
  std::vector<double> objective;
};

/// L2-regularized average hinge loss minimized by stochastic subgradient
/// steps of size 1 / (lambda t) with suffix iterate averaging.
/// Throws DegenerateLabels unless both classes are present.
LinearModel svm_train(std::span<const FeatureVector> features, std::span<const int> labels,
                      const SvmConfig& config, TrainingTrace* trace = nullptr);

std::vector<int> svm_predict(const LinearModel& model, std::span<const FeatureVector> features);

/// lambda/2 |(w, b)|^2 + mean hinge loss on standardized features.
double svm_objective(const LinearModel& model, std::span<const FeatureVector> features,
                     std::span<const int> labels, double lambda);

struct Metrics {
  double accuracy;
  double f1;
};

Metrics metrics(std::span<const int> predicted, std::span<const int> truth, int positive_class = 1);

struct TrialReport {
  double train_accuracy;
  double test_accuracy;
  double f1;
  std::uint64_t split_seed;
};

struct ExperimentConfig {
  Index trials = 10;
  double fraction = 0.5;
  std::uint64_t seed = 0;
  SvmConfig svm;
  double epsilon = 1e-5;
  Index d = 3;
  EstimatorVariant variant = EstimatorVariant::PaperTupleSum;
  bool include_degenerate = true;
  unsigned workers = 1;
};

/// Seed of the split stream for trial t; shared across feature kinds so
/// trials are paired.
std::uint64_t trial_split_seed(std::uint64_t seed, Index trial) noexcept;

/// Trials over precomputed features. Labels are +1 / -1.
std::vector<TrialReport> run_experiment(std::span<const FeatureVector> features,
                                        std::span<const int> labels, const ExperimentConfig& config);

/// +1 for the dataset's positive label, -1 otherwise.
std::vector<int> dataset_labels(const Dataset& dataset);

/// Per-subject features of one kind, computed on `config.workers` threads.
std::vector<FeatureVector> dataset_features(const Dataset& dataset, FeatureKind kind,
                                            const ExperimentConfig& config);

std::vector<TrialReport> run_experiment(const Dataset& dataset, FeatureKind kind,
                                        const ExperimentConfig& config);

enum class TTestKind { Pooled, Welch };

struct TTestResult {
  double t;
  double p;
  double df;
};

/// Two-sided two-sample t-test. Zero pooled variance gives (0, 1) for equal
/// means and (+-inf, 0) otherwise.
TTestResult two_sample_ttest(std::span<const double> a, std::span<const double> b,
                             TTestKind kind = TTestKind::Pooled);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student t CDF with `df` degrees of freedom.
double student_t_cdf(double t, double df);

}  // namespace hyperconn
