#include "hyperconn/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <exception>
#include <optional>
#include <thread>

#include "hyperconn/error.hpp"

namespace hyperconn {

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::Graph ? "graph" : "hypergraph";
}

Index FeatureSchema::length() const {
  if (kind == FeatureKind::Graph) return m * (m - (m > 0 ? 1 : 0)) / 2;
  if (!degenerate_excluded) return tuple_count(m, d);
  return m >= d ? binomial(m, d) : 0;
}

FeatureVector vectorize_graph(const ConnectomeMatrix& cm) {
  const Index m = cm.size();
  FeatureVector fv{{}, {FeatureKind::Graph, m, 2, true}};
  fv.values.reserve(m * (m - 1) / 2);
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) fv.values.push_back(cm(i, j));
  }
  return fv;
}

FeatureVector vectorize_hypergraph(const HyperConnectome& hc, bool include_degenerate) {
  FeatureVector fv{{}, {FeatureKind::Hypergraph, hc.variables(), hc.order(), !include_degenerate}};
  const auto weights = hc.tensor.weights();
  if (include_degenerate) {
    fv.values.assign(weights.begin(), weights.end());
    return fv;
  }
  fv.values.reserve(fv.schema.length());
  std::vector<Index> tuple(hc.order(), 0);
  for (std::uint64_t rank = 0; rank < weights.size(); ++rank, next_tuple(tuple, hc.variables())) {
    if (!is_degenerate(tuple)) fv.values.push_back(weights[rank]);
  }
  return fv;
}

Split split(Index count, double fraction, RandomStream& stream) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ContractViolation("split fraction must be in (0, 1)");
  if (count < 2) throw ContractViolation("need at least 2 items to split");
  auto n_train = static_cast<Index>(std::ceil(fraction * static_cast<double>(count)));
  n_train = std::clamp<Index>(n_train, 1, count - 1);
  std::vector<Index> order(count);
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), stream.engine());
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

// ---------------------------------------------------------------------------
// Linear model

LinearModel::LinearModel(FeatureSchema schema, std::vector<double> weights, double bias,
                         std::vector<double> means, std::vector<double> scales)
    : schema_(schema), weights_(std::move(weights)), bias_(bias), means_(std::move(means)),
      scales_(std::move(scales)) {
  const Index len = weights_.size();
  if (means_.size() != len || scales_.size() != len) {
    throw ContractViolation("model weights, means and scales differ in length");
  }
  if (std::any_of(scales_.begin(), scales_.end(), [](double s) { return !(s > 0.0); })) {
    throw ContractViolation("model scales must be positive");
  }
}

std::vector<double> LinearModel::standardize(const FeatureVector& x) const {
  if (x.schema != schema_ || x.values.size() != weights_.size()) {
    throw ContractViolation("feature schema does not match model");
  }
  std::vector<double> z(x.values.size());
  for (Index k = 0; k < z.size(); ++k) z[k] = (x.values[k] - means_[k]) / scales_[k];
  return z;
}

double LinearModel::decision(const FeatureVector& x) const {
  const auto z = standardize(x);
  return std::inner_product(z.begin(), z.end(), weights_.begin(), 0.0) + bias_;
}

int LinearModel::predict(const FeatureVector& x) const { return decision(x) >= 0.0 ? 1 : -1; }

namespace {

void check_training_set(std::span<const FeatureVector> features, std::span<const int> labels) {
  if (features.size() != labels.size()) throw ContractViolation("features and labels differ in count");
  if (features.empty()) throw DegenerateLabels("empty training set");
  const auto& schema = features.front().schema;
  for (const auto& f : features) {
    if (f.schema != schema || f.values.size() != features.front().values.size()) {
      throw ContractViolation("inconsistent feature schemas");
    }
    if (!std::all_of(f.values.begin(), f.values.end(), [](double v) { return std::isfinite(v); })) {
      throw ContractViolation("non-finite feature value");
    }
  }
  bool pos = false;
  bool neg = false;
  for (int y : labels) {
    if (y == 1) {
      pos = true;
    } else if (y == -1) {
      neg = true;
    } else {
      throw ContractViolation("labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw DegenerateLabels("training set needs both classes");
}

double hinge_objective(const std::vector<double>& z, Index n, Index dim, std::span<const int> labels,
                       const std::vector<double>& w, double b, double lambda) {
  double loss = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double* row = z.data() + i * dim;
    const double score = std::inner_product(row, row + dim, w.begin(), 0.0) + b;
    loss += std::max(0.0, 1.0 - labels[i] * score);
  }
  const double norm2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0) + b * b;
  return 0.5 * lambda * norm2 + loss / static_cast<double>(n);
}

}  // namespace

LinearModel svm_train(std::span<const FeatureVector> features, std::span<const int> labels,
                      const SvmConfig& config, TrainingTrace* trace) {
  check_training_set(features, labels);
  if (!(config.lambda > 0.0)) throw ContractViolation("lambda must be positive");
  if (config.epochs == 0) throw ContractViolation("epochs must be positive");

  const Index n = features.size();
  const Index dim = features.front().values.size();
  const FeatureSchema schema = features.front().schema;

  std::vector<double> means(dim, 0.0);
  std::vector<double> scales(dim, 1.0);
  std::vector<bool> constant(dim, false);
  for (Index k = 0; k < dim; ++k) {
    double mean = 0.0;
    for (Index i = 0; i < n; ++i) mean += features[i].values[k];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double dv = features[i].values[k] - mean;
      var += dv * dv;
    }
    var /= static_cast<double>(n);
    means[k] = mean;
    if (var > 0.0) {
      scales[k] = std::sqrt(var);
    } else {
      constant[k] = true;
    }
  }

  std::vector<double> z(n * dim);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < dim; ++k) {
      z[i * dim + k] = constant[k] ? 0.0 : (features[i].values[k] - means[k]) / scales[k];
    }
  }

  const double lambda = config.lambda;
  const double radius2 = 1.0 / lambda;
  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  std::vector<double> avg(dim, 0.0);
  double avg_b = 0.0;
  const std::uint64_t total_steps = static_cast<std::uint64_t>(config.epochs) * n;
  const std::uint64_t average_from = total_steps / 2;
  std::uint64_t averaged = 0;

  if (trace != nullptr) {
    trace->objective.clear();
    trace->objective.push_back(hinge_objective(z, n, dim, labels, w, b, lambda));
  }

  RandomStream order_stream(config.seed);
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::uint64_t t = 0;
  for (Index epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_stream.engine());
    for (Index i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double* row = z.data() + i * dim;
      const double y = labels[i];
      const double margin = y * (std::inner_product(row, row + dim, w.begin(), 0.0) + b);
      const double shrink = 1.0 - 1.0 / static_cast<double>(t);
      double norm2 = 0.0;
      if (margin < 1.0) {
        const double step = eta * y;
        for (Index k = 0; k < dim; ++k) {
          w[k] = shrink * w[k] + step * row[k];
          norm2 += w[k] * w[k];
        }
        b = shrink * b + step;
      } else {
        for (Index k = 0; k < dim; ++k) {
          w[k] *= shrink;
          norm2 += w[k] * w[k];
        }
        b *= shrink;
      }
      norm2 += b * b;
      if (norm2 > radius2) {
        const double s = std::sqrt(radius2 / norm2);
        for (double& v : w) v *= s;
        b *= s;
      }
      if (t > average_from) {
        ++averaged;
        const double a = 1.0 / static_cast<double>(averaged);
        for (Index k = 0; k < dim; ++k) avg[k] += a * (w[k] - avg[k]);
        avg_b += a * (b - avg_b);
      }
    }
    if (trace != nullptr) trace->objective.push_back(hinge_objective(z, n, dim, labels, w, b, lambda));
  }

  for (Index k = 0; k < dim; ++k) {
    if (constant[k]) avg[k] = 0.0;
  }
  if (trace != nullptr) trace->objective.push_back(hinge_objective(z, n, dim, labels, avg, avg_b, lambda));
  return LinearModel(schema, std::move(avg), avg_b, std::move(means), std::move(scales));
}

std::vector<int> svm_predict(const LinearModel& model, std::span<const FeatureVector> features) {
  std::vector<int> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(model.predict(f));
  return out;
}

double svm_objective(const LinearModel& model, std::span<const FeatureVector> features,
                     std::span<const int> labels, double lambda) {
  if (features.size() != labels.size() || features.empty()) {
    throw ContractViolation("features and labels must be non-empty and equal in count");
  }
  double loss = 0.0;
  for (Index i = 0; i < features.size(); ++i) {
    loss += std::max(0.0, 1.0 - labels[i] * model.decision(features[i]));
  }
  const auto& w = model.weights();
  const double norm2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0) + model.bias() * model.bias();
  return 0.5 * lambda * norm2 + loss / static_cast<double>(features.size());
}

Metrics metrics(std::span<const int> predicted, std::span<const int> truth, int positive_class) {
  if (predicted.size() != truth.size() || predicted.empty()) {
    throw ContractViolation("metrics needs equal, non-zero lengths");
  }
  std::size_t correct = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pred_pos = predicted[i] == positive_class;
    const bool true_pos = truth[i] == positive_class;
    if (predicted[i] == truth[i]) ++correct;
    if (pred_pos && true_pos) ++tp;
    if (pred_pos && !true_pos) ++fp;
    if (!pred_pos && true_pos) ++fn;
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return {accuracy, f1};
}

// ---------------------------------------------------------------------------
// Experiments

std::uint64_t trial_split_seed(std::uint64_t seed, Index trial) noexcept {
  return derive_seed(mix64(seed ^ 0x5eed5011755ULL), trial);
}

namespace {

template <class Fn>
void parallel_for(Index count, unsigned workers, Fn&& fn) {
  const Index threads = std::clamp<Index>(workers, 1, std::max<Index>(count, 1));
  if (threads == 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (Index t = 0; t < threads; ++t) {
    pool.emplace_back([&fn, t, threads, count] {
      for (Index i = t; i < count; i += threads) fn(i);
    });
  }
}

TrialReport run_trial(std::span<const FeatureVector> features, std::span<const int> labels,
                      const ExperimentConfig& config, Index trial) {
  const std::uint64_t seed = trial_split_seed(config.seed, trial);
  RandomStream stream(seed);
  const Split s = split(features.size(), config.fraction, stream);

  auto gather = [&](const std::vector<Index>& idx) {
    std::vector<FeatureVector> f;
    std::vector<int> y;
    f.reserve(idx.size());
    for (Index i : idx) {
      f.push_back(features[i]);
      y.push_back(labels[i]);
    }
    return std::pair{std::move(f), std::move(y)};
  };
  const auto [train_x, train_y] = gather(s.train);
  const auto [test_x, test_y] = gather(s.test);

  SvmConfig svm = config.svm;
  svm.seed = derive_seed(config.svm.seed ^ seed, 1);
  const LinearModel model = svm_train(train_x, train_y, svm);
  const Metrics train_m = metrics(svm_predict(model, train_x), train_y);
  const Metrics test_m = metrics(svm_predict(model, test_x), test_y);
  return TrialReport{train_m.accuracy, test_m.accuracy, test_m.f1, seed};
}

}  // namespace

std::vector<TrialReport> run_experiment(std::span<const FeatureVector> features,
                                        std::span<const int> labels, const ExperimentConfig& config) {
  if (config.trials == 0) throw ContractViolation("trials must be >= 1");
  if (features.size() != labels.size()) throw ContractViolation("features and labels differ in count");
  std::vector<std::optional<TrialReport>> reports(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  parallel_for(config.trials, config.workers, [&](Index t) {
    try {
      reports[t] = run_trial(features, labels, config, t);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  });
  std::vector<TrialReport> out;
  out.reserve(config.trials);
  for (Index t = 0; t < config.trials; ++t) {
    if (errors[t]) std::rethrow_exception(errors[t]);
    out.push_back(*reports[t]);
  }
  return out;
}

std::vector<int> dataset_labels(const Dataset& dataset) {
  std::vector<int> y;
  y.reserve(dataset.subjects.size());
  for (const auto& s : dataset.subjects) y.push_back(s.label == dataset.positive_label ? 1 : -1);
  return y;
}

std::vector<FeatureVector> dataset_features(const Dataset& dataset, FeatureKind kind,
                                            const ExperimentConfig& config) {
  const Index count = dataset.subjects.size();
  std::vector<FeatureVector> out(count);
  std::vector<std::exception_ptr> errors(count);
  const EpsilonThreshold eps(config.epsilon);
  parallel_for(count, config.workers, [&](Index i) {
    try {
      const auto& data = dataset.subjects[i].data;
      if (kind == FeatureKind::Graph) {
        out[i] = vectorize_graph(connectome(data));
      } else {
        out[i] = vectorize_hypergraph(build_hyperconnectome(data, config.d, eps, config.variant),
                                      config.include_degenerate);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<TrialReport> run_experiment(const Dataset& dataset, FeatureKind kind,
                                        const ExperimentConfig& config) {
  const auto features = dataset_features(dataset, kind, config);
  const auto labels = dataset_labels(dataset);
  return run_experiment(features, labels, config);
}

}  // namespace hyperconn
