#include "hyperconn/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "hyperconn/error.hpp"
#include "hyperconn/estimators.hpp"

namespace hyperconn {

TimeSeriesMatrix gen_x_subject(RandomStream& stream, Index n) {
  if (n == 0) throw ContractViolation("need at least one sample");
  std::vector<double> values(3 * n);
  for (double& v : values) v = stream.rademacher();
  return TimeSeriesMatrix(3, n, std::move(values));
}

TimeSeriesMatrix gen_y_subject(RandomStream& stream, Index n) {
  if (n == 0) throw ContractViolation("need at least one sample");
  std::vector<double> values(3 * n);
  for (Index j = 0; j < n; ++j) {
    const double x1 = stream.rademacher();
    const double x2 = stream.rademacher();
    const double x3 = stream.rademacher();
    values[0 * n + j] = x1 * x2;
    values[1 * n + j] = x2 * x3;
    values[2 * n + j] = x3 * x1;
  }
  return TimeSeriesMatrix(3, n, std::move(values));
}

Dataset gen_dataset(Index nx, Index ny, Index n, std::uint64_t seed) {
  if (n == 0) throw ContractViolation("need at least one sample per subject");
  Dataset ds;
  ds.positive_label = kLabelY;
  ds.negative_label = kLabelX;
  ds.seed = seed;
  ds.subjects.reserve(nx + ny);
  for (Index k = 0; k < nx + ny; ++k) {
    const std::uint64_t stream_seed = derive_seed(seed, k);
    RandomStream stream(stream_seed);
    const bool is_x = k < nx;
    ds.subjects.push_back(Subject{
        .id = fmt::format("subject_{:05d}", k),
        .label = is_x ? kLabelX : kLabelY,
        .data = is_x ? gen_x_subject(stream, n) : gen_y_subject(stream, n),
        .stream_seed = stream_seed,
    });
  }
  return ds;
}

namespace {

// The 8 equiprobable hidden outcomes and the Y triple each produces.
std::array<std::array<double, 3>, 8> y_outcomes() {
  std::array<std::array<double, 3>, 8> out{};
  for (int code = 0; code < 8; ++code) {
    const double x1 = (code & 1) ? 1.0 : -1.0;
    const double x2 = (code & 2) ? 1.0 : -1.0;
    const double x3 = (code & 4) ? 1.0 : -1.0;
    out[code] = {x1 * x2, x2 * x3, x3 * x1};
  }
  return out;
}

}  // namespace

double oracle_pairwise_corr_y(Index i, Index j) {
  if (i > 2 || j > 2) throw ContractViolation("Y has three coordinates");
  double mean_i = 0.0;
  double mean_j = 0.0;
  for (const auto& y : y_outcomes()) {
    mean_i += y[i] / 8.0;
    mean_j += y[j] / 8.0;
  }
  double cov = 0.0;
  double var_i = 0.0;
  double var_j = 0.0;
  for (const auto& y : y_outcomes()) {
    cov += (y[i] - mean_i) * (y[j] - mean_j) / 8.0;
    var_i += (y[i] - mean_i) * (y[i] - mean_i) / 8.0;
    var_j += (y[j] - mean_j) * (y[j] - mean_j) / 8.0;
  }
  return cov / std::sqrt(var_i * var_j);
}

double oracle_total_corr_y() {
  Pmf pmf;
  for (const auto& y : y_outcomes()) pmf[{y[0], y[1], y[2]}] += 1.0 / 8.0;
  return enumerate_total_correlation(pmf);
}

double oracle_total_corr_x() {
  Pmf pmf;
  for (int code = 0; code < 8; ++code) {
    pmf[{(code & 1) ? 1.0 : -1.0, (code & 2) ? 1.0 : -1.0, (code & 4) ? 1.0 : -1.0}] += 1.0 / 8.0;
  }
  return enumerate_total_correlation(pmf);
}

Dataset gen_standin_cohort(Index cases, Index controls, Index m, Index n, std::uint64_t seed) {
  if (m < 8) throw ContractViolation("stand-in cohort needs at least 8 variables");
  if (n == 0) throw ContractViolation("need at least one sample per subject");
  const Index triples = std::min<Index>(15, m / 4);
  const Index coupled = 3 * triples;
  const Index factor_end = std::min(m, coupled + 5);
  const double loading = 0.3;

  Dataset ds;
  ds.positive_label = kLabelCase;
  ds.negative_label = kLabelControl;
  ds.seed = seed;
  ds.subjects.reserve(cases + controls);
  for (Index k = 0; k < cases + controls; ++k) {
    const std::uint64_t stream_seed = derive_seed(seed, k);
    RandomStream stream(stream_seed);
    const bool is_case = k < cases;
    std::vector<double> values(m * n);
    for (Index i = coupled; i < m; ++i) {
      double x = stream.gaussian();
      for (Index j = 0; j < n; ++j) {
        x = 0.5 * x + std::sqrt(0.75) * stream.gaussian();
        values[i * n + j] = x;
      }
    }
    for (Index j = 0; j < n; ++j) {
      for (Index t = 0; t < triples; ++t) {
        const double h1 = stream.rademacher();
        const double h2 = stream.rademacher();
        const double h3 = stream.rademacher();
        double* v = values.data() + 3 * t * n + j;
        v[0] = is_case ? h1 * h2 : h1;
        v[n] = is_case ? h2 * h3 : h2;
        v[2 * n] = is_case ? h3 * h1 : h3;
      }
      if (is_case) {
        const double factor = stream.gaussian();
        for (Index i = coupled; i < factor_end; ++i) {
          values[i * n + j] = std::sqrt(1.0 - loading * loading) * values[i * n + j] + loading * factor;
        }
      }
    }
    // Quantize the continuous ROIs to a few levels, as recorded intensities are.
    for (Index i = coupled; i < m; ++i) {
      for (Index j = 0; j < n; ++j) {
        values[i * n + j] = std::clamp(std::round(1.5 * values[i * n + j]), -3.0, 3.0) + 0.0;
      }
    }
    ds.subjects.push_back(Subject{
        .id = fmt::format("subject_{:05d}", k),
        .label = is_case ? kLabelCase : kLabelControl,
        .data = TimeSeriesMatrix(m, n, std::move(values)),
        .stream_seed = stream_seed,
    });
  }
  return ds;
}

}  // namespace hyperconn
