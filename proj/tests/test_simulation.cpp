#include "doctest.h"

#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "hyperconn/estimators.hpp"
#include "hyperconn/random.hpp"
#include "hyperconn/simulation.hpp"

using namespace hyperconn;

TEST_CASE("subjects hold +-1 values and Y obeys the parity constraint") {
  const Dataset ds = gen_dataset(20, 20, 50, 42);
  REQUIRE(ds.subjects.size() == 40);
  CHECK(ds.positive_label == kLabelY);
  for (std::size_t k = 0; k < ds.subjects.size(); ++k) {
    const auto& s = ds.subjects[k];
    CHECK(s.label == (k < 20 ? kLabelX : kLabelY));
    CHECK(s.data.rows() == 3);
    CHECK(s.data.cols() == 50);
    CHECK(s.stream_seed == derive_seed(42, k));
    for (double v : s.data.values()) CHECK((v == 1.0 || v == -1.0));
    if (s.label == kLabelY) {
      for (Index j = 0; j < 50; ++j) CHECK(s.data(0, j) * s.data(1, j) * s.data(2, j) == 1.0);
    }
  }
}

TEST_CASE("datasets are reproducible and order independent") {
  const Dataset a = gen_dataset(3, 4, 20, 9);
  const Dataset b = gen_dataset(3, 4, 20, 9);
  for (std::size_t k = 0; k < a.subjects.size(); ++k) CHECK(a.subjects[k].data == b.subjects[k].data);

  // Subject k depends only on (seed, k).
  RandomStream stream(derive_seed(9, 5));
  CHECK(gen_y_subject(stream, 20) == a.subjects[5].data);

  const Dataset only_y = gen_dataset(0, 6, 10, 1);
  CHECK(only_y.subjects.size() == 6);
  for (const auto& s : only_y.subjects) CHECK(s.label == kLabelY);

  CHECK_FALSE(gen_dataset(3, 4, 20, 10).subjects[0].data == a.subjects[0].data);
}

TEST_CASE("large-sample marginals and correlations") {
  RandomStream sy(77);
  RandomStream sx(78);
  const auto y = gen_y_subject(sy, 100000);
  const auto x = gen_x_subject(sx, 100000);
  for (Index i = 0; i < 3; ++i) {
    double mean = 0.0;
    for (double v : y.row(i)) mean += v;
    CHECK(std::abs(mean / 100000.0) < 0.02);
    for (Index j = i + 1; j < 3; ++j) {
      CHECK(std::abs(pearson(y.row(i), y.row(j))) < 0.02);
      CHECK(std::abs(pearson(x.row(i), x.row(j))) < 0.02);
    }
  }
}

TEST_CASE("X-subject connectomes average to zero off the diagonal") {
  const Dataset ds = gen_dataset(1000, 0, 20, 5);
  double total = 0.0;
  for (const auto& s : ds.subjects) {
    const auto cm = connectome(s.data);
    total += cm(0, 1) + cm(0, 2) + cm(1, 2);
  }
  CHECK(std::abs(total / (3.0 * 1000.0)) < 0.03);
}

TEST_CASE("pooled Y samples match the four-point joint distribution") {
  std::map<std::array<double, 3>, long> counts;
  long total = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    RandomStream s(derive_seed(123, k));
    const auto y = gen_y_subject(s, 10000);
    for (Index j = 0; j < y.cols(); ++j) {
      ++counts[{y(0, j), y(1, j), y(2, j)}];
      ++total;
    }
  }
  CHECK(total == 1000000);
  CHECK(counts.size() == 4);
  for (const auto& [triple, c] : counts) {
    CHECK(triple[0] * triple[1] * triple[2] == 1.0);
    CHECK(std::abs(static_cast<double>(c) / total - 0.25) < 0.005);
  }
}

TEST_CASE("population oracles") {
  CHECK(std::abs(oracle_total_corr_y() - std::numbers::ln2) < 1e-12);
  CHECK(oracle_total_corr_y() > 0.0);
  CHECK(oracle_total_corr_x() == 0.0);
  for (Index i = 0; i < 3; ++i) {
    CHECK(oracle_pairwise_corr_y(i, i) == doctest::Approx(1.0).epsilon(1e-15));
    for (Index j = 0; j < 3; ++j) {
      if (i != j) CHECK(std::abs(oracle_pairwise_corr_y(i, j)) < 1e-12);
    }
  }
}

TEST_CASE("stand-in cohort shape") {
  const Dataset ds = gen_standin_cohort(5, 7, 12, 20, 3);
  REQUIRE(ds.subjects.size() == 12);
  CHECK(ds.positive_label == kLabelCase);
  for (std::size_t k = 0; k < ds.subjects.size(); ++k) {
    const auto& s = ds.subjects[k];
    CHECK(s.label == (k < 5 ? kLabelCase : kLabelControl));
    CHECK(s.data.rows() == 12);
    CHECK(s.data.cols() == 20);
    for (double v : s.data.values()) CHECK(v == std::round(v));
  }
  const Dataset again = gen_standin_cohort(5, 7, 12, 20, 3);
  for (std::size_t k = 0; k < ds.subjects.size(); ++k) CHECK(ds.subjects[k].data == again.subjects[k].data);
}
