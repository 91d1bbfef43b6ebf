#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "hyperconn/error.hpp"
#include "hyperconn/learn.hpp"

using namespace hyperconn;

namespace {

double boost_two_sided(double t, double df) {
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

TEST_CASE("identical groups") {
  const std::vector<double> a{0.5, 0.6, 0.7, 0.55};
  const auto r = two_sample_ttest(a, a);
  CHECK(r.t == 0.0);
  CHECK(r.p == 1.0);
  CHECK(r.df == 6.0);
}

TEST_CASE("shifted five-versus-five example") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{2, 3, 4, 5, 6};
  const auto r = two_sample_ttest(a, b);
  CHECK(r.t == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.df == 8.0);
  CHECK(std::abs(r.p - 0.3466) < 1e-3);
  CHECK(r.p == doctest::Approx(boost_two_sided(-1.0, 8.0)).epsilon(1e-10));
}

TEST_CASE("zero variance sentinels") {
  const std::vector<double> a{1, 1, 1};
  const std::vector<double> b{2, 2, 2};
  const auto r = two_sample_ttest(a, b);
  CHECK(std::isinf(r.t));
  CHECK(r.t < 0.0);
  CHECK(r.p == 0.0);
  CHECK_THROWS_AS(two_sample_ttest(std::vector<double>{1}, b), ContractViolation);
}

TEST_CASE("incomplete beta against boost") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> shape(0.1, 40.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = shape(rng);
    const double b = shape(rng);
    const double x = unit(rng);
    CHECK(incomplete_beta(a, b, x) == doctest::Approx(boost::math::ibeta(a, b, x)).epsilon(1e-10).scale(1e-3));
  }
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
}

TEST_CASE("t distribution cdf against boost") {
  for (double df : {1.0, 2.0, 3.5, 8.0, 30.0, 226.0}) {
    const boost::math::students_t dist(df);
    for (double t = -8.0; t <= 8.0; t += 0.37) {
      CHECK(student_t_cdf(t, df) == doctest::Approx(boost::math::cdf(dist, t)).epsilon(1e-10).scale(1e-3));
    }
  }
}

TEST_CASE("random groups: symmetry, range and agreement with boost") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> a(2 + rng() % 15);
    std::vector<double> b(2 + rng() % 15);
    const double shift = g(rng);
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = g(rng) * 2.0 + shift;
    for (auto kind : {TTestKind::Pooled, TTestKind::Welch}) {
      const auto ab = two_sample_ttest(a, b, kind);
      const auto ba = two_sample_ttest(b, a, kind);
      CHECK(ab.t == -ba.t);
      CHECK(ab.p == ba.p);
      CHECK(ab.p >= 0.0);
      CHECK(ab.p <= 1.0);
      CHECK(ab.p == doctest::Approx(boost_two_sided(ab.t, ab.df)).epsilon(1e-9).scale(1e-6));
    }
  }
}
