#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hyperconn/error.hpp"
#include "hyperconn/hyperconnectome.hpp"
#include "hyperconn/random.hpp"
#include "hyperconn/simulation.hpp"

using namespace hyperconn;

namespace {

HyperConnectome with_weights(Index m, Index d, std::vector<double> w) {
  HyperConnectome hc{SymmetricTensor(m, d, std::move(w))};
  hc.roi_labels = default_labels(m);
  return hc;
}

HyperConnectome y_subject_hc() {
  // The four legal parity triples, each once.
  const TimeSeriesMatrix y(3, 4, {1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1});
  auto hc = build_hyperconnectome(y, 3, EpsilonThreshold(1e-5), EstimatorVariant::PaperTupleSum);
  hc.source_id = "y0";
  hc.config = {{"seed", 3}, {"epsilon", 1e-5}};
  return hc;
}

}  // namespace

TEST_CASE("stored weight counts") {
  RandomStream s(1);
  const auto y = gen_y_subject(s, 20);
  CHECK(build_hyperconnectome(y, 3, EpsilonThreshold(1e-5), EstimatorVariant::PaperTupleSum).tensor.size() == 10);

  std::vector<double> v(30 * 20);
  for (auto& x : v) x = std::round(s.gaussian());
  const auto hc = build_hyperconnectome(TimeSeriesMatrix(30, 20, v), 3, EpsilonThreshold(1e-5),
                                        EstimatorVariant::PaperTupleSum);
  CHECK(hc.tensor.size() == 4960);
  CHECK(hc.roi_labels.size() == 30);
  CHECK(tuple_count(61, 3) == 39711);
}

TEST_CASE("significant edges") {
  const auto hc = y_subject_hc();
  CHECK(significant_edges(hc, std::numeric_limits<double>::infinity()).edges.empty());
  CHECK(significant_edges(hc, -std::numeric_limits<double>::infinity()).edges.size() == 10);

  bool found = false;
  for (const auto& e : significant_edges(hc, 0.0).edges) {
    if (e.tuple == std::vector<Index>{0, 1, 2}) found = e.weight > 0.0;
  }
  CHECK(found);

  const auto strict = significant_edges(hc, -1.0, false);
  REQUIRE(strict.edges.size() == 1);
  CHECK(strict.edges[0].tuple == std::vector<Index>{0, 1, 2});

  const auto all = significant_edges(hc, -1.0).edges;
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].weight >= all[i].weight);
}

TEST_CASE("thresholding is monotone") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> w(tuple_count(6, 3));
  for (auto& x : w) x = std::floor(u(rng));
  const auto hc = with_weights(6, 3, w);
  for (double lo = -1.0; lo < 11.0; lo += 1.5) {
    for (double hi = lo; hi < 11.0; hi += 2.0) {
      const auto big = significant_edges(hc, lo).edges;
      for (const auto& e : significant_edges(hc, hi).edges) {
        CHECK(std::find(big.begin(), big.end(), e) != big.end());
      }
    }
  }
}

TEST_CASE("pairwise reduction") {
  CHECK(pairwise_reduce(with_weights(2, 2, {1.0, 5.0, 2.0}))[1] == 5.0);

  std::vector<double> w(10);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(1 << i);
  const auto hc = with_weights(3, 3, w);
  const auto r = pairwise_reduce(hc);
  const auto& t = hc.tensor;
  auto at = [&](Index a, Index b, Index c) { return t.at(std::vector<Index>{a, b, c}); };
  CHECK(r[0 * 3 + 1] == at(0, 0, 1) + at(0, 1, 1) + at(0, 1, 2));
  CHECK(r[0 * 3 + 0] == at(0, 0, 0) + at(0, 0, 1) + at(0, 0, 2));
  for (Index a = 0; a < 3; ++a) {
    for (Index b = 0; b < 3; ++b) CHECK(r[a * 3 + b] == r[b * 3 + a]);
  }
  const auto strict = pairwise_reduce(hc, false);
  CHECK(strict[0 * 3 + 1] == at(0, 1, 2));
  CHECK(strict[0] == 0.0);

  for (double v : pairwise_reduce(with_weights(4, 3, std::vector<double>(20, 0.0)))) CHECK(v == 0.0);
  CHECK_THROWS_AS(pairwise_reduce(with_weights(3, 1, {1, 2, 3})), ContractViolation);
}

TEST_CASE("reduction of non-negative weights is symmetric and non-negative") {
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> e(1.0);
  for (int t = 0; t < 20; ++t) {
    const Index m = 2 + rng() % 6;
    const Index d = 2 + rng() % 3;
    std::vector<double> w(tuple_count(m, d));
    for (auto& x : w) x = e(rng);
    const auto r = pairwise_reduce(with_weights(m, d, w));
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) {
        CHECK(r[a * m + b] == r[b * m + a]);
        CHECK(r[a * m + b] >= 0.0);
      }
    }
  }
}

TEST_CASE("bits rescaling") {
  const auto hc = y_subject_hc();
  const auto bits = to_bits(hc);
  CHECK(bits.log_base == "bit");
  for (std::size_t i = 0; i < hc.tensor.size(); ++i) {
    CHECK(bits.tensor.at_rank(i) == hc.tensor.at_rank(i) / std::numbers::ln2);
  }
}

TEST_CASE("serialization round trip") {
  const auto hc = y_subject_hc();
  const std::string text = serialize_hc_text(hc);
  const auto back = deserialize_hc_text(text);
  CHECK(back == hc);
  CHECK(serialize_hc_text(back) == text);

  auto doc = serialize_hc(hc);
  CHECK(doc["entries"].size() == 10);
  CHECK(doc["entries"][0]["idx"] == nlohmann::json::array({1, 1, 1}));

  // Awkward doubles survive exactly.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<double> w(tuple_count(5, 3));
  for (auto& x : w) x = u(rng);
  const auto rnd = with_weights(5, 3, w);
  CHECK(deserialize_hc_text(serialize_hc_text(rnd)) == rnd);

  const auto empty = with_weights(0, 3, {});
  CHECK(deserialize_hc_text(serialize_hc_text(empty)) == empty);
}

TEST_CASE("malformed documents raise parse errors") {
  const std::string text = serialize_hc_text(y_subject_hc());
  CHECK_THROWS_AS(deserialize_hc_text(text.substr(0, text.size() / 2)), ParseError);
  CHECK_THROWS_AS(deserialize_hc_text(""), ParseError);
  CHECK_THROWS_AS(deserialize_hc_text("{\"format\": \"hyperconnectome\"}"), ParseError);

  auto doc = serialize_hc(y_subject_hc());
  doc["entries"].erase(doc["entries"].begin());
  CHECK_THROWS_AS(deserialize_hc(doc), ParseError);

  doc = serialize_hc(y_subject_hc());
  doc["entries"][0]["idx"] = {2, 1, 1};
  CHECK_THROWS_AS(deserialize_hc(doc), ParseError);

  doc = serialize_hc(y_subject_hc());
  doc["variant"] = "other";
  CHECK_THROWS_AS(deserialize_hc(doc), ParseError);

  try {
    deserialize_hc_text(text.substr(0, 200), "cut.json");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.source() == "cut.json");
    CHECK(e.line() > 1);
  }
}

TEST_CASE("csv exports") {
  const auto hc = with_weights(2, 2, {1.0, 5.0, 2.0});
  const auto csv = pairwise_csv(pairwise_reduce(hc), hc.roi_labels);
  CHECK(csv == ",1,2\n1,1,5\n2,5,2\n");
  const auto edges = edges_csv(significant_edges(hc, 1.5), 2);
  CHECK(edges == "v1,v2,weight\n1,2,5\n2,2,2\n");
}
