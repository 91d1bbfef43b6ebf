#include "hyperconn/hyperconnectome.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "hyperconn/error.hpp"

namespace hyperconn {

HyperConnectome build_hyperconnectome(const TimeSeriesMatrix& ts, Index d, EpsilonThreshold eps,
                                      EstimatorVariant variant, unsigned workers) {
  return HyperConnectome{
      .tensor = alg1_total_correlation(ts, d, eps, variant, workers),
      .epsilon = eps.value(),
      .variant = variant,
      .roi_labels = ts.labels(),
      .source_id = std::nullopt,
      .log_base = "nat",
      .config = nullptr,
  };
}

HyperedgeList significant_edges(const HyperConnectome& hc, double threshold, bool include_degenerate) {
  HyperedgeList list{{}, threshold};
  const auto weights = hc.tensor.weights();
  std::vector<Index> tuple(hc.order(), 0);
  for (std::uint64_t rank = 0; rank < weights.size(); ++rank) {
    if (weights[rank] > threshold && (include_degenerate || !is_degenerate(tuple))) {
      list.edges.push_back({tuple, weights[rank]});
    }
    next_tuple(tuple, hc.variables());
  }
  // Edges were collected in rank order, so a stable sort breaks ties by rank.
  std::stable_sort(list.edges.begin(), list.edges.end(),
                   [](const Hyperedge& a, const Hyperedge& b) { return a.weight > b.weight; });
  return list;
}

std::vector<double> pairwise_reduce(const HyperConnectome& hc, bool include_degenerate) {
  const Index m = hc.variables();
  const Index d = hc.order();
  if (d < 2) throw ContractViolation("pairwise reduction needs d >= 2");
  std::vector<double> matrix(m * m, 0.0);
  const auto weights = hc.tensor.weights();
  std::vector<Index> tuple(d, 0);
  std::vector<Index> distinct;
  std::vector<Index> repeated;
  for (std::uint64_t rank = 0; rank < weights.size(); ++rank, next_tuple(tuple, m)) {
    if (!include_degenerate && is_degenerate(tuple)) continue;
    const double w = weights[rank];
    distinct.clear();
    repeated.clear();
    for (Index k = 0; k < d; ++k) {
      if (k > 0 && tuple[k] == tuple[k - 1]) {
        if (repeated.empty() || repeated.back() != tuple[k]) repeated.push_back(tuple[k]);
      } else {
        distinct.push_back(tuple[k]);
      }
    }
    for (std::size_t a = 0; a < distinct.size(); ++a) {
      for (std::size_t b = a + 1; b < distinct.size(); ++b) {
        matrix[distinct[a] * m + distinct[b]] += w;
        matrix[distinct[b] * m + distinct[a]] += w;
      }
    }
    for (Index r : repeated) matrix[r * m + r] += w;
  }
  return matrix;
}

HyperConnectome to_bits(const HyperConnectome& hc) {
  if (hc.log_base == "bit") return hc;
  std::vector<double> weights(hc.tensor.weights().begin(), hc.tensor.weights().end());
  for (double& w : weights) w /= std::numbers::ln2;
  HyperConnectome out = hc;
  out.tensor = SymmetricTensor(hc.variables(), hc.order(), std::move(weights));
  out.log_base = "bit";
  return out;
}

nlohmann::json serialize_hc(const HyperConnectome& hc) {
  nlohmann::json doc;
  doc["format"] = "hyperconnectome";
  doc["m"] = hc.variables();
  doc["d"] = hc.order();
  doc["epsilon"] = hc.epsilon;
  doc["variant"] = std::string(to_string(hc.variant));
  doc["log_base"] = hc.log_base;
  doc["roi_labels"] = hc.roi_labels;
  if (hc.source_id) doc["source_id"] = *hc.source_id;
  if (!hc.config.is_null()) doc["config"] = hc.config;

  nlohmann::json entries = nlohmann::json::array();
  const auto weights = hc.tensor.weights();
  std::vector<Index> tuple(hc.order(), 0);
  std::vector<Index> one_based(hc.order());
  for (std::uint64_t rank = 0; rank < weights.size(); ++rank) {
    for (Index k = 0; k < tuple.size(); ++k) one_based[k] = tuple[k] + 1;
    entries.push_back({{"idx", one_based}, {"w", weights[rank]}});
    next_tuple(tuple, hc.variables());
  }
  doc["entries"] = std::move(entries);
  return doc;
}

std::string serialize_hc_text(const HyperConnectome& hc) { return serialize_hc(hc).dump(1) + "\n"; }

namespace {

template <class T>
T field(const nlohmann::json& doc, const char* key, const std::string& source) {
  if (!doc.contains(key)) throw ParseError(source, 0, std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

HyperConnectome deserialize_hc(const nlohmann::json& doc, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source, 0, "document is not an object");
  if (field<std::string>(doc, "format", source) != "hyperconnectome") {
    throw ParseError(source, 0, "not a hyperconnectome document");
  }
  const auto m = field<Index>(doc, "m", source);
  const auto d = field<Index>(doc, "d", source);
  const auto epsilon = field<double>(doc, "epsilon", source);
  const auto variant_name = field<std::string>(doc, "variant", source);
  const auto log_base = field<std::string>(doc, "log_base", source);
  auto labels = field<std::vector<std::string>>(doc, "roi_labels", source);
  if (d < 2) throw ParseError(source, 0, "d must be >= 2");
  if (!(epsilon > 0.0)) throw ParseError(source, 0, "epsilon must be positive");
  if (labels.size() != m) throw ParseError(source, 0, "roi_labels length != m");
  if (log_base != "nat" && log_base != "bit") throw ParseError(source, 0, "log_base must be nat or bit");

  EstimatorVariant variant{};
  try {
    variant = parse_variant(variant_name);
  } catch (const ContractViolation& e) {
    throw ParseError(source, 0, e.what());
  }

  if (!doc.contains("entries") || !doc.at("entries").is_array()) {
    throw ParseError(source, 0, "missing entries array");
  }
  const auto& entries = doc.at("entries");
  const std::uint64_t expected = tuple_count(m, d);
  if (entries.size() != expected) {
    throw ParseError(source, 0,
                     fmt::format("entries has {} items, expected {}", entries.size(), expected));
  }
  std::vector<double> weights(expected, 0.0);
  std::vector<bool> seen(expected, false);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& entry = entries[e];
    std::vector<Index> tuple;
    double w = 0.0;
    try {
      tuple = entry.at("idx").get<std::vector<Index>>();
      w = entry.at("w").get<double>();
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(source, 0, fmt::format("entries[{}]: {}", e, ex.what()));
    }
    if (tuple.size() != d) throw ParseError(source, 0, fmt::format("entries[{}]: idx length != d", e));
    for (Index& v : tuple) {
      if (v == 0 || v > m) throw ParseError(source, 0, fmt::format("entries[{}]: idx out of range", e));
      --v;
    }
    std::uint64_t rank = 0;
    try {
      rank = tuple_rank(tuple, m);
    } catch (const ContractViolation& ex) {
      throw ParseError(source, 0, fmt::format("entries[{}]: {}", e, ex.what()));
    }
    if (seen[rank]) throw ParseError(source, 0, fmt::format("entries[{}]: duplicate tuple", e));
    if (!std::isfinite(w)) throw ParseError(source, 0, fmt::format("entries[{}]: non-finite weight", e));
    seen[rank] = true;
    weights[rank] = w;
  }

  HyperConnectome hc{
      .tensor = SymmetricTensor(m, d, std::move(weights)),
      .epsilon = epsilon,
      .variant = variant,
      .roi_labels = std::move(labels),
      .source_id = std::nullopt,
      .log_base = log_base,
      .config = nullptr,
  };
  if (doc.contains("source_id")) hc.source_id = field<std::string>(doc, "source_id", source);
  if (doc.contains("config")) hc.config = doc.at("config");
  return hc;
}

HyperConnectome deserialize_hc_text(const std::string& text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ParseError(source, line, e.what());
  }
  return deserialize_hc(doc, source);
}

std::string pairwise_csv(std::span<const double> matrix, const std::vector<std::string>& labels) {
  const Index m = labels.size();
  if (matrix.size() != m * m) throw ContractViolation("matrix size != labels^2");
  std::string out;
  for (const auto& label : labels) out += "," + label;
  out += "\n";
  for (Index i = 0; i < m; ++i) {
    out += labels[i];
    for (Index j = 0; j < m; ++j) out += fmt::format(",{}", matrix[i * m + j]);
    out += "\n";
  }
  return out;
}

std::string edges_csv(const HyperedgeList& edges, Index d) {
  std::string out;
  for (Index k = 0; k < d; ++k) out += fmt::format("v{},", k + 1);
  out += "weight\n";
  for (const auto& edge : edges.edges) {
    for (Index v : edge.tuple) out += fmt::format("{},", v + 1);
    out += fmt::format("{}\n", edge.weight);
  }
  return out;
}

}  // namespace hyperconn
