#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hyperconn/core.hpp"
#include "hyperconn/estimators.hpp"

namespace hyperconn {

/// Weighted hypergraph over ROIs: total correlation of every sorted d-tuple.
struct HyperConnectome {
  SymmetricTensor tensor;
  double epsilon = 1e-5;
  EstimatorVariant variant = EstimatorVariant::PaperTupleSum;
  std::vector<std::string> roi_labels;
  std::optional<std::string> source_id;
  /// "nat" or "bit"; unit of the tensor weights.
  std::string log_base = "nat";
  /// Provenance echoed into serialized documents; null when absent.
  nlohmann::json config;

  Index order() const noexcept { return tensor.order(); }
  Index variables() const noexcept { return tensor.variables(); }

  friend bool operator==(const HyperConnectome&, const HyperConnectome&) = default;
};

struct Hyperedge {
  std::vector<Index> tuple;  // sorted, 0-based
  double weight;
  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
};

struct HyperedgeList {
  std::vector<Hyperedge> edges;
  double threshold;
};

/// Default cut for exported significant edges (2^8).
inline constexpr double kDefaultEdgeThreshold = 256.0;

HyperConnectome build_hyperconnectome(const TimeSeriesMatrix& ts, Index d, EpsilonThreshold eps,
                                      EstimatorVariant variant, unsigned workers = 1);

/// Edges with weight strictly above `threshold`, heaviest first; ties by rank.
HyperedgeList significant_edges(const HyperConnectome& hc, double threshold,
                                bool include_degenerate = true);

/// Sums, for each ROI pair, the weights of every stored tuple containing both.
/// The diagonal collects tuples containing an index at least twice.
/// Row-major m x m.
std::vector<double> pairwise_reduce(const HyperConnectome& hc, bool include_degenerate = true);

/// Rescales weights from nats to bits (division by ln 2).
HyperConnectome to_bits(const HyperConnectome& hc);

nlohmann::json serialize_hc(const HyperConnectome& hc);
std::string serialize_hc_text(const HyperConnectome& hc);
/// Throws ParseError naming `source` on malformed input.
HyperConnectome deserialize_hc(const nlohmann::json& doc, const std::string& source = "<document>");
HyperConnectome deserialize_hc_text(const std::string& text, const std::string& source = "<document>");

/// CSV with an ROI label header row and label column.
std::string pairwise_csv(std::span<const double> matrix, const std::vector<std::string>& labels);
/// One line per edge: 1-based indices then the weight.
std::string edges_csv(const HyperedgeList& edges, Index d);

}  // namespace hyperconn
