#pragma once

#include <cstdint>

#include "hyperconn/core.hpp"
#include "hyperconn/random.hpp"

namespace hyperconn {

inline constexpr const char* kLabelX = "X";
inline constexpr const char* kLabelY = "Y";

/// 3 x n matrix of independent Rademacher variables.
TimeSeriesMatrix gen_x_subject(RandomStream& stream, Index n);

/// 3 x n matrix [X1 X2, X2 X3, X3 X1] for hidden Rademacher X1, X2, X3.
TimeSeriesMatrix gen_y_subject(RandomStream& stream, Index n);

/// nx X-subjects followed by ny Y-subjects; subject k uses derive_seed(seed, k).
Dataset gen_dataset(Index nx, Index ny, Index n, std::uint64_t seed);

/// Population corr(Y_i, Y_j) by enumeration of the 8 hidden outcomes.
double oracle_pairwise_corr_y(Index i, Index j);
/// Population total correlation of (Y1, Y2, Y3): ln 2.
double oracle_total_corr_y();
/// Population total correlation of (X1, X2, X3): 0.
double oracle_total_corr_x();

inline constexpr const char* kLabelCase = "case";
inline constexpr const char* kLabelControl = "control";

/// Synthetic clinical-shaped cohort. The first 3 * min(15, m / 4) ROIs form
/// disjoint triples: independent +-1 series in controls, parity-coupled in
/// cases. Cases also share a weak common factor on the next five ROIs. The
/// remaining ROIs are quantized AR(1) series. Cases come first.
Dataset gen_standin_cohort(Index cases, Index controls, Index m, Index n, std::uint64_t seed);

}  // namespace hyperconn
