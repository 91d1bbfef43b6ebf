#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "hyperconn/core.hpp"

namespace hyperconn {

/// 1-based inclusive ROI range; `last` empty means through the final row.
struct RoiRange {
  Index first = 1;
  std::optional<Index> last;

  /// "all", "7" or "1:61".
  static RoiRange parse(const std::string& text);
  std::string to_string() const;
};

struct IngestOptions {
  RoiRange roi;
  /// Keep only the first `samples_cap` columns; 0 keeps all.
  Index samples_cap = 0;
  /// Input has one column per variable instead of one row per variable.
  bool transpose = false;
};

/// Parses comma-separated measurements. A leading row with no numeric cells
/// is a header; a non-numeric first cell on data rows is a label column.
/// Throws ParseError naming `source` and the offending line.
TimeSeriesMatrix parse_timeseries_csv(const std::string& text, const std::string& source,
                                      const IngestOptions& options = {});

TimeSeriesMatrix ingest_timeseries(const std::filesystem::path& path, const IngestOptions& options = {});

/// Rows are variables, no header.
std::string timeseries_csv(const TimeSeriesMatrix& ts);

/// Square matrix with an ROI label header row and label column.
std::string connectome_csv(const ConnectomeMatrix& cm);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling, syncs it, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

inline constexpr const char* kManifestName = "manifest.json";

/// Writes manifest.json plus one CSV per subject into `dir`.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset, const nlohmann::json& config);

/// Reads a dataset directory, or a single CSV as a one-subject dataset.
Dataset load_dataset(const std::filesystem::path& path, const IngestOptions& options = {});

}  // namespace hyperconn
