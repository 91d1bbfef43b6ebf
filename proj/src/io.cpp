#include "hyperconn/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "hyperconn/error.hpp"

namespace hyperconn {

namespace fs = std::filesystem;

RoiRange RoiRange::parse(const std::string& text) {
  if (text.empty() || text == "all") return {};
  auto to_index = [&](const std::string& part) {
    Index v = 0;
    const auto* begin = part.data();
    const auto* end = part.data() + part.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || v == 0) {
      throw ContractViolation("bad ROI range '" + text + "' (expected all, N or A:B with 1-based indices)");
    }
    return v;
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const Index v = to_index(text);
    return {v, v};
  }
  RoiRange r{to_index(text.substr(0, colon)), to_index(text.substr(colon + 1))};
  if (*r.last < r.first) throw ContractViolation("ROI range '" + text + "' is empty");
  return r;
}

std::string RoiRange::to_string() const {
  if (first == 1 && !last) return "all";
  if (!last) return fmt::format("{}:", first);
  if (*last == first) return fmt::format("{}", first);
  return fmt::format("{}:{}", first, *last);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (*begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

TimeSeriesMatrix parse_timeseries_csv(const std::string& text, const std::string& source,
                                      const IngestOptions& options) {
  std::vector<std::string> header;
  std::vector<std::string> row_labels;
  std::vector<std::vector<double>> rows;
  bool label_column = false;
  std::size_t width = 0;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_cells(line);

    if (first_content) {
      first_content = false;
      bool any_numeric = false;
      for (std::size_t c = 1; c < cells.size(); ++c) any_numeric |= parse_number(cells[c]).has_value();
      if (!any_numeric && !(cells.size() == 1 && parse_number(cells[0]))) {
        header = std::move(cells);
        continue;
      }
    }
    if (width == 0) {
      label_column = !parse_number(cells[0]).has_value();
      width = cells.size();
    }

    if (cells.size() != width) {
      throw ParseError(source, line_no,
                       fmt::format("ragged row: {} cells where {} expected", cells.size(), width));
    }
    std::vector<double> values;
    values.reserve(width);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == 0 && label_column) {
        row_labels.push_back(cells[0]);
        continue;
      }
      const auto v = parse_number(cells[c]);
      if (!v) throw ParseError(source, line_no, fmt::format("non-numeric cell '{}' in column {}", cells[c], c + 1));
      if (!std::isfinite(*v)) throw ParseError(source, line_no, fmt::format("non-finite value in column {}", c + 1));
      values.push_back(*v);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty() || rows.front().empty()) throw ParseError(source, 0, "no numeric data");
  if (!header.empty() && width > 0 && header.size() != width) {
    throw ParseError(source, 1, fmt::format("header has {} cells, data rows have {}", header.size(), width));
  }

  // Orient as variables x samples.
  std::vector<std::vector<double>> vars;
  std::vector<std::string> labels;
  if (!options.transpose) {
    vars = std::move(rows);
    labels = label_column ? row_labels : default_labels(vars.size());
  } else {
    const Index n_vars = rows.front().size();
    vars.assign(n_vars, std::vector<double>(rows.size()));
    for (Index j = 0; j < rows.size(); ++j) {
      for (Index i = 0; i < n_vars; ++i) vars[i][j] = rows[j][i];
    }
    if (!header.empty()) {
      labels.assign(header.begin() + (label_column ? 1 : 0), header.end());
    } else {
      labels = default_labels(n_vars);
    }
  }

  const Index total = vars.size();
  const Index first = options.roi.first;
  const Index last = options.roi.last.value_or(total);
  if (first > total || last > total) {
    throw ParseError(source, 0,
                     fmt::format("ROI range {} outside the {} variables present", options.roi.to_string(), total));
  }
  const Index m = last - first + 1;
  Index n = vars.front().size();
  if (options.samples_cap > 0) n = std::min(n, options.samples_cap);
  if (m == 0 || n == 0) throw ParseError(source, 0, "empty selection");

  std::vector<double> values;
  values.reserve(m * n);
  std::vector<std::string> selected_labels;
  for (Index i = first - 1; i < last; ++i) {
    values.insert(values.end(), vars[i].begin(), vars[i].begin() + static_cast<std::ptrdiff_t>(n));
    selected_labels.push_back(labels[i]);
  }
  return TimeSeriesMatrix(m, n, std::move(values), std::move(selected_labels));
}

TimeSeriesMatrix ingest_timeseries(const fs::path& path, const IngestOptions& options) {
  return parse_timeseries_csv(read_file(path), path.string(), options);
}

std::string timeseries_csv(const TimeSeriesMatrix& ts) {
  std::string out;
  for (Index i = 0; i < ts.rows(); ++i) {
    for (Index j = 0; j < ts.cols(); ++j) {
      if (j > 0) out += ',';
      out += fmt::format("{}", ts(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string connectome_csv(const ConnectomeMatrix& cm) {
  std::string out;
  for (const auto& label : cm.labels()) out += "," + label;
  out += '\n';
  for (Index i = 0; i < cm.size(); ++i) {
    out += cm.labels()[i];
    for (Index j = 0; j < cm.size(); ++j) out += fmt::format(",{}", cm(i, j));
    out += '\n';
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  const int fd = ::open(tmp.c_str(), O_RDONLY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void save_dataset(const fs::path& dir, const Dataset& dataset, const nlohmann::json& config) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  nlohmann::json manifest;
  manifest["format"] = "hyperconn-dataset";
  manifest["positive_label"] = dataset.positive_label;
  manifest["negative_label"] = dataset.negative_label;
  manifest["seed"] = dataset.seed;
  if (!config.is_null()) manifest["config"] = config;
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& s : dataset.subjects) {
    const std::string file = s.id + ".csv";
    write_file_atomic(dir / file, timeseries_csv(s.data));
    subjects.push_back({{"id", s.id}, {"file", file}, {"label", s.label}, {"stream_seed", s.stream_seed}});
  }
  manifest["subjects"] = std::move(subjects);
  write_file_atomic(dir / kManifestName, manifest.dump(1) + "\n");
}

Dataset load_dataset(const fs::path& path, const IngestOptions& options) {
  Dataset ds;
  if (!fs::is_directory(path)) {
    if (!fs::exists(path)) throw IoError("no such file or directory: " + path.string());
    ds.subjects.push_back(Subject{path.stem().string(), "", ingest_timeseries(path, options), 0});
    return ds;
  }
  const fs::path manifest_path = path / kManifestName;
  const std::string text = read_file(manifest_path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text);
    ds.positive_label = manifest.at("positive_label").get<std::string>();
    ds.negative_label = manifest.value("negative_label", std::string());
    ds.seed = manifest.value("seed", std::uint64_t{0});
    for (const auto& entry : manifest.at("subjects")) {
      const auto file = entry.at("file").get<std::string>();
      ds.subjects.push_back(Subject{
          entry.at("id").get<std::string>(),
          entry.at("label").get<std::string>(),
          ingest_timeseries(path / file, options),
          entry.value("stream_seed", std::uint64_t{0}),
      });
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string(), 0, e.what());
  }
  return ds;
}

}  // namespace hyperconn
