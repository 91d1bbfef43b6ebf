#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "hyperconn/error.hpp"
#include "hyperconn/io.hpp"
#include "hyperconn/simulation.hpp"

using namespace hyperconn;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hyperconn_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string grid_csv(Index rows, Index cols, bool header, bool labels) {
  std::string out;
  if (header) {
    if (labels) out += "roi";
    for (Index j = 0; j < cols; ++j) out += (j > 0 || labels ? ",t" : "t") + std::to_string(j);
    out += "\n";
  }
  for (Index i = 0; i < rows; ++i) {
    if (labels) out += "r" + std::to_string(i + 1) + ",";
    for (Index j = 0; j < cols; ++j) out += (j ? "," : "") + std::to_string(i * 100 + j);
    out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("roi ranges") {
  CHECK(RoiRange::parse("all").first == 1);
  CHECK_FALSE(RoiRange::parse("all").last.has_value());
  CHECK(RoiRange::parse("7").first == 7);
  CHECK(*RoiRange::parse("7").last == 7);
  CHECK(RoiRange::parse("1:61").first == 1);
  CHECK(*RoiRange::parse("1:61").last == 61);
  CHECK(RoiRange::parse("3:9").to_string() == "3:9");
  CHECK_THROWS_AS(RoiRange::parse("0:3"), ContractViolation);
  CHECK_THROWS_AS(RoiRange::parse("5:2"), ContractViolation);
  CHECK_THROWS_AS(RoiRange::parse("a:b"), ContractViolation);
}

TEST_CASE("ingestion selects rois and caps samples") {
  const auto text = grid_csv(246, 40, false, false);
  const auto ts = parse_timeseries_csv(text, "big.csv", {RoiRange::parse("1:61"), 20, false});
  CHECK(ts.rows() == 61);
  CHECK(ts.cols() == 20);
  CHECK(ts(60, 19) == 6019.0);
  CHECK(ts.labels().front() == "1");
  CHECK(ts.labels().back() == "61");

  const auto mid = parse_timeseries_csv(text, "big.csv", {RoiRange::parse("1:30"), 0, false});
  CHECK(mid.rows() == 30);
  CHECK(mid.cols() == 40);

  const auto one = parse_timeseries_csv(text, "big.csv", {RoiRange::parse("5"), 3, false});
  CHECK(one.rows() == 1);
  CHECK(one(0, 2) == 402.0);
  CHECK(one.labels() == std::vector<std::string>{"5"});
}

TEST_CASE("headers, label columns and transposed input") {
  const auto labeled = parse_timeseries_csv(grid_csv(3, 4, true, true), "l.csv");
  CHECK(labeled.rows() == 3);
  CHECK(labeled.cols() == 4);
  CHECK(labeled.labels() == std::vector<std::string>{"r1", "r2", "r3"});
  CHECK(labeled(2, 3) == 203.0);

  const std::string columns = "a,b,c\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n";
  const auto t = parse_timeseries_csv(columns, "t.csv", {{}, 0, true});
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 4);
  CHECK(t.labels() == std::vector<std::string>{"a", "b", "c"});
  CHECK(t(1, 3) == 11.0);
}

TEST_CASE("malformed input reports the line") {
  try {
    parse_timeseries_csv("1,2,3\n4,5,6\n7,8\n", "ragged.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.source() == "ragged.csv");
    CHECK(e.line() == 3);
  }
  try {
    parse_timeseries_csv("1,2,3\n4,x,6\n", "bad.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_timeseries_csv("", "empty.csv"), ParseError);
  CHECK_THROWS_AS(parse_timeseries_csv("1,2\n3,4\n", "r.csv", {RoiRange::parse("2:5"), 0, false}), ParseError);
  CHECK_THROWS_AS(parse_timeseries_csv("1,nan\n", "n.csv"), ParseError);
}

TEST_CASE("csv writers round trip through the parser") {
  const Dataset ds = gen_standin_cohort(1, 0, 9, 6, 4);
  const auto& ts = ds.subjects[0].data;
  CHECK(parse_timeseries_csv(timeseries_csv(ts), "x", {{}, 0, false}) == ts);

  const ConnectomeMatrix cm(2, {1, 0.25, 0.25, 1}, {"a", "b"});
  CHECK(connectome_csv(cm) == ",a,b\na,1,0.25\nb,0.25,1\n");
}

TEST_CASE("dataset directories") {
  const auto dir = scratch_dir("dataset");
  const Dataset ds = gen_dataset(2, 3, 7, 11);
  save_dataset(dir / "ds", ds, nlohmann::json{{"seed", 11}});
  CHECK(fs::exists(dir / "ds" / kManifestName));
  const Dataset back = load_dataset(dir / "ds");
  CHECK(back.positive_label == ds.positive_label);
  CHECK(back.negative_label == ds.negative_label);
  CHECK(back.seed == 11);
  REQUIRE(back.subjects.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(back.subjects[k].id == ds.subjects[k].id);
    CHECK(back.subjects[k].label == ds.subjects[k].label);
    CHECK(back.subjects[k].stream_seed == ds.subjects[k].stream_seed);
    CHECK(back.subjects[k].data.values().size() == ds.subjects[k].data.values().size());
    CHECK(std::equal(back.subjects[k].data.values().begin(), back.subjects[k].data.values().end(),
                     ds.subjects[k].data.values().begin()));
  }

  const Dataset single = load_dataset(dir / "ds" / "subject_00001.csv");
  REQUIRE(single.subjects.size() == 1);
  CHECK(single.subjects[0].id == "subject_00001");

  CHECK_THROWS_AS(load_dataset(dir / "missing"), IoError);
  fs::create_directories(dir / "nomanifest");
  CHECK_THROWS_AS(load_dataset(dir / "nomanifest"), IoError);
  fs::create_directories(dir / "bad");
  std::ofstream(dir / "bad" / kManifestName) << "{\"subjects\": [";
  CHECK_THROWS_AS(load_dataset(dir / "bad"), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("atomic writes replace the target") {
  const auto dir = scratch_dir("atomic");
  write_file_atomic(dir / "f.txt", "one");
  write_file_atomic(dir / "f.txt", "two");
  CHECK(read_file(dir / "f.txt") == "two");
  CHECK_FALSE(fs::exists(dir / "f.txt.tmp"));
  CHECK_THROWS_AS(write_file_atomic(dir / "no" / "such" / "f.txt", "x"), IoError);
  CHECK_THROWS_AS(read_file(dir / "absent"), IoError);
  fs::remove_all(dir);
}
