#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "contrastshap/error.hpp"
#include "contrastshap/synth.hpp"
#include "contrastshap/table_io.hpp"

namespace cs = contrastshap;
namespace io = contrastshap::io;

namespace {

std::string csv_for(const std::vector<std::string>& body) {
  std::string s = std::string(io::kMetricTableHeader) + "\n";
  for (const auto& line : body) s += line + "\n";
  return s;
}

std::string two_contrast_cell(const std::string& subject = "S1", int fold = 1) {
  const std::string p = subject + "," + std::to_string(fold) + ",ET,";
  return p + "EMPTY,0.1\n" + p + "A,0.4\n" + p + "B,0.3\n" + p + "A+B,0.6\n";
}

cs::Error parse_error(const std::string& text, const std::string& source = "t.csv") {
  std::istringstream in(text);
  try {
    io::parse_metric_table_csv(in, source);
  } catch (const cs::Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error";
  return cs::Error(cs::ErrorCode::kIo, "none");
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() /
             ("contrastshap_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
              ::testing::UnitTest::GetInstance()->current_test_info()->name());
  std::filesystem::remove_all(dir);
  return dir;
}

const cs::ContrastSet kAB(std::vector<std::string>{"A", "B"});

}  // namespace

TEST(Coalition, ParseAndFormat) {
  EXPECT_TRUE(io::parse_coalition("EMPTY").empty());
  EXPECT_EQ(io::parse_coalition("T1c+T2f"), (std::vector<std::string>{"T1c", "T2f"}));
  EXPECT_EQ(io::parse_coalition(" T1c + T2f "), (std::vector<std::string>{"T1c", "T2f"}));
  EXPECT_THROW(io::parse_coalition("T1c++T2f"), cs::Error);
  const auto brats = cs::ContrastSet::brats();
  EXPECT_EQ(io::format_coalition({0}, brats), "EMPTY");
  EXPECT_EQ(io::format_coalition({0b0101}, brats), "T1c+T2f");
}

TEST(FormatReal, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 0.0, 1e-300, 0.875}) EXPECT_EQ(std::stod(io::format_real(v)), v);
  EXPECT_EQ(io::format_real(0.5), "0.5");
}

TEST(MetricCsv, ParsesRows) {
  std::istringstream in(csv_for({two_contrast_cell()}));
  const auto rows = io::parse_metric_table_csv(in, "t.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3].coalition, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(rows[3].metric, 0.6);
  EXPECT_EQ(rows[3].line, 5u);
  const auto table = cs::validate_metric_table(rows, kAB);
  EXPECT_EQ(table.value({"S1", 1, "ET"}, {3}), 0.6);
}

TEST(MetricCsv, ErrorsNameTheLine) {
  const auto bad_metric = parse_error(csv_for({"S1,1,ET,EMPTY,0.1", "S1,1,ET,A,abc"}));
  EXPECT_EQ(bad_metric.code(), cs::ErrorCode::kParseError);
  EXPECT_NE(std::string(bad_metric.what()).find("t.csv:3"), std::string::npos);

  EXPECT_NE(std::string(parse_error(csv_for({"S1,x,ET,EMPTY,0.1"})).what()).find("t.csv:2"), std::string::npos);
  EXPECT_NE(std::string(parse_error(csv_for({"S1,1,ET,EMPTY"})).what()).find("fields"), std::string::npos);
  EXPECT_EQ(parse_error("subject,fold\n").code(), cs::ErrorCode::kParseError);
  EXPECT_EQ(parse_error("").code(), cs::ErrorCode::kParseError);
}

TEST(MetricCsv, ReadFileReportsValidationErrors) {
  const auto dir = temp_dir();
  std::string text = csv_for({two_contrast_cell()});
  text.erase(text.find("S1,1,ET,B,0.3\n"), std::string("S1,1,ET,B,0.3\n").size());
  io::write_text_file(dir / "m.csv", text);
  try {
    io::read_metric_table(dir / "m.csv", kAB);
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kMissingCoalition);
    EXPECT_NE(std::string(e.what()).find("m.csv"), std::string::npos);
  }
  try {
    io::read_metric_table(dir / "absent.csv", kAB);
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.error_class(), cs::ErrorClass::kIo);
  }
  std::filesystem::remove_all(dir);
}

TEST(MetricCsv, WriteReadRoundTrip) {
  cs::synth::SynthConfig config;
  config.n_subjects = 3;
  config.fold_noise_sigma = 0.02;
  config.seed = 4;
  const auto table = cs::synth::generate(config).table;
  std::ostringstream out;
  io::write_metric_table_csv(out, table);
  const auto dir = temp_dir();
  io::write_text_file(dir / "nested" / "t.csv", out.str());
  const auto back = io::read_metric_table(dir / "nested" / "t.csv", table.contrasts());
  EXPECT_TRUE(back == table);
  std::filesystem::remove_all(dir);
}

TEST(MetricJson, ParsesBothCoalitionForms) {
  std::istringstream in(R"({"contrasts": ["A", "B"], "cells": [
    {"subject_id": "S1", "fold": 1, "region": "ET", "coalition": "EMPTY", "metric": 0.1},
    {"subject_id": "S1", "fold": 1, "region": "ET", "coalition": ["A"], "metric": 0.4},
    {"subject_id": "S1", "fold": 1, "region": "ET", "coalition": "B", "metric": 0.3},
    {"subject_id": "S1", "fold": 1, "region": "ET", "coalition": ["A", "B"], "metric": 0.6}]})");
  std::vector<std::string> declared;
  const auto rows = io::parse_metric_table_json(in, "t.json", &declared);
  EXPECT_EQ(declared, (std::vector<std::string>{"A", "B"}));
  const auto table = cs::validate_metric_table(rows, kAB);
  EXPECT_EQ(table.value({"S1", 1, "ET"}, {1}), 0.4);
}

TEST(MetricJson, SchemaAndSyntaxErrors) {
  auto code_for = [](const std::string& text) {
    std::istringstream in(text);
    try {
      io::parse_metric_table_json(in, "t.json", nullptr);
    } catch (const cs::Error& e) {
      return e.code();
    }
    return cs::ErrorCode::kIo;
  };
  EXPECT_EQ(code_for("{"), cs::ErrorCode::kParseError);
  EXPECT_EQ(code_for(R"({"rows": []})"), cs::ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_for(R"({"cells": [{"subject_id": "S1", "fold": "1", "region": "ET", "coalition": "A", "metric": 0.4}]})"),
            cs::ErrorCode::kSchemaViolation);
}

TEST(MetricJson, DeclaredContrastsMustMatch) {
  const auto dir = temp_dir();
  io::write_text_file(dir / "t.json", R"({"contrasts": ["B", "A"], "cells": []})");
  try {
    io::read_metric_table(dir / "t.json", kAB);
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kUnknownContrast);
  }
  std::filesystem::remove_all(dir);
}

TEST(AnnotatorCsv, GroupsBySubjectAndAnnotator) {
  std::istringstream in(
      "subject_id,annotator,contrast,rank\n"
      "S1,r1,A,1\nS1,r1,B,2\nS1,r2,A,2\nS1,r2,B,1\nS2,r1,B,1\nS2,r1,A,1\n");
  const auto ranks = io::parse_annotator_csv(in, kAB, "ann.csv");
  ASSERT_EQ(ranks.size(), 2u);
  EXPECT_EQ(ranks.at("S1"), (std::vector<std::vector<int>>{{1, 2}, {2, 1}}));
  EXPECT_EQ(ranks.at("S2"), (std::vector<std::vector<int>>{{1, 1}}));
}

TEST(AnnotatorCsv, Errors) {
  auto fails = [](const std::string& body) {
    std::istringstream in("subject_id,annotator,contrast,rank\n" + body);
    EXPECT_THROW(io::parse_annotator_csv(in, kAB, "ann.csv"), cs::Error) << body;
  };
  fails("S1,r1,C,1\n");
  fails("S1,r1,A,3\n");
  fails("S1,r1,A,1\nS1,r1,A,2\n");
  fails("S1,r1,A,1\n");
}

TEST(ReferenceCsv, ParsesAndValidates) {
  std::istringstream in("contrast,rank\nB,1\nA,2\n");
  EXPECT_EQ(io::parse_reference_csv(in, kAB, "ref.csv"), cs::RankVector({2, 1}));
  std::istringstream gap("contrast,rank\nA,1\nB,3\n");
  try {
    io::parse_reference_csv(gap, kAB, "ref.csv");
    FAIL();
  } catch (const cs::Error& e) {
    EXPECT_EQ(e.code(), cs::ErrorCode::kInvalidRankVector);
  }
  std::istringstream missing("contrast,rank\nA,1\n");
  EXPECT_THROW(io::parse_reference_csv(missing, kAB, "ref.csv"), cs::Error);
}
