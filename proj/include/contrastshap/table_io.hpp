#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "contrastshap/core.hpp"
#include "contrastshap/ranking.hpp"

namespace contrastshap::io {

inline constexpr const char* kMetricTableHeader = "subject_id,fold,region,coalition,metric";
inline constexpr const char* kAnnotatorHeader = "subject_id,annotator,contrast,rank";
inline constexpr const char* kReferenceHeader = "contrast,rank";
inline constexpr const char* kEmptyCoalition = "EMPTY";

// Every real number in an output file goes through this: 17 significant digits.
std::string format_real(double value);

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

// "T1c+T2f" or "EMPTY".
std::vector<std::string> parse_coalition(std::string_view text);
std::string format_coalition(Coalition c, const ContrastSet& contrasts);

// CSV with kMetricTableHeader. `source` names the input in error messages.
std::vector<RawCell> parse_metric_table_csv(std::istream& in, const std::string& source);

// JSON form: {"contrasts": [...]?, "cells": [{"subject_id", "fold", "region",
// "coalition": "T1c+T2f" | [names], "metric"}]}.
std::vector<RawCell> parse_metric_table_json(std::istream& in, const std::string& source,
                                             std::vector<std::string>* declared_contrasts);

// Dispatches on the .json extension; anything else is read as CSV.
MetricTable read_metric_table(const std::filesystem::path& path, const ContrastSet& contrasts,
                              TableOptions options = {});

void write_metric_table_csv(std::ostream& out, const MetricTable& table);

// subject_id -> one raw rank list per annotator (annotators in name order).
using AnnotatorRanks = std::map<std::string, std::vector<std::vector<int>>>;
AnnotatorRanks parse_annotator_csv(std::istream& in, const ContrastSet& contrasts,
                                   const std::string& source);

// Global reference ranking from a "contrast,rank" CSV.
RankVector parse_reference_csv(std::istream& in, const ContrastSet& contrasts,
                               const std::string& source);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace contrastshap::io
