#include "contrastshap/table_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "contrastshap/error.hpp"
#include "contrastshap/json_out.hpp"

namespace contrastshap::io {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> parse_coalition(std::string_view text) {
  const std::string t = trim(text);
  if (t == kEmptyCoalition) return {};
  std::vector<std::string> names;
  for (auto& part : split(t, '+')) {
    auto name = trim(part);
    if (name.empty()) throw Error(ErrorCode::kParseError, "empty name in coalition '" + t + "'");
    names.push_back(std::move(name));
  }
  return names;
}

std::string format_coalition(Coalition c, const ContrastSet& contrasts) {
  if (c.mask == 0) return kEmptyCoalition;
  std::string out;
  for (const auto& name : coalition_names(c, contrasts)) {
    if (!out.empty()) out += '+';
    out += name;
  }
  return out;
}

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParseError, source + ":" + std::to_string(line) + ": " + what);
}

int parse_int(const std::string& s, const std::string& source, std::size_t line) {
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) parse_fail(source, line, "expected integer, got '" + s + "'");
  return value;
}

double parse_double(const std::string& s, const std::string& source, std::size_t line) {
  // from_chars for double is not available in every standard library we target.
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    parse_fail(source, line, "expected number, got '" + s + "'");
  }
  if (used != s.size()) parse_fail(source, line, "expected number, got '" + s + "'");
  return value;
}

// Reads a CSV with a fixed header; calls row(fields, line) for each non-blank line.
template <typename RowFn>
void read_csv(std::istream& in, const std::string& source, std::string_view header, RowFn row) {
  std::string line;
  std::size_t number = 0;
  bool seen_header = false;
  const std::size_t columns = split(header, ',').size();
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!seen_header) {
      std::string normalized;
      for (auto& f : split(t, ',')) normalized += (normalized.empty() ? "" : ",") + trim(f);
      if (normalized != header) {
        parse_fail(source, number, "expected header '" + std::string(header) + "'");
      }
      seen_header = true;
      continue;
    }
    auto fields = split(t, ',');
    if (fields.size() != columns) {
      parse_fail(source, number, "expected " + std::to_string(columns) + " fields, got " +
                                     std::to_string(fields.size()));
    }
    for (auto& f : fields) f = trim(f);
    row(fields, number);
  }
  if (!seen_header) parse_fail(source, number, "missing header '" + std::string(header) + "'");
}

}  // namespace

std::vector<RawCell> parse_metric_table_csv(std::istream& in, const std::string& source) {
  std::vector<RawCell> rows;
  read_csv(in, source, kMetricTableHeader, [&](const std::vector<std::string>& f, std::size_t line) {
    RawCell cell;
    cell.subject_id = f[0];
    cell.fold = parse_int(f[1], source, line);
    cell.region = f[2];
    try {
      cell.coalition = parse_coalition(f[3]);
    } catch (const Error& e) {
      parse_fail(source, line, e.what());
    }
    cell.metric = parse_double(f[4], source, line);
    cell.line = line;
    rows.push_back(std::move(cell));
  });
  return rows;
}

std::vector<RawCell> parse_metric_table_json(std::istream& in, const std::string& source,
                                             std::vector<std::string>* declared_contrasts) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, source + ": " + e.what());
  }
  if (const auto errors = schema_violations(doc, schema_v1("metric_table")); !errors.empty()) {
    throw Error(ErrorCode::kSchemaViolation, source + ": " + errors.front());
  }
  std::vector<RawCell> rows;
  try {
    if (declared_contrasts != nullptr && doc.contains("contrasts")) {
      *declared_contrasts = doc.at("contrasts").get<std::vector<std::string>>();
    }
    std::size_t index = 0;
    for (const auto& c : doc.at("cells")) {
      ++index;
      RawCell cell;
      cell.subject_id = c.at("subject_id").get<std::string>();
      cell.fold = c.at("fold").get<int>();
      cell.region = c.at("region").get<std::string>();
      const auto& coalition = c.at("coalition");
      cell.coalition = coalition.is_string() ? parse_coalition(coalition.get<std::string>())
                                             : coalition.get<std::vector<std::string>>();
      cell.metric = c.at("metric").get<double>();
      cell.line = index;
      rows.push_back(std::move(cell));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, source + ": " + e.what());
  }
  return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

MetricTable read_metric_table(const std::filesystem::path& path, const ContrastSet& contrasts,
                              TableOptions options) {
  std::istringstream in(read_text_file(path));
  const std::string source = path.string();
  try {
    if (path.extension() == ".json") {
      std::vector<std::string> declared;
      auto rows = parse_metric_table_json(in, source, &declared);
      if (!declared.empty() && declared != contrasts.names()) {
        throw Error(ErrorCode::kUnknownContrast,
                    "file declares contrasts that differ from the configured set");
      }
      return validate_metric_table(rows, contrasts, options);
    }
    auto rows = parse_metric_table_csv(in, source);
    return validate_metric_table(rows, contrasts, options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    throw Error(e.code(), source + ": " + std::string(e.what()));
  }
}

void write_metric_table_csv(std::ostream& out, const MetricTable& table) {
  out << kMetricTableHeader << '\n';
  for (const auto& [key, game] : table.cells()) {
    for (std::uint32_t mask = 0; mask < game.size(); ++mask) {
      out << key.subject_id << ',' << key.fold << ',' << key.region << ','
          << format_coalition({mask}, table.contrasts()) << ',' << format_real(game[mask]) << '\n';
    }
  }
}

AnnotatorRanks parse_annotator_csv(std::istream& in, const ContrastSet& contrasts,
                                   const std::string& source) {
  // subject -> annotator -> ranks (0 = not yet given)
  std::map<std::string, std::map<std::string, std::vector<int>>> raw;
  read_csv(in, source, kAnnotatorHeader, [&](const std::vector<std::string>& f, std::size_t line) {
    const auto idx = contrasts.index_of(f[2]);
    if (!idx) parse_fail(source, line, "unknown contrast '" + f[2] + "'");
    const int rank = parse_int(f[3], source, line);
    if (rank < 1 || rank > static_cast<int>(contrasts.size())) {
      parse_fail(source, line, "rank " + f[3] + " outside 1.." + std::to_string(contrasts.size()));
    }
    auto& ranks = raw[f[0]][f[1]];
    if (ranks.empty()) ranks.assign(contrasts.size(), 0);
    if (ranks[*idx] != 0) parse_fail(source, line, "duplicate rank for contrast '" + f[2] + "'");
    ranks[*idx] = rank;
  });
  AnnotatorRanks out;
  for (auto& [subject, annotators] : raw) {
    for (auto& [annotator, ranks] : annotators) {
      for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] == 0) {
          throw Error(ErrorCode::kParseError, source + ": annotator " + annotator + " gave no rank for " +
                                                  contrasts.name(i) + " on subject " + subject);
        }
      }
      out[subject].push_back(std::move(ranks));
    }
  }
  return out;
}

RankVector parse_reference_csv(std::istream& in, const ContrastSet& contrasts,
                               const std::string& source) {
  std::vector<int> ranks(contrasts.size(), 0);
  read_csv(in, source, kReferenceHeader, [&](const std::vector<std::string>& f, std::size_t line) {
    const auto idx = contrasts.index_of(f[0]);
    if (!idx) parse_fail(source, line, "unknown contrast '" + f[0] + "'");
    if (ranks[*idx] != 0) parse_fail(source, line, "duplicate contrast '" + f[0] + "'");
    ranks[*idx] = parse_int(f[1], source, line);
  });
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] == 0) {
      throw Error(ErrorCode::kParseError, source + ": no rank for contrast " + contrasts.name(i));
    }
  }
  return RankVector(std::move(ranks));
}

}  // namespace contrastshap::io
