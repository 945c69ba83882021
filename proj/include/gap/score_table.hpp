#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gap/geo_stats.hpp"

namespace gap {

// 6 significant digits, "%.6g". Empty string for an absent value.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

// RFC 4180 quoting when the field holds a comma, quote, or newline.
std::string csv_escape(std::string_view field);

// Parses RFC 4180 text into records. Throws FormatError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Builds CSV text from a header and rows; each line ends with '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::vector<std::string> fields);
  std::string str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::string text_;
};

// Score table columns, in file order.
const std::vector<std::string>& score_table_header();

std::string format_score_table(std::span<const ScoreRow> rows);
void write_score_table(const std::filesystem::path& path, std::span<const ScoreRow> rows);

struct ScoreTable {
  std::vector<ScoreRow> rows;
  std::size_t missing_labels = 0;  // rows lacking at least one grouping label
};

// Unknown extra columns are ignored; id is required. Missing or unparseable
// grouping labels become absent and are counted. Throws FormatError for bad
// numbers or a missing id column.
ScoreTable parse_score_table(std::string_view text, std::string_view source_name = "<scores>");
ScoreTable read_score_table(const std::filesystem::path& path);

}  // namespace gap
