#include "gap/score_table.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "gap/error.hpp"

namespace gap {

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  std::array<char, 64> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.6g", v);
  return {buf.data(), static_cast<std::size_t>(n)};
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  const auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (!(record.size() == 1 && record[0].empty() && !field_started)) {
      records.push_back(std::move(record));
    }
    record.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw FormatError("csv: unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  add_row(std::move(header));
}

void CsvWriter::add_row(std::vector<std::string> fields) {
  if (fields.size() != width_) throw ContractError("CsvWriter: row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += csv_escape(fields[i]);
  }
  text_ += '\n';
}

void CsvWriter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text_;
  if (!out) throw IoError("write failed for " + path.string());
}

const std::vector<std::string>& score_table_header() {
  static const std::vector<std::string> header = {
      "id",        "name",     "city",       "country", "continent", "north_south", "west_east",
      "pageviews", "category", "patch_clip", "keypoint", "vlm_avg",  "human_avg",   "quality"};
  return header;
}

std::string format_score_table(std::span<const ScoreRow> rows) {
  CsvWriter w(score_table_header());
  for (const ScoreRow& r : rows) {
    w.add_row({r.id, r.name, r.city, r.country,
               r.continent ? std::string(to_string(*r.continent)) : "",
               r.north_south ? std::string(to_string(*r.north_south)) : "",
               r.west_east ? std::string(to_string(*r.west_east)) : "",
               r.pageviews ? std::to_string(*r.pageviews) : "", r.category,
               format_optional(r.patch_clip), format_optional(r.keypoint),
               format_optional(r.vlm_avg), format_optional(r.human_avg),
               format_optional(r.quality)});
  }
  return w.str();
}

void write_score_table(const std::filesystem::path& path, std::span<const ScoreRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_score_table(rows);
}

namespace {

std::optional<double> parse_real(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw FormatError(where + ": not a number '" + s + "'");
  }
  return v;
}

}  // namespace

ScoreTable parse_score_table(std::string_view text, std::string_view source_name) {
  const auto records = parse_csv(text);
  if (records.empty()) throw FormatError(std::string(source_name) + ": empty score table");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < records[0].size(); ++i) col.emplace(records[0][i], i);
  if (!col.contains("id")) throw FormatError(std::string(source_name) + ": missing id column");

  ScoreTable table;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = std::string(source_name) + ":" + std::to_string(r + 1);
    const auto get = [&](const char* name) -> std::string {
      auto it = col.find(name);
      if (it == col.end() || it->second >= rec.size()) return {};
      return rec[it->second];
    };
    ScoreRow row;
    row.id = get("id");
    if (row.id.empty()) throw FormatError(where + ": empty id");
    row.name = get("name");
    row.city = get("city");
    row.country = get("country");
    row.category = get("category");
    row.continent = parse_continent(get("continent"));
    row.north_south = parse_north_south(get("north_south"));
    row.west_east = parse_west_east(get("west_east"));
    if (!row.continent || !row.north_south || !row.west_east) ++table.missing_labels;
    if (auto pv = parse_real(get("pageviews"), where + " pageviews")) {
      if (*pv < 0 || std::floor(*pv) != *pv) throw FormatError(where + ": bad pageviews");
      row.pageviews = static_cast<std::uint64_t>(*pv);
    }
    for (Metric m : kAllMetrics) {
      const std::string name(to_string(m));
      auto v = parse_real(get(name.c_str()), where + " " + name);
      switch (m) {
        case Metric::Quality: row.quality = v; break;
        case Metric::PatchClip: row.patch_clip = v; break;
        case Metric::Keypoint: row.keypoint = v; break;
        case Metric::VlmAvg: row.vlm_avg = v; break;
        case Metric::HumanAvg: row.human_avg = v; break;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ScoreTable read_score_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_score_table(text, path.string());
}

}  // namespace gap
