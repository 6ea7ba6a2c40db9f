#pragma once

// Tabular data model, CSV ingestion, the bundled planning dataset and
// measurement-scale metadata.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "stattree/errors.hpp"

namespace stattree {

enum class MeasurementScale { nominal, ordinal, interval, ratio };

inline std::string_view to_string(MeasurementScale s) {
  switch (s) {
    case MeasurementScale::nominal: return "nominal";
    case MeasurementScale::ordinal: return "ordinal";
    case MeasurementScale::interval: return "interval";
    case MeasurementScale::ratio: return "ratio";
  }
  return "unknown";
}

inline bool is_numeric_scale(MeasurementScale s) {
  return s == MeasurementScale::interval || s == MeasurementScale::ratio;
}

enum class Capability : std::uint8_t {
  counting = 1u << 0,
  ordination = 1u << 1,
  equidistant_ranges = 1u << 2,
  add_sub = 1u << 3,
  division = 1u << 4,
};

// Small bitset over Capability.
class CapabilitySet {
 public:
  constexpr CapabilitySet() = default;
  constexpr CapabilitySet(std::initializer_list<Capability> caps) {
    for (auto c : caps) bits_ |= static_cast<std::uint8_t>(c);
  }

  constexpr bool contains(Capability c) const {
    return (bits_ & static_cast<std::uint8_t>(c)) != 0;
  }
  constexpr bool is_subset_of(CapabilitySet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr std::size_t size() const { return std::popcount(bits_); }
  constexpr bool operator==(const CapabilitySet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

// Which operations are meaningful on values of the given scale.
constexpr CapabilitySet scale_capabilities(MeasurementScale scale) {
  using C = Capability;
  switch (scale) {
    case MeasurementScale::nominal:
      return {C::counting};
    case MeasurementScale::ordinal:
      return {C::counting, C::ordination};
    case MeasurementScale::interval:
      return {C::counting, C::ordination, C::equidistant_ranges};
    case MeasurementScale::ratio:
      return {C::counting, C::ordination, C::equidistant_ranges, C::add_sub,
              C::division};
  }
  return {};
}

struct Column {
  std::string name;
  std::variant<std::vector<double>, std::vector<std::string>> values;
  MeasurementScale scale = MeasurementScale::nominal;

  bool is_numeric() const {
    return std::holds_alternative<std::vector<double>>(values);
  }
  const std::vector<double>& numbers() const {
    return std::get<std::vector<double>>(values);
  }
  const std::vector<std::string>& labels() const {
    return std::get<std::vector<std::string>>(values);
  }
  std::size_t size() const {
    return std::visit([](const auto& v) { return v.size(); }, values);
  }

  bool operator==(const Column&) const = default;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Column> columns, std::size_t row_count)
      : columns_(std::move(columns)), row_count_(row_count) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].size() != row_count_) {
        throw DataError("column '" + columns_[i].name + "' has " +
                        std::to_string(columns_[i].size()) +
                        " values, expected " + std::to_string(row_count_));
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (columns_[j].name == columns_[i].name) {
          throw DataError("duplicate column name '" + columns_[i].name + "'");
        }
      }
    }
  }

  const std::vector<Column>& columns() const { return columns_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }

  const Column* find(std::string_view name) const {
    auto it = std::find_if(columns_.begin(), columns_.end(),
                           [&](const Column& c) { return c.name == name; });
    return it == columns_.end() ? nullptr : &*it;
  }

  const Column& column(std::string_view name) const {
    if (const Column* c = find(name)) return *c;
    throw DataError("unknown column '" + std::string(name) + "'");
  }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
};

struct Sample {
  std::vector<double> values;
  std::string label;

  std::size_t size() const { return values.size(); }
  bool operator==(const Sample&) const = default;
};

// Response values split by the levels of one factor. Groups keep the order
// in which their level first appears in the data.
class GroupedSample {
 public:
  GroupedSample(std::string response_name, std::string factor_name,
                std::vector<Sample> groups)
      : response_name_(std::move(response_name)),
        factor_name_(std::move(factor_name)),
        groups_(std::move(groups)) {
    if (groups_.size() < 2) {
      throw DataError("at least 2 treatments required, got " +
                      std::to_string(groups_.size()));
    }
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      if (groups_[i].values.empty()) {
        throw DataError("group '" + groups_[i].label + "' is empty");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (groups_[j].label == groups_[i].label) {
          throw DataError("duplicate group label '" + groups_[i].label + "'");
        }
      }
    }
  }

  const std::string& response_name() const { return response_name_; }
  const std::string& factor_name() const { return factor_name_; }
  const std::vector<Sample>& groups() const { return groups_; }
  std::size_t k() const { return groups_.size(); }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& g : groups_) n += g.size();
    return n;
  }

  const Sample& group(std::string_view label) const {
    for (const auto& g : groups_) {
      if (g.label == label) return g;
    }
    throw DataError("unknown group '" + std::string(label) + "'");
  }

  bool operator==(const GroupedSample&) const = default;

 private:
  std::string response_name_;
  std::string factor_name_;
  std::vector<Sample> groups_;
};

struct IngestConfig {
  // Scales for named columns. Undeclared columns are inferred: numeric when
  // every cell parses as a number (scale default_numeric_scale), nominal
  // otherwise.
  std::map<std::string, MeasurementScale, std::less<>> scales;
  MeasurementScale default_numeric_scale = MeasurementScale::ratio;
};

namespace detail {

// RFC 4180 record splitter. Unquoted fields are trimmed of spaces and tabs.
inline std::vector<std::vector<std::string>> split_csv_records(
    std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;

  auto trim = [](std::string& s) {
    auto is_ws = [](char c) { return c == ' ' || c == '\t'; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_ws(s[b])) ++b;
    while (e > b && is_ws(s[e - 1])) --e;
    s = s.substr(b, e - b);
  };
  auto end_field = [&] {
    if (!field_was_quoted) trim(field);
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    // Blank lines are skipped, not treated as one-empty-field records.
    if (record_has_content || record.size() > 1 || !record.front().empty()) {
      records.push_back(std::move(record));
    }
    record.clear();
    record_has_content = false;
  };

  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        field.clear();
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field at end of input");
  if (!field.empty() || !record.empty() || record_has_content) end_record();
  return records;
}

inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::string quote_csv_field(const std::string& s) {
  const bool needs_quotes =
      s.find_first_of(",\"\r\n") != std::string::npos ||
      (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                      s.back() == ' ' || s.back() == '\t'));
  if (!needs_quotes) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

// Parses comma-separated text with a mandatory header row. Missing or
// malformed cells are errors; nothing is dropped silently.
inline Dataset parse_csv(std::string_view text, const IngestConfig& config = {}) {
  auto records = detail::split_csv_records(text);
  if (records.empty()) throw DataError("CSV input has no header row");

  const std::vector<std::string> header = std::move(records.front());
  const std::size_t width = header.size();
  for (std::size_t i = 0; i < width; ++i) {
    if (header[i].empty()) {
      throw DataError("empty header name in column " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (header[j] == header[i]) {
        throw DataError("duplicate header name '" + header[i] + "'");
      }
    }
  }
  for (const auto& [name, scale] : config.scales) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw DataError("declared scale for unknown column '" + name + "'");
    }
  }

  const std::size_t rows = records.size() - 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw DataError("ragged row " + std::to_string(r) + ": expected " +
                      std::to_string(width) + " fields, got " +
                      std::to_string(records[r].size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (records[r][c].empty()) {
        throw DataError("missing value at row " + std::to_string(r) +
                        ", column '" + header[c] + "'");
      }
    }
  }

  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c) {
    auto declared = config.scales.find(header[c]);
    std::optional<MeasurementScale> scale;
    if (declared != config.scales.end()) scale = declared->second;

    bool numeric;
    if (scale) {
      numeric = is_numeric_scale(*scale);
    } else {
      numeric = rows > 0;
      for (std::size_t r = 1; r < records.size() && numeric; ++r) {
        numeric = detail::parse_number(records[r][c]).has_value();
      }
      scale = numeric ? config.default_numeric_scale : MeasurementScale::nominal;
    }

    Column col{header[c], {}, *scale};
    if (numeric) {
      std::vector<double> values;
      values.reserve(rows);
      for (std::size_t r = 1; r < records.size(); ++r) {
        auto v = detail::parse_number(records[r][c]);
        if (!v) {
          throw DataError("non-numeric value '" + records[r][c] + "' at row " +
                          std::to_string(r) + ", column '" + header[c] + "'");
        }
        values.push_back(*v);
      }
      col.values = std::move(values);
    } else {
      std::vector<std::string> values;
      values.reserve(rows);
      for (std::size_t r = 1; r < records.size(); ++r) {
        values.push_back(records[r][c]);
      }
      col.values = std::move(values);
    }
    columns.push_back(std::move(col));
  }
  return Dataset(std::move(columns), rows);
}

// Inverse of parse_csv for datasets whose scales are passed back in the
// config; numbers use 17 significant digits so they reparse exactly.
inline std::string render_csv(const Dataset& d) {
  std::ostringstream out;
  const auto& cols = d.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out << ',';
    out << detail::quote_csv_field(cols[c].name);
  }
  out << '\n';
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      if (cols[c].is_numeric()) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, cols[c].numbers()[r]);
        out << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
      } else {
        out << detail::quote_csv_field(cols[c].labels()[r]);
      }
    }
    out << '\n';
  }
  return out.str();
}

// Column scales as an IngestConfig, so render_csv output reparses to the
// same dataset.
inline IngestConfig scales_of(const Dataset& d) {
  IngestConfig cfg;
  for (const auto& c : d.columns()) cfg.scales[c.name] = c.scale;
  return cfg;
}

namespace table2 {
inline constexpr std::string_view kYearMonth = "Year/Month";
inline constexpr std::string_view kHeld = "Held Hours";
inline constexpr std::string_view kExpected = "Expected Hours";
inline constexpr std::string_view kNumberOfCases = "Number of Cases";
inline constexpr std::string_view kCasesSize = "Cases Size";
inline constexpr std::string_view kDifference = "Difference (Expected - Held)";
inline constexpr std::string_view kMoment = "Moment";

inline constexpr std::string_view kCsv =
    "Year/Month,Held Hours,Expected Hours,Number of Cases,Cases Size,"
    "Difference (Expected - Held),Moment\n"
    "2013/12,259.878,100.000,36,M,-159.878,Before\n"
    "2014/01,749.272,580.000,84,L,-169.272,Before\n"
    "2014/02,570.343,480.000,74,L,-90.343,Before\n"
    "2014/03,535.014,480.000,74,L,-55.014,Before\n"
    "2014/04,311.262,90.000,33,S,-221.262,Before\n"
    "2014/05,285.988,80.000,28,S,-205.988,Before\n"
    "2014/06,279.633,80.000,28,S,-199.633,Before\n"
    "2014/07,256.495,480.000,52,M,223.505,Before\n"
    "2014/08,437.427,680.000,52,M,242.573,After\n"
    "2014/09,450.845,395.367,58,M,-55.478,After\n"
    "2014/10,225.472,517.222,75,L,291.750,After\n"
    "2014/11,602.305,791.996,95,L,189.691,After\n"
    "2014/12,450.147,452.305,62,M,2.158,After\n"
    "2015/01,327.089,516.024,70,L,188.935,After\n"
    "2015/02,258.536,503.461,65,L,244.925,After\n"
    "2015/03,310.315,620.772,80,L,310.457,After\n";

inline IngestConfig ingest_config() {
  IngestConfig cfg;
  cfg.scales = {
      {std::string(kYearMonth), MeasurementScale::ordinal},
      {std::string(kHeld), MeasurementScale::ratio},
      {std::string(kExpected), MeasurementScale::ratio},
      {std::string(kNumberOfCases), MeasurementScale::ratio},
      {std::string(kCasesSize), MeasurementScale::ordinal},
      {std::string(kDifference), MeasurementScale::interval},
      {std::string(kMoment), MeasurementScale::nominal},
  };
  return cfg;
}
}  // namespace table2

// Planning data of 16 months: expected vs held hours of change requests,
// before and after an estimation plugin was adopted. Labels in "Cases Size"
// are kept as published.
inline const Dataset& builtin_table2() {
  static const Dataset d = parse_csv(table2::kCsv, table2::ingest_config());
  return d;
}

// Splits a numeric response column by the levels of a categorical factor.
// A numeric factor is rejected unless cast_numeric_factor is set, in which
// case its values are used as level labels.
inline GroupedSample select_response_factor(const Dataset& d,
                                            std::string_view response,
                                            std::string_view factor,
                                            bool cast_numeric_factor = false) {
  const Column& resp = d.column(response);
  const Column& fac = d.column(factor);
  if (!resp.is_numeric()) {
    throw DataError("response column '" + resp.name + "' is not numeric");
  }

  std::vector<std::string> levels;
  if (fac.is_numeric()) {
    if (!cast_numeric_factor) {
      throw DataError("factor column '" + fac.name +
                      "' is numeric; an explicit cast to categorical is required");
    }
    levels.reserve(d.row_count());
    for (double v : fac.numbers()) {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      levels.emplace_back(buf, ptr);
    }
  } else {
    levels = fac.labels();
  }

  std::vector<Sample> groups;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Sample& s) { return s.label == levels[r]; });
    if (it == groups.end()) {
      groups.push_back(Sample{{}, levels[r]});
      it = std::prev(groups.end());
    }
    it->values.push_back(resp.numbers()[r]);
  }
  return GroupedSample(resp.name, fac.name, std::move(groups));
}

}  // namespace stattree
