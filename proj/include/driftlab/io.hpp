#pragma once

// Plain-file stream sources: CSV (class in the last column) and a dense ARFF
// subset. Both yield Instances in file order.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "driftlab/core.hpp"

namespace driftlab {

/// A schema together with the instances read under it.
struct LoadedStream {
  StreamSchema schema;
  std::vector<Instance> instances;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

/// Splits on `sep`, honoring single/double quotes; fields are trimmed and unquoted.
inline std::vector<std::string> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char ch : line) {
    if (quote) {
      if (ch == quote) quote = 0;
      cur.push_back(ch);
    } else if (ch == '\'' || ch == '"') {
      quote = ch;
      cur.push_back(ch);
    } else if (ch == sep) {
      out.push_back(unquote(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(unquote(cur));
  return out;
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline bool is_missing_token(std::string_view s) {
  s = trim(s);
  return s.empty() || s == "?";
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<std::uint32_t> category_index(const Attribute& a, std::string_view v) {
  for (std::size_t i = 0; i < a.categories.size(); ++i) {
    if (a.categories[i] == v) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

/// Converts one row of string fields under `schema`; the last field is the class.
inline Instance row_to_instance(const StreamSchema& schema, const std::vector<std::string>& fields,
                                std::size_t line_no, bool nominal_unknown_is_missing) {
  if (fields.size() != schema.attribute_count() + 1) {
    throw SchemaMismatch("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(schema.attribute_count() + 1) + " fields, got " +
                         std::to_string(fields.size()));
  }
  Instance x;
  x.features.reserve(schema.attribute_count());
  for (std::size_t i = 0; i < schema.attribute_count(); ++i) {
    const auto& a = schema.attribute(i);
    const std::string& f = fields[i];
    if (is_missing_token(f)) {
      x.features.push_back(FeatureValue::missing());
    } else if (a.is_numeric()) {
      auto v = parse_number(f);
      x.features.push_back(v ? FeatureValue::numeric(*v) : FeatureValue::missing());
    } else if (auto c = category_index(a, f)) {
      x.features.push_back(FeatureValue::nominal(*c));
    } else if (nominal_unknown_is_missing) {
      x.features.push_back(FeatureValue::missing());
    } else {
      throw UnknownNominalValue("line " + std::to_string(line_no) + ": value '" + f +
                                "' not declared for attribute '" + a.name + "'");
    }
  }
  const std::string& cls = fields.back();
  if (!is_missing_token(cls)) {
    auto idx = schema.class_index(cls);
    if (!idx) throw UnknownClass("line " + std::to_string(line_no) + ": unknown class '" + cls + "'");
    x.label = *idx;
  }
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
  /// nullopt: a first row is treated as a header when it names the schema's
  /// attributes (schema given) or when none of its fields is numeric while the
  /// second row has a numeric field (schema inferred).
  std::optional<bool> header;
};

/// Single-pass CSV reader under a known schema.
class CsvReader {
 public:
  CsvReader(const std::string& path, StreamSchema schema, CsvOptions options = {})
      : in_(path), schema_(std::move(schema)), options_(options) {
    if (!in_) throw IoError("cannot open '" + path + "'");
  }

  const StreamSchema& schema() const { return schema_; }

  std::optional<Instance> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      detail::strip_cr(line);
      if (detail::trim(line).empty()) continue;
      auto fields = detail::split_fields(line);
      if (!checked_header_) {
        checked_header_ = true;
        if (is_header(fields)) continue;
      }
      return detail::row_to_instance(schema_, fields, line_no_, false);
    }
    return std::nullopt;
  }

 private:
  bool is_header(const std::vector<std::string>& fields) const {
    if (options_.header) return *options_.header;
    if (fields.size() != schema_.attribute_count() + 1) return false;
    for (std::size_t i = 0; i < schema_.attribute_count(); ++i) {
      if (fields[i] != schema_.attribute(i).name) return false;
    }
    return true;
  }

  std::ifstream in_;
  StreamSchema schema_;
  CsvOptions options_;
  std::size_t line_no_ = 0;
  bool checked_header_ = false;
};

inline std::vector<Instance> read_csv(const std::string& path, const StreamSchema& schema,
                                      CsvOptions options = {}) {
  CsvReader reader(path, schema, options);
  std::vector<Instance> out;
  while (auto x = reader.next()) out.push_back(std::move(*x));
  return out;
}

/// Reads a CSV and infers its schema: a column is numeric when every present
/// value parses as a number, nominal otherwise (categories in first-seen
/// order). Class names are sorted, numerically when they all parse as numbers.
inline LoadedStream read_csv(const std::string& path, CsvOptions options = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_nos;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_fields(line));
    line_nos.push_back(line_no);
  }
  if (rows.empty()) throw EmptyStream("'" + path + "' contains no rows");

  auto numeric_count = [](const std::vector<std::string>& r) {
    return std::count_if(r.begin(), r.end(), [](const std::string& f) {
      return detail::parse_number(f).has_value();
    });
  };
  bool header = options.header.value_or(rows.size() > 1 && numeric_count(rows[0]) == 0 &&
                                        numeric_count(rows[1]) > 0);
  const std::size_t width = rows[0].size();
  if (width < 2) throw SchemaMismatch("CSV needs at least one attribute and a class column");

  std::vector<std::string> names(width);
  for (std::size_t i = 0; i < width; ++i) names[i] = header ? rows[0][i] : "a" + std::to_string(i);
  if (!header) names.back() = "class";
  const std::size_t first = header ? 1 : 0;

  std::vector<bool> numeric(width - 1, true);
  std::vector<std::vector<std::string>> cats(width - 1);
  std::vector<std::string> classes;
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != width) {
      throw SchemaMismatch("line " + std::to_string(line_nos[r]) + ": expected " +
                           std::to_string(width) + " fields, got " + std::to_string(row.size()));
    }
    for (std::size_t i = 0; i + 1 < width; ++i) {
      if (detail::is_missing_token(row[i])) continue;
      if (!detail::parse_number(row[i])) numeric[i] = false;
      if (std::find(cats[i].begin(), cats[i].end(), row[i]) == cats[i].end()) cats[i].push_back(row[i]);
    }
    if (!detail::is_missing_token(row.back()) &&
        std::find(classes.begin(), classes.end(), row.back()) == classes.end()) {
      classes.push_back(row.back());
    }
  }
  const bool numeric_classes = std::all_of(classes.begin(), classes.end(), [](const std::string& c) {
    return detail::parse_number(c).has_value();
  });
  if (numeric_classes) {
    std::sort(classes.begin(), classes.end(), [](const std::string& a, const std::string& b) {
      return *detail::parse_number(a) < *detail::parse_number(b);
    });
  } else {
    std::sort(classes.begin(), classes.end());
  }

  std::vector<Attribute> attrs;
  for (std::size_t i = 0; i + 1 < width; ++i) {
    attrs.push_back(numeric[i] ? Attribute::numeric(names[i]) : Attribute::nominal(names[i], cats[i]));
  }
  LoadedStream out{StreamSchema(std::move(attrs), std::move(classes), names.back()), {}};
  out.instances.reserve(rows.size() - first);
  for (std::size_t r = first; r < rows.size(); ++r) {
    out.instances.push_back(detail::row_to_instance(out.schema, rows[r], line_nos[r], false));
  }
  return out;
}

/// Formats a real with 12 significant digits (shortest %g form).
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Writes a header row followed by one row per instance.
inline void write_csv(std::ostream& out, const StreamSchema& schema, std::span<const Instance> instances) {
  for (const auto& a : schema.attributes()) out << a.name << ',';
  out << schema.class_attribute() << '\n';
  for (const auto& x : instances) {
    for (std::size_t i = 0; i < x.features.size(); ++i) {
      const auto& f = x.features[i];
      if (f.is_missing()) {
        out << '?';
      } else if (f.is_numeric()) {
        out << format_real(f.value());
      } else {
        out << schema.attribute(i).categories.at(f.category());
      }
      out << ',';
    }
    out << (x.label ? schema.class_names().at(*x.label) : std::string("?")) << '\n';
  }
}

inline void write_csv(const std::string& path, const StreamSchema& schema, std::span<const Instance> instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_csv(out, schema, instances);
  if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// ARFF

namespace detail {

inline Attribute parse_arff_attribute(std::string_view rest, std::size_t line_no) {
  rest = trim(rest);
  std::string name;
  if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
    const char q = rest.front();
    const auto close = rest.find(q, 1);
    if (close == std::string_view::npos) {
      throw MalformedHeader("line " + std::to_string(line_no) + ": unterminated attribute name");
    }
    name = std::string(rest.substr(1, close - 1));
    rest = trim(rest.substr(close + 1));
  } else {
    const auto end = rest.find_first_of(" \t");
    if (end == std::string_view::npos) {
      throw MalformedHeader("line " + std::to_string(line_no) + ": attribute without type");
    }
    name = std::string(rest.substr(0, end));
    rest = trim(rest.substr(end));
  }
  if (rest.empty()) throw MalformedHeader("line " + std::to_string(line_no) + ": attribute without type");
  if (rest.front() == '{') {
    const auto close = rest.rfind('}');
    if (close == std::string_view::npos) {
      throw MalformedHeader("line " + std::to_string(line_no) + ": unterminated nominal list");
    }
    auto values = split_fields(rest.substr(1, close - 1));
    if (values.size() == 1 && values[0].empty()) values.clear();
    if (values.empty()) throw MalformedHeader("line " + std::to_string(line_no) + ": empty nominal list");
    return Attribute::nominal(std::move(name), std::move(values));
  }
  const std::string type = lower(rest);
  if (type == "numeric" || type == "real" || type == "integer") return Attribute::numeric(std::move(name));
  throw MalformedHeader("line " + std::to_string(line_no) + ": unsupported attribute type '" +
                        std::string(rest) + "'");
}

}  // namespace detail

/// Reads a dense ARFF file; the last declared attribute is the class.
inline LoadedStream read_arff(std::istream& in) {
  std::vector<Attribute> attrs;
  bool saw_relation = false;
  bool in_data = false;
  std::optional<StreamSchema> schema;
  std::vector<Instance> instances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '%') continue;
    if (!in_data) {
      if (t.front() != '@') throw MalformedHeader("line " + std::to_string(line_no) + ": expected a declaration");
      const auto sp = t.find_first_of(" \t");
      const std::string keyword = detail::lower(t.substr(0, sp));
      const auto rest = sp == std::string_view::npos ? std::string_view{} : t.substr(sp);
      if (keyword == "@relation") {
        saw_relation = true;
      } else if (keyword == "@attribute") {
        attrs.push_back(detail::parse_arff_attribute(rest, line_no));
      } else if (keyword == "@data") {
        if (!saw_relation) throw MalformedHeader("missing @relation before @data");
        if (attrs.size() < 2) throw MalformedHeader("need at least one attribute plus a class attribute");
        Attribute cls = attrs.back();
        attrs.pop_back();
        if (!cls.is_nominal()) throw MalformedHeader("class attribute '" + cls.name + "' must be nominal");
        try {
          schema.emplace(std::move(attrs), cls.categories, cls.name);
        } catch (const SchemaMismatch& e) {
          throw MalformedHeader(e.what());
        }
        in_data = true;
      } else {
        throw MalformedHeader("line " + std::to_string(line_no) + ": unknown declaration '" + keyword + "'");
      }
      continue;
    }
    if (t.front() == '{') throw SparseNotSupported("line " + std::to_string(line_no) + ": sparse rows are not supported");
    auto fields = detail::split_fields(t);
    try {
      instances.push_back(detail::row_to_instance(*schema, fields, line_no, false));
    } catch (const UnknownClass& e) {
      throw UnknownNominalValue(e.what());
    }
  }
  if (!in_data) throw MalformedHeader("missing @data section");
  return {std::move(*schema), std::move(instances)};
}

inline LoadedStream read_arff(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_arff(in);
}

}  // namespace driftlab
