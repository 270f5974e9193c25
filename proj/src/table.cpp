#include "cmm/table.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "cmm/error.hpp"
#include "json.hpp"

namespace cmm {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xF];
  return out;
}

Format format_from_string(const std::string& text) {
  if (text == "csv") return Format::Csv;
  if (text == "jsonl") return Format::Jsonl;
  throw ConfigError("format must be 'csv' or 'jsonl', got '" + text + "'");
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string cell_text(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(const std::string& s) const { return csv_escape(s); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  } visitor;
  return std::visit(visitor, c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  struct {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return format_number(v);
      const std::string text = format_number(v);
      double rounded = v;
      std::from_chars(text.data(), text.data() + text.size(), rounded);
      return rounded;
    }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
  } visitor;
  return std::visit(visitor, c);
}

}  // namespace

void write_csv(std::ostream& os, const Metadata& meta, const Table& table) {
  for (const auto& [key, value] : meta.entries) {
    std::size_t start = 0;
    do {
      const std::size_t end = value.find('\n', start);
      os << "# " << key << ": " << value.substr(start, end - start) << '\n';
      start = end == std::string::npos ? end : end + 1;
    } while (start != std::string::npos && start < value.size());
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(table.columns[i]);
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << cell_text(row[i]);
    }
    os << '\n';
  }
}

void write_jsonl(std::ostream& os, const Metadata& meta, const Table& table) {
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& [key, value] : meta.entries) m[key] = value;
  os << nlohmann::ordered_json{{"metadata", m}}.dump() << '\n';
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      obj[table.columns[i]] = cell_json(row[i]);
    }
    os << obj.dump() << '\n';
  }
}

void write_table(std::ostream& os, Format format, const Metadata& meta, const Table& table) {
  if (format == Format::Csv) {
    write_csv(os, meta, table);
  } else {
    write_jsonl(os, meta, table);
  }
}

}  // namespace cmm
