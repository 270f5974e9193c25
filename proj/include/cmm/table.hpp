#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cmm {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Shortest-general decimal with 9 significant digits, '.' separator,
/// independent of the global locale. nan / inf / -inf for non-finite values.
std::string format_number(double value);

/// 64-bit FNV-1a, printed as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

struct Metadata {
  std::vector<std::pair<std::string, std::string>> entries;
  void add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
  }
};

using Cell = std::variant<std::monostate, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class Format { Csv, Jsonl };
Format format_from_string(const std::string& text);

/// CSV: metadata as "# key: value" lines (one per line of a multi-line
/// value), then the header, then one record per line. Empty cells are blank.
void write_csv(std::ostream& os, const Metadata& meta, const Table& table);

/// JSON lines: {"metadata": {...}} first, then one object per row; empty
/// cells become null.
void write_jsonl(std::ostream& os, const Metadata& meta, const Table& table);

void write_table(std::ostream& os, Format format, const Metadata& meta, const Table& table);

}  // namespace cmm
