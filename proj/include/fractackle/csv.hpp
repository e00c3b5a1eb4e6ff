#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fractackle/types.hpp"

namespace fractackle {

// RFC-4180-ish record scanner over an in-memory buffer. Fields are returned
// as views into the buffer; quoted fields with escaped quotes are unescaped
// into per-reader scratch storage. Quoted fields may span physical lines.
class CsvReader {
 public:
  explicit CsvReader(std::string buffer, std::string name = "<memory>")
      : buffer_(std::move(buffer)), name_(std::move(name)) {
    if (!read_record(header_)) {
      throw DataError(name_ + ": empty file, expected a header row");
    }
    for (std::size_t i = 0; i < header_.size(); ++i) {
      columns_.emplace(std::string(header_[i]), i);
    }
  }

  static CsvReader open(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return CsvReader(ss.str(), path);
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string_view>& header() const { return header_; }

  bool has_column(std::string_view col) const {
    return columns_.count(std::string(col)) > 0;
  }

  std::size_t column(std::string_view col) const {
    auto it = columns_.find(std::string(col));
    if (it == columns_.end()) {
      throw DataError(name_ + ": missing required column '" + std::string(col) + "'");
    }
    return it->second;
  }

  // Reads the next record into row. Returns false at end of input.
  // line() afterwards gives the 1-based physical line the record started on.
  bool next(std::vector<std::string_view>& row) {
    record_line_ = line_;
    return read_record(row);
  }

  std::int64_t line() const { return record_line_; }

 private:
  bool read_record(std::vector<std::string_view>& row) {
    row.clear();
    if (pos_ >= buffer_.size()) return false;
    scratch_.clear();
    scratch_.reserve(8);
    bool any = false;
    while (true) {
      any = true;
      row.push_back(read_field());
      if (pos_ < buffer_.size() && buffer_[pos_] == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    // Consume the record terminator.
    if (pos_ < buffer_.size()) {
      if (buffer_[pos_] == '\r') ++pos_;
      if (pos_ < buffer_.size() && buffer_[pos_] == '\n') {
        ++pos_;
        ++line_;
      }
    }
    return any;
  }

  std::string_view read_field() {
    if (pos_ < buffer_.size() && buffer_[pos_] == '"') {
      ++pos_;
      scratch_.emplace_back();
      std::string& out = scratch_.back();
      while (pos_ < buffer_.size()) {
        char c = buffer_[pos_];
        if (c == '"') {
          if (pos_ + 1 < buffer_.size() && buffer_[pos_ + 1] == '"') {
            out.push_back('"');
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        if (c == '\n') ++line_;
        out.push_back(c);
        ++pos_;
      }
      return out;
    }
    std::size_t start = pos_;
    while (pos_ < buffer_.size()) {
      char c = buffer_[pos_];
      if (c == ',' || c == '\n' || c == '\r') break;
      ++pos_;
    }
    return std::string_view(buffer_).substr(start, pos_ - start);
  }

  std::string buffer_;
  std::string name_;
  std::vector<std::string_view> header_;
  std::unordered_map<std::string, std::size_t> columns_;
  // Unescaped quoted fields live here until the next record is read.
  std::vector<std::string> scratch_;
  std::size_t pos_ = 0;
  std::int64_t line_ = 1;
  std::int64_t record_line_ = 1;
};

// Strict numeric field parsers: the whole field must parse and be finite.

inline bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

inline bool parse_i64(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline bool parse_i32(std::string_view s, std::int32_t& out) {
  std::int64_t v = 0;
  if (!parse_i64(s, v)) return false;
  if (v < INT32_MIN || v > INT32_MAX) return false;
  out = static_cast<std::int32_t>(v);
  return true;
}

inline bool parse_binary(std::string_view s, std::uint8_t& out) {
  if (s == "0") { out = 0; return true; }
  if (s == "1") { out = 1; return true; }
  return false;
}

inline bool parse_bool(std::string_view s, bool& out) {
  if (s == "1" || s == "true" || s == "TRUE" || s == "True") { out = true; return true; }
  if (s == "0" || s == "false" || s == "FALSE" || s == "False") { out = false; return true; }
  return false;
}

}  // namespace fractackle
