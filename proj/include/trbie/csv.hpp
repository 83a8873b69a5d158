#pragma once
/// CSV emission with round-trip (%.17g) number formatting, so identical
/// doubles always produce identical bytes.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "trbie/errors.hpp"

namespace trbie {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::initializer_list<const char*> header) : os_(path, std::ios::binary) {
    if (!os_) throw Error("cannot open '" + path + "' for writing");
    bool first = true;
    for (const char* h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }

  /// Each field is already formatted; use cell() for numbers.
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os_ << ',';
      os_ << fields[i];
    }
    os_ << '\n';
    if (!os_) throw Error("CSV write failed");
  }

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(const std::string& v) { return v; }

 private:
  std::ofstream os_;
};

}  // namespace trbie
