#pragma once

// Deterministic CSV emission: fixed header, 17-significant-digit floats.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace facetflow {

inline std::string format_float(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void row(std::initializer_list<double> xs) {
    bool first = true;
    for (double x : xs) {
      if (!first) out_ << ',';
      out_ << format_float(x);
      first = false;
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_float(xs[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace facetflow
