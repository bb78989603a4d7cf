#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace diracqed {

/// Minimal CSV writer: mandatory header, '.' decimal, newline-terminated rows,
/// shortest round-trip formatting for doubles.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open '" + path + "'");
        out_ << header << "\n";
    }

    void row(const std::vector<double>& values) {
        char buf[40];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
            if (i) out_ << ',';
            out_ << buf;
        }
        out_ << "\n";
    }

    void row_with_int(int first, const std::vector<double>& rest) {
        out_ << first;
        char buf[40];
        for (double v : rest) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out_ << ',' << buf;
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

} // namespace diracqed
