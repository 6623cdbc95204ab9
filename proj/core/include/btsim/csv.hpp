#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace btsim {

// Comma-separated output with '#'-prefixed metadata lines before the header
// row. Numeric formatting is locale independent.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void comment(const std::string& line);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

  static std::string num(double v);
  static std::string num(long long v);
  static std::string num(int v) { return num(static_cast<long long>(v)); }
  static std::string num(std::size_t v) {
    return num(static_cast<long long>(v));
  }

 private:
  std::ofstream out_;
};

}  // namespace btsim
