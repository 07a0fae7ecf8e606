#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tdho {

inline constexpr int kCsvSchemaVersion = 1;

/// Comma-separated output with a versioned header comment and 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& kind, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  /// Row with a leading text field (e.g. a class label) followed by numbers.
  void row(const std::vector<double>& values, const std::vector<std::string>& labels);

 private:
  std::ostream& out_;
  std::size_t ncols_;
};

/// Format a double with 17 significant digits ("inf"/"nan" for non-finite values).
[[nodiscard]] std::string format_double(double x);

}  // namespace tdho
