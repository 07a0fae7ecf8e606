#include "tdho/csv.hpp"

#include <cmath>
#include <cstdio>

#include "tdho/errors.hpp"

namespace tdho {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& kind, const std::vector<std::string>& columns)
    : out_(out), ncols_(columns.size()) {
  out_ << "# tdho " << kind << " schema v" << kCsvSchemaVersion << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_) throw ParameterError("csv: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values, const std::vector<std::string>& labels) {
  if (values.size() + labels.size() != ncols_) throw ParameterError("csv: column count mismatch");
  bool first = true;
  for (double v : values) {
    out_ << (first ? "" : ",") << format_double(v);
    first = false;
  }
  for (const auto& s : labels) {
    out_ << (first ? "" : ",") << s;
    first = false;
  }
  out_ << "\n";
}

}  // namespace tdho
