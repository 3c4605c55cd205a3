#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace cutoff::report {

inline constexpr const char* kCsvVersion = "cutoff-lab-csv-v1";

/// Shortest decimal form that reads back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_number(double value);

/// Writes `# cutoff-lab-csv-v1`, a header row, then data rows. Fields holding
/// commas or quotes are quoted.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);
  std::size_t columns() const { return header_.size(); }

 private:
  std::ofstream out_;
  std::vector<std::string> header_;
  void write_fields(const std::vector<std::string>& fields);
};

/// Reads a file written by CsvWriter: returns header + rows, skipping the version line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

}  // namespace cutoff::report
