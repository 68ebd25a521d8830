#ifndef CRISP_CSV_HPP
#define CRISP_CSV_HPP

#include <string>
#include <vector>

namespace crisp {

// Minimal CSV support for metric tables: comma separation, no quoting,
// '.' decimal point regardless of locale.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v, int decimals = 6);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace crisp

#endif
