#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lrnlm::tools {

/// A CSV document: one '#' provenance comment line, a header row, data rows.
struct CsvTable {
  std::string provenance;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

/// %.9g, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double v);

/// Quotes a field containing a comma, quote or newline.
std::string csv_field(const std::string& s);

/// Writes with LF line endings regardless of platform.
void write_csv(const CsvTable& table, std::ostream& out);
void save_csv(const CsvTable& table, const std::filesystem::path& path);

}  // namespace lrnlm::tools
