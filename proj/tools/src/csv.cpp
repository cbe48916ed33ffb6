#include "lrnlm_tools/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lrnlm/error.hpp"

namespace lrnlm::tools {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_csv(const CsvTable& table, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << csv_field(fields[i]);
    }
    out << '\n';
  };
  out << "# " << table.provenance << '\n';
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write_csv(*this, out);
  return out.str();
}

void save_csv(const CsvTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(table, out);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace lrnlm::tools
