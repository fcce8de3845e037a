#include "arelab/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace arelab::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvTable::add_row(std::vector<std::string> row) {
  row.resize(header_.size());
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  const auto line = [&os](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os << ',';
      os << csv_escape(fields[i]);
    }
    os << "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void write_markdown(std::ostream& os, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  os << '|';
  for (const auto& h : header) os << ' ' << h << " |";
  os << "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& r : rows) {
    os << '|';
    for (std::size_t i = 0; i < header.size(); ++i) os << ' ' << (i < r.size() ? r[i] : "") << " |";
    os << '\n';
  }
}

}  // namespace arelab::cli
