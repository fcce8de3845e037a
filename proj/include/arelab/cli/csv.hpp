#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace arelab::cli {

// %.6g, with "nan"/"inf" spelled the same on every platform.
std::string format_number(double v);

// RFC 4180 field quoting.
std::string csv_escape(const std::string& field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  void write(std::ostream& os) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Plain pipe table.
void write_markdown(std::ostream& os, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

}  // namespace arelab::cli
