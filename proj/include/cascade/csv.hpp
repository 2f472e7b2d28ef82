#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cascade::csv {

/// RFC-4180 writer: CRLF line ends, fields quoted when needed, numbers in
/// full precision (17 significant digits). Missing values are empty fields.
class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::optional<double>>& values);
  void row_mixed(const std::vector<std::string>& fields);

  static std::string number(double v);

 private:
  void write_fields(const std::vector<std::string>& fields);
  std::ostream& os_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read(const std::string& path);

}  // namespace cascade::csv
