#include "cascade/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cascade/core.hpp"

namespace cascade::csv {

std::string Writer::number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Writer::write_fields(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      os_ << f;
    } else {
      os_ << '"';
      for (char c : f) {
        if (c == '"') os_ << '"';
        os_ << c;
      }
      os_ << '"';
    }
  }
  os_ << "\r\n";
}

void Writer::header(const std::vector<std::string>& names) { write_fields(names); }

void Writer::row(const std::vector<std::optional<double>>& values) {
  std::vector<std::string> f;
  f.reserve(values.size());
  for (const auto& v : values) f.push_back(v ? number(*v) : std::string{});
  write_fields(f);
}

void Writer::row_mixed(const std::vector<std::string>& fields) { write_fields(fields); }

namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open CSV file '" + path + "'");
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto rec = split_record(line);
    if (first) {
      t.header = std::move(rec);
      first = false;
    } else {
      t.rows.push_back(std::move(rec));
    }
  }
  return t;
}

}  // namespace cascade::csv
