#include "breakdate/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "breakdate/errors.hpp"
#include "breakdate/scan.hpp"

namespace breakdate {

namespace {

bool parse_double(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' ||
                          *(last - 1) == '\r')) {
    --last;
  }
  if (first == last) return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

Panel load_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::vector<double> values;
  std::size_t p = 0;
  std::size_t n = 0;
  std::string line;
  bool first_row = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_double(cells[j], row[j])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first_row) {  // header row
        first_row = false;
        p = cells.size();
        continue;
      }
      throw InvalidInput("non-numeric cell at line " + std::to_string(line_no) +
                         " of '" + path + "'");
    }
    if (p == 0) {
      p = cells.size();
    } else if (cells.size() != p) {
      throw InvalidInput("line " + std::to_string(line_no) + " of '" + path +
                         "' has " + std::to_string(cells.size()) +
                         " columns, expected " + std::to_string(p));
    }
    first_row = false;
    values.insert(values.end(), row.begin(), row.end());
    ++n;
  }
  if (n == 0) throw InvalidInput("'" + path + "' holds no data rows");
  return Panel(n, p, std::move(values));
}

void write_panel_csv(const std::string& path, const Panel& data) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  char buf[40];
  for (std::size_t t = 0; t < data.n(); ++t) {
    for (std::size_t j = 0; j < data.p(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", data(t, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_profile_csv(const std::string& path, const ObjectiveProfile& profile) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "k,value\n";
  char buf[40];
  for (std::size_t k = profile.k_min; k <= profile.k_max; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", profile.value_at(k));
    out << k << ',' << buf << '\n';
  }
}

}  // namespace breakdate
