#include "evbreak/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace evbreak {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    cells.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) return cells;
    start = pos + 1;
  }
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

Dataset read_dataset(const std::string& text, const DatasetOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(line, options.delimiter);
      break;
    }
  }
  if (header.empty()) throw DataError("input has no header line");

  auto find_column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("column '" + name + "' not found in the header");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::optional<std::size_t> index_col;
  if (options.index_column) index_col = find_column(*options.index_column);
  std::vector<std::size_t> used;
  if (options.columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (!index_col || c != *index_col) used.push_back(c);
  } else {
    for (const auto& name : options.columns) used.push_back(find_column(name));
  }
  if (used.size() < 2) throw DataError("need at least two data columns, found " + std::to_string(used.size()));

  Dataset ds;
  for (std::size_t c : used) ds.column_names.push_back(header[c]);
  std::vector<double> values;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, options.delimiter);
    if (cells.size() != header.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    ++ds.rows_read;
    bool missing = false;
    std::vector<double> row;
    for (std::size_t c : used) {
      const std::string& cell = cells[c];
      if (cell.empty() || cell == options.missing) {
        missing = true;
        continue;
      }
      double x = 0.0;
      if (!parse_double(cell, x))
        throw DataError("line " + std::to_string(line_no) + ", column '" + header[c] + "': '" + cell + "' is not a number");
      row.push_back(x);
    }
    if (missing) {
      ++ds.rows_dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    if (index_col) labels.push_back(cells[*index_col]);
  }
  ds.sample = Sample::from_rows(used.size(), values);
  if (index_col) ds.sample.set_labels(std::move(labels));
  return ds;
}

Dataset load_dataset(const std::string& path, const DatasetOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_dataset(buf.str(), options);
}

}  // namespace evbreak
