#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evbreak/sample.hpp"

namespace evbreak {

/// Unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetOptions {
  char delimiter = ',';
  std::string missing = "NA";               // empty cells count as missing too
  std::optional<std::string> index_column;  // e.g. "year"; kept as row labels
  std::vector<std::string> columns;         // data columns to use; empty means all but the index
};

struct Dataset {
  Sample sample;  // rows in file order after dropping incomplete ones
  std::vector<std::string> column_names;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

/// Parses delimited text with a header line. Rows with a missing value in any
/// used column are dropped; the rest keep their temporal order.
Dataset read_dataset(const std::string& text, const DatasetOptions& options = {});
Dataset load_dataset(const std::string& path, const DatasetOptions& options = {});

}  // namespace evbreak
