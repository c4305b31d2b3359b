#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ecodrive {

using Cell = std::variant<double, long long, bool, std::string>;

/// Row-oriented experiment output. Serialized as CSV: '#'-prefixed
/// "key: value" metadata lines, a header row, then one line per row. Reals
/// are written with 12 significant digits.
class SweepTable {
 public:
  explicit SweepTable(std::vector<std::string> columns);

  void set_metadata(const std::string& key, const std::string& value);
  /// Throws std::invalid_argument unless the row has one cell per column.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const noexcept {
    return metadata_;
  }

  void write_csv(std::ostream& out) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

/// Formats a real with 12 significant digits ("nan"/"inf" for non-finite).
std::string format_real(double v);

}  // namespace ecodrive
