#include "ecodrive/sweep_table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace ecodrive {

SweepTable::SweepTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void SweepTable::set_metadata(const std::string& key, const std::string& value) {
  auto it = std::find_if(metadata_.begin(), metadata_.end(),
                         [&](const auto& kv) { return kv.first == key; });
  if (it != metadata_.end()) {
    it->second = value;
  } else {
    metadata_.emplace_back(key, value);
  }
}

void SweepTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument(
        fmt::format("row has {} cells but the table declares {} columns", row.size(), columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

void SweepTable::write_csv(std::ostream& out) const {
  for (const auto& [key, value] : metadata_) out << "# " << key << ": " << value << '\n';
  for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_real(v);
            } else if constexpr (std::is_same_v<T, bool>) {
              out << (v ? "true" : "false");
            } else {
              out << v;
            }
          },
          row[c]);
    }
    out << '\n';
  }
}

}  // namespace ecodrive
