#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace contagion {

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  // Index of a header column; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
  // Numeric column; empty cells become NaN.
  std::vector<double> numbers(std::size_t col) const;
};

// Shortest round-trippable-enough text for tables: %.10g; NaN/inf as "nan"/"inf".
std::string fmt(double v);
std::string fmt(std::size_t v);
// Empty cell for nullopt.
std::string fmt(std::optional<double> v);

std::string to_csv(const Table& t);
// RFC-4180 subset: comma separated, double-quoted fields may contain commas,
// quotes ("") and newlines. Every row must match the header width.
Table parse_csv(std::string_view text);

}  // namespace contagion
