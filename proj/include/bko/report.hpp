#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace bko {

using Cell = std::variant<std::string, double, long, bool>;

// Rectangular table with named columns; rows keep insertion order.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

  // Throws ConfigError when the row width does not match.
  void add_row(std::vector<Cell> row);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// %.17g for doubles, so values round-trip.
std::string format_cell(const Cell& c);
// RFC 4180: quote fields containing comma, quote, CR or LF; double embedded quotes.
std::string csv_escape(const std::string& field);

void write_csv(const Table& t, std::ostream& os);
nlohmann::json table_rows_json(const Table& t);

struct Report {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  Table rows;
  // Replaces the table in JSON output when set (rows that are not flat).
  std::optional<nlohmann::json> json_rows;
  long violations = 0;

  nlohmann::json to_json() const;
};

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);
void write_report(const Report& r, OutputFormat format, std::ostream& os);

}  // namespace bko
