#include "bko/report.hpp"

#include <cmath>
#include <cstdio>

#include "bko/errors.hpp"

namespace bko {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw ConfigError("row has " + std::to_string(row.size()) + " cells, table has " +
                      std::to_string(columns_.size()) + " columns");
  rows_.push_back(std::move(row));
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CellFormatter {
  std::string operator()(const std::string& s) const { return s; }
  std::string operator()(double v) const { return format_double(v); }
  std::string operator()(long v) const { return std::to_string(v); }
  std::string operator()(bool v) const { return v ? "true" : "false"; }
};

struct CellJson {
  nlohmann::json operator()(const std::string& s) const { return s; }
  nlohmann::json operator()(double v) const {
    // JSON has no inf/nan; keep them as strings
    if (!std::isfinite(v)) return format_double(v);
    return v;
  }
  nlohmann::json operator()(long v) const { return v; }
  nlohmann::json operator()(bool v) const { return v; }
};

}  // namespace

std::string format_cell(const Cell& c) { return std::visit(CellFormatter{}, c); }

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

void write_csv(const Table& t, std::ostream& os) {
  auto line = [&os](const auto& cells, auto&& fmt) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_escape(fmt(cells[i]));
    }
    os << "\r\n";
  };
  line(t.columns(), [](const std::string& s) { return s; });
  for (const auto& row : t.rows()) line(row, [](const Cell& c) { return format_cell(c); });
}

nlohmann::json table_rows_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows()) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[t.columns()[i]] = std::visit(CellJson{}, row[i]);
    rows.push_back(std::move(o));
  }
  return rows;
}

nlohmann::json Report::to_json() const {
  return {{"command", command}, {"config", config}, {"rows", json_rows ? *json_rows : table_rows_json(rows)}, {"violations", violations}};
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + name + "' (csv, json)");
}

void write_report(const Report& r, OutputFormat format, std::ostream& os) {
  if (format == OutputFormat::csv)
    write_csv(r.rows, os);
  else
    os << r.to_json().dump(2) << '\n';
}

}  // namespace bko
