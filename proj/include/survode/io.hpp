#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "survode/events.hpp"

namespace survode {

/// How a long-format event file maps onto EventRecords. One row per
/// transition or censoring: `status` is 0 for censoring, otherwise an event
/// code whose destination state is looked up in `states` (identity when the
/// map is empty). Codes in `recurrent_codes` are self-transitions.
struct CsvSchema {
  std::string id_column = "id";
  std::string group_column = "group";
  std::string time_column = "time";
  std::string status_column = "status";
  std::vector<std::string> covariate_columns;
  std::map<int, State> states;
  std::vector<int> recurrent_codes;
  int censor_code = 0;
  /// Times are divided by this on input (e.g. 365.25 turns days into years).
  double time_divisor = 1.0;

  State destination(int code, State current) const;
  bool is_recurrent(int code) const;
};

/// Splits one comma-separated line; double quotes protect commas.
std::vector<std::string> split_csv_line(const std::string& line);

/// Parses a finite real with '.' as the decimal separator; throws IoError.
double parse_real(const std::string& text, const std::string& where);

EventLog read_event_log(std::istream& in, const CsvSchema& schema, const std::string& source = "<input>");
EventLog ingest_csv(const std::string& path, const CsvSchema& schema);

/// Writes records in long format (one row per transition, status 0 rows for
/// censoring). Numbers are written so they read back exactly.
void write_event_log(std::ostream& out, const EventLog& log, const CsvSchema& schema);

/// Status code that reads back as the given transition under `schema`.
int status_code(const CsvSchema& schema, const TransitionEvent& event);

/// Row-oriented table written as CSV with a header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  void write(std::ostream& out) const;
  void write(const std::string& path) const;
};

/// Shortest text that reads back as the same double.
std::string format_real(double v);

}  // namespace survode
