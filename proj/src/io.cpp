#include "survode/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "survode/error.hpp"

namespace survode {

State CsvSchema::destination(int code, State current) const {
  if (is_recurrent(code)) return current;
  if (states.empty()) return code;
  const auto it = states.find(code);
  if (it == states.end()) throw IoError("status code " + std::to_string(code) + " has no destination state");
  return it->second;
}

bool CsvSchema::is_recurrent(int code) const {
  return std::find(recurrent_codes.begin(), recurrent_codes.end(), code) != recurrent_codes.end();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

int parse_code(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw IoError(where + ": status '" + text + "' is not an integer code");
  return v;
}

}  // namespace

double parse_real(const std::string& text, const std::string& where) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '+') t.erase(0, 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
    throw IoError(where + ": '" + text + "' is not a finite number");
  return v;
}

EventLog read_event_log(std::istream& in, const CsvSchema& schema, const std::string& source) {
  if (!(schema.time_divisor > 0.0) || !std::isfinite(schema.time_divisor))
    throw IoError("time_divisor must be positive");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw IoError(source + ": empty file (header row expected)");
  for (auto& h : header) h = trim(h);
  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError(source + ": missing required column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_id = column(schema.id_column);
  const std::size_t c_group = column(schema.group_column);
  const std::size_t c_time = column(schema.time_column);
  const std::size_t c_status = column(schema.status_column);
  std::vector<std::size_t> c_cov;
  for (const auto& name : schema.covariate_columns) c_cov.push_back(column(name));

  struct Row {
    double time;
    int status;
    std::size_t line;
  };
  struct Subject {
    std::string group;
    std::vector<double> covariates;
    std::vector<Row> rows;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Subject> subjects;
  std::set<std::tuple<std::string, double, int>> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw IoError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                    std::to_string(fields.size()));
    const std::string id = trim(fields[c_id]);
    if (id.empty()) throw IoError(where + ": empty subject id");
    const double time = parse_real(fields[c_time], where) / schema.time_divisor;
    const int status = parse_code(fields[c_status], where);
    if (!seen.emplace(id, time, status).second)
      throw IoError(where + ": duplicate row for subject '" + id + "' at time " + trim(fields[c_time]));
    std::vector<double> cov;
    for (auto c : c_cov) cov.push_back(parse_real(fields[c], where));

    auto [it, fresh] = subjects.try_emplace(id);
    Subject& s = it->second;
    if (fresh) {
      order.push_back(id);
      s.group = trim(fields[c_group]);
      s.covariates = cov;
    } else if (s.group != trim(fields[c_group])) {
      throw IoError(where + ": subject '" + id + "' changes group");
    } else if (s.covariates != cov) {
      throw IoError(where + ": subject '" + id + "' changes covariate values");
    }
    s.rows.push_back({time, status, line_no});
  }

  EventLog log;
  log.reserve(order.size());
  for (const auto& id : order) {
    Subject& s = subjects[id];
    std::stable_sort(s.rows.begin(), s.rows.end(), [](const Row& a, const Row& b) { return a.time < b.time; });
    EventRecord rec;
    rec.subject_id = id;
    rec.group = s.group;
    rec.covariates = s.covariates;
    State current = 0;
    for (const auto& r : s.rows) {
      const std::string where = source + ":" + std::to_string(r.line);
      if (rec.censor_time) throw IoError(where + ": subject '" + id + "' has rows after its censoring");
      if (r.status == schema.censor_code) {
        rec.censor_time = r.time;
        continue;
      }
      State to;
      try {
        to = schema.destination(r.status, current);
      } catch (const IoError& e) {
        throw IoError(where + ": " + e.what());
      }
      if (to == current && !schema.is_recurrent(r.status))
        throw IoError(where + ": subject '" + id + "' is already in state " + std::to_string(to));
      rec.transitions.push_back({r.time, current, to});
      current = to;
    }
    try {
      rec.validate();
    } catch (const DataError& e) {
      throw IoError(source + ":" + std::to_string(s.rows.front().line) + ": " + e.what());
    }
    log.push_back(std::move(rec));
  }
  if (log.empty()) throw IoError(source + ": no data rows");
  return log;
}

EventLog ingest_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_event_log(in, schema, path);
}

int status_code(const CsvSchema& schema, const TransitionEvent& event) {
  if (event.from == event.to) {
    if (schema.recurrent_codes.empty())
      throw IoError("self-transition needs a recurrent status code in the schema");
    return schema.recurrent_codes.front();
  }
  if (schema.states.empty()) return event.to;
  for (const auto& [code, state] : schema.states)
    if (state == event.to && !schema.is_recurrent(code)) return code;
  throw IoError("no status code leads to state " + std::to_string(event.to));
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf, ptr);
}

void write_event_log(std::ostream& out, const EventLog& log, const CsvSchema& schema) {
  if (schema.time_divisor != 1.0) throw IoError("writing requires time_divisor = 1");
  Table t;
  t.header = {schema.id_column, schema.group_column, schema.time_column, schema.status_column};
  for (const auto& c : schema.covariate_columns) t.header.push_back(c);
  for (const auto& rec : log) {
    if (rec.covariates.size() != schema.covariate_columns.size())
      throw IoError("subject '" + rec.subject_id + "' has " + std::to_string(rec.covariates.size()) +
                    " covariates, schema names " + std::to_string(schema.covariate_columns.size()));
    const auto row = [&](double time, int status) {
      std::vector<std::string> r = {rec.subject_id, rec.group, format_real(time), std::to_string(status)};
      for (double z : rec.covariates) r.push_back(format_real(z));
      t.add(std::move(r));
    };
    for (const auto& e : rec.transitions) row(e.time, status_code(schema, e));
    if (rec.censor_time) row(*rec.censor_time, schema.censor_code);
  }
  t.write(out);
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw IoError("table row width does not match header");
  rows.push_back(std::move(row));
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << quote(row[i]);
  out << '\n';
}

}  // namespace

void Table::write(std::ostream& out) const {
  write_row(out, header);
  for (const auto& r : rows) write_row(out, r);
}

void Table::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write(out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace survode
