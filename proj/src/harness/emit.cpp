#include <charconv>
#include <chrono>
#include <ctime>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

#include "pwc/harness.hpp"

namespace pwc {

namespace {

using nlohmann::json;

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k > 0) out += ',';
    out += csv_field(fields[k]);
  }
  out += "\r\n";
}

// JSON has no NaN or infinity; they travel as null (and read back as NaN).
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_number(const json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  append_row(out, table.columns);
  std::vector<std::string> fields;
  for (const auto& row : table.rows) {
    fields.clear();
    for (double v : row) fields.push_back(format_double(v));
    append_row(out, fields);
  }
  return out;
}

std::string checks_csv(const ResultRecord& record) {
  std::string out;
  append_row(out, {"name", "status", "measured", "expected", "tolerance", "note"});
  for (const auto& c : record.checks) {
    append_row(out, {c.name, std::string(to_string(c.status)), format_double(c.measured), format_double(c.expected),
                     format_double(c.tolerance), c.note});
  }
  return out;
}

json payload_json(const ResultRecord& record) {
  json checks = json::array();
  for (const auto& c : record.checks) {
    checks.push_back(json{{"name", c.name},
                          {"status", std::string(to_string(c.status))},
                          {"measured", number(c.measured)},
                          {"expected", number(c.expected)},
                          {"tolerance", number(c.tolerance)},
                          {"note", c.note}});
  }
  json tables = json::array();
  for (const auto& t : record.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json r = json::array();
      for (double v : row) r.push_back(number(v));
      rows.push_back(std::move(r));
    }
    tables.push_back(json{{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
  }
  return json{{"experiment_id", record.experiment_id},
              {"kind", std::string(to_string(record.kind))},
              {"inputs_digest", record.inputs_digest},
              {"tool_version", record.tool_version},
              {"passed", record.passed()},
              {"checks", std::move(checks)},
              {"tables", std::move(tables)}};
}

ResultRecord record_from_json(const json& payload) {
  try {
    ResultRecord rec;
    rec.experiment_id = payload.at("experiment_id").get<std::string>();
    rec.kind = parse_kind(payload.at("kind").get<std::string>());
    rec.inputs_digest = payload.at("inputs_digest").get<std::string>();
    rec.tool_version = payload.at("tool_version").get<std::string>();
    for (const auto& c : payload.at("checks")) {
      Check check;
      check.name = c.at("name").get<std::string>();
      const auto status = c.at("status").get<std::string>();
      if (status == "pass") {
        check.status = CheckStatus::pass;
      } else if (status == "fail") {
        check.status = CheckStatus::fail;
      } else if (status == "finding") {
        check.status = CheckStatus::finding;
      } else {
        throw ConfigError("result record: unknown check status '" + status + "'");
      }
      check.measured = from_number(c.at("measured"));
      check.expected = from_number(c.at("expected"));
      check.tolerance = from_number(c.at("tolerance"));
      check.note = c.at("note").get<std::string>();
      rec.checks.push_back(std::move(check));
    }
    for (const auto& t : payload.at("tables")) {
      Table table{t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(), {}};
      for (const auto& row : t.at("rows")) {
        std::vector<double> values;
        for (const auto& v : row) values.push_back(from_number(v));
        table.rows.push_back(std::move(values));
      }
      rec.tables.push_back(std::move(table));
    }
    return rec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("result record: ") + e.what());
  }
}

std::string to_json_text(const ResultRecord& record, std::string_view timestamp) {
  const json doc{{"payload", payload_json(record)}, {"meta", json{{"timestamp", std::string(timestamp)}}}};
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_table(const ResultRecord& record, const std::filesystem::path& dir,
                                              OutputFormat format) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const std::string stem = record.experiment_id;
  if (format != OutputFormat::json) {
    written.push_back(dir / (stem + "_checks.csv"));
    write_file(written.back(), checks_csv(record));
    for (const auto& t : record.tables) {
      written.push_back(dir / (stem + "_" + t.name + ".csv"));
      write_file(written.back(), to_csv(t));
    }
  }
  if (format != OutputFormat::csv) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    written.push_back(dir / (stem + ".json"));
    write_file(written.back(), to_json_text(record, stamp));
  }
  return written;
}

LogLevel log_level_from_env() {
  const char* value = std::getenv("PWCYCLES_LOG");
  if (value == nullptr) return LogLevel::info;
  const std::string_view v(value);
  if (v == "quiet" || v == "0") return LogLevel::quiet;
  if (v == "debug" || v == "2") return LogLevel::debug;
  return LogLevel::info;
}

void log_message(LogLevel level, std::string_view message) {
  if (level == LogLevel::quiet) return;
  static const LogLevel threshold = log_level_from_env();
  if (static_cast<int>(level) > static_cast<int>(threshold)) return;
  std::cerr << "[pwcycles] " << message << '\n';
}

}  // namespace pwc
