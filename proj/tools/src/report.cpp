#include "cfe_app/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "cfe/errors.hpp"

namespace cfe::app {

namespace {

std::string csv_field(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return std::get<std::string>(c);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  out << content;
}

Table checks_table(const Report& r) {
  Table t{"checks", {"check", "value", "tolerance", "passed", "gating", "note"}, {}};
  for (const auto& c : r.checks) {
    t.rows.push_back({c.name, c.value, c.tolerance, std::int64_t{c.passed ? 1 : 0}, std::int64_t{c.gating ? 1 : 0},
                      c.note});
  }
  return t;
}

}  // namespace

bool Report::all_passed() const {
  for (const auto& c : checks) {
    if (c.gating && !c.passed) return false;
  }
  return true;
}

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir,
                                                OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;

  if (format == OutputFormat::csv) {
    std::vector<Table> tables = report.tables;
    tables.push_back(checks_table(report));
    for (const auto& t : tables) {
      std::string body;
      for (std::size_t i = 0; i < t.columns.size(); ++i) body += (i ? "," : "") + t.columns[i];
      body += '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) body += (i ? "," : "") + csv_field(row[i]);
        body += '\n';
      }
      written.push_back(dir / (t.name + ".csv"));
      write_file(written.back(), body);
    }
  } else {
    nlohmann::ordered_json doc;
    doc["command"] = report.command;
    doc["passed"] = report.all_passed();
    auto& tables = doc["tables"] = nlohmann::ordered_json::object();
    for (const auto& t : report.tables) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& row : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(obj));
      }
      tables[t.name] = std::move(rows);
    }
    auto& checks = doc["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
      checks.push_back({{"check", c.name},
                        {"value", c.value},
                        {"tolerance", c.tolerance},
                        {"passed", c.passed},
                        {"gating", c.gating},
                        {"note", c.note}});
    }
    doc["warnings"] = report.warnings;
    written.push_back(dir / "results.json");
    write_file(written.back(), doc.dump(2) + "\n");
  }
  for (const auto& a : report.attachments) {
    written.push_back(dir / a.filename);
    write_file(written.back(), a.content);
  }
  return written;
}

void write_metadata(const std::filesystem::path& dir, const std::string& command, const RunConfig& config,
                    const std::vector<std::string>& argv, int exit_code) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");

  nlohmann::ordered_json meta;
  meta["command"] = command;
  meta["argv"] = argv;
  meta["config"] = config.source;
  meta["schema_version"] = config.schema_version;
  meta["threads"] = config.threads;
  meta["format"] = to_string(config.output.format);
  meta["exit_code"] = exit_code;
  meta["created_utc"] = stamp.str();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  write_file(dir / "metadata.json", meta.dump(2) + "\n");
}

}  // namespace cfe::app
