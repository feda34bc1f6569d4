#include "artifacts.hpp"

#include "fracheat/errors.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fracheat::cli {

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(long long v) { return std::to_string(v); }

namespace {

std::string quoted(const std::string& c) {
  if (c.find_first_of(",\"\n") == std::string::npos) return c;
  std::string out = "\"";
  for (char ch : c) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

}  // namespace

std::string render_csv(const Table& table, const std::string& hash) {
  std::string out = "config_hash";
  for (const auto& c : table.columns) out += "," + quoted(c);
  out += "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw NumericalError("internal: CSV row width mismatch");
    out += hash;
    for (const auto& c : row) out += "," + quoted(c);
    out += "\n";
  }
  return out;
}

WrittenFiles write_artifacts(const std::string& dir, const std::string& command, const std::string& hash,
                             const Artifacts& artifacts) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
  const std::string stem = (std::filesystem::path(dir) / (command + "-" + hash)).string();
  WrittenFiles files{stem + ".csv", stem + ".json"};
  std::ofstream csv(files.csv, std::ios::binary);
  csv << render_csv(artifacts.table, hash);
  std::ofstream js(files.json, std::ios::binary);
  js << artifacts.report.dump(2) << "\n";
  if (!csv || !js) throw ValidationError("cannot write artifacts under '" + dir + "'");
  return files;
}

}  // namespace fracheat::cli
