#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace fracheat::cli {

/// CSV table; the writer prepends a config_hash column to every row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

/// Round-trip formatting: %.17g, so equal doubles print identically.
std::string cell(double v);
std::string cell(long long v);
inline std::string cell(int v) { return cell(static_cast<long long>(v)); }
inline std::string cell(std::size_t v) { return cell(static_cast<long long>(v)); }
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }
inline std::string cell(bool v) { return v ? "true" : "false"; }

struct Artifacts {
  Table table;
  nlohmann::json report;
};

struct WrittenFiles {
  std::string csv;
  std::string json;
};

/// Writes <dir>/<command>-<hash>.csv and .json, creating dir if needed.
WrittenFiles write_artifacts(const std::string& dir, const std::string& command, const std::string& hash,
                             const Artifacts& artifacts);

std::string render_csv(const Table& table, const std::string& hash);

}  // namespace fracheat::cli
