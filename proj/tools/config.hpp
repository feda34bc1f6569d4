#pragma once

#include "fracheat/discrete_operator.hpp"
#include "fracheat/domain_grid.hpp"
#include "fracheat/stable_kernel.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace fracheat::cli {

using nlohmann::json;

/// Command-line values that replace fields of the config document.
struct Overrides {
  std::optional<double> s;
  std::optional<int> n;
  std::optional<double> h;
  std::optional<int> m;
  std::optional<double> t0;
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

struct RunConfig {
  json document;      ///< effective config, defaults and overrides applied
  std::string hash;   ///< 16 hex digits, FNV-1a 64 of the canonical document

  double h() const;
  int m() const;
  std::uint64_t seed() const;
  int threads() const;
  std::string out() const;
  MassType mass() const;
  AssemblyOptions assembly() const;

  /// params[key], or `fallback` when absent.
  json param(const std::string& key, const json& fallback) const;
};

/// The built-in configuration: fractional Laplacian, n = 1, s = 1/2 on (-1, 1).
json default_config();

/// Reads a JSON file; ValidationError when missing or malformed.
json load_config(const std::string& path);

/// Merges `doc` over the defaults, applies the overrides and hashes the result.
RunConfig make_config(const json& doc, const Overrides& overrides);

/// FNV-1a over the canonical serialization (sorted keys, no whitespace) with
/// "out" and "solver.threads" removed, since neither changes results.
std::string config_hash(const json& document);

SpectralMeasure parse_measure(const json& doc);
Domain parse_domain(const json& doc);

}  // namespace fracheat::cli
