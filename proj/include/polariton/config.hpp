#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "polariton/basis.hpp"

namespace polariton {

inline constexpr int kConfigSchemaVersion = 1;

enum class Analysis { RStat, Gfd, Dos, Eth, GroundState };
std::string to_string(Analysis a);
Analysis parse_analysis(const std::string& text);

enum class CachePolicy { ReadWrite, ReadOnly, Off };
std::string to_string(CachePolicy p);

struct WindowSpec {
  enum class Kind { MiddleThird, Energy } kind = Kind::MiddleThird;
  double lo = 0.0;  // scaled-energy bounds for Kind::Energy, lo <= eps < hi
  double hi = 1.0;
};

struct GroundStateGrid {
  double t_min = 1e-3;
  double t_max = 1e2;
  int points_per_decade = 10;
  int refine_points = 12;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::vector<double> deltas{0.0};
  std::vector<double> ts{1.0};
  std::vector<int> sizes{6};
  double filling = 1.0;
  std::vector<Boundary> boundaries{Boundary::Periodic};
  std::optional<int> momentum = 0;  // ignored for hard walls
  Parity parity = Parity::Odd;
  std::set<Analysis> analyses{Analysis::RStat};
  std::size_t bins = 100;
  WindowSpec window;
  std::vector<double> gfd_orders{1.0};
  double eth_delta = 0.01;
  std::size_t eth_subset = 100;
  GroundStateGrid ground_state;
  std::filesystem::path output_dir = "polariton-out";
  std::optional<std::filesystem::path> cache_dir;  // default: <output_dir>/cache
  CachePolicy cache = CachePolicy::ReadWrite;
  int workers = 0;  // 0: available hardware threads

  int excitations(int sites) const;
  bool needs_spectra() const;
  bool needs_vectors() const;
  void validate() const;
};

// Parses a config document. Unknown keys, wrong types and out-of-range values
// raise ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
// Fully resolved config with every default filled in.
nlohmann::json to_json(const RunConfig& config);

// Environment variable that overrides the cache directory.
inline constexpr const char* kCacheEnvVar = "POLARITON_ED_CACHE";
std::filesystem::path resolve_cache_dir(const RunConfig& config);

}  // namespace polariton
