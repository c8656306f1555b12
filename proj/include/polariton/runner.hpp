#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polariton/cache.hpp"
#include "polariton/config.hpp"
#include "polariton/eigensolver.hpp"
#include "polariton/groundstate.hpp"

namespace polariton {

/// One (L, boundary, sector, delta, t) spectrum with its analyses.
struct SpectrumPoint {
  Sector sector;
  ModelParams params;

  std::string id() const;
  nlohmann::json describe() const;
};

/// One (L, delta) ground-state critical-point search over both boundaries.
struct GroundStatePoint {
  int sites = 0;
  int excitations = 0;
  double delta = 0.0;

  std::string id() const;
  nlohmann::json describe() const;
};

// Grid points in deterministic order: sizes, boundaries, deltas, ts.
std::vector<SpectrumPoint> spectrum_points(const RunConfig& config);
std::vector<GroundStatePoint> ground_state_points(const RunConfig& config);

struct SolveCounters {
  int solver_invocations = 0;
  int cache_hits = 0;
};

// Dense sector spectrum, read from or written to `cache` when given.
SpectrumResult obtain_spectrum(const SpectrumPoint& point, bool want_vectors, SpectrumCache* cache,
                               SolveCounters& counters);

// Test hook: called before a point is processed; throwing marks the point failed.
struct RunHooks {
  std::function<void(const std::string& point_id)> before_point;
};

struct ResultManifest {
  std::filesystem::path path;       // manifest.json
  std::filesystem::path output_dir;
  nlohmann::json document;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  int solver_invocations = 0;
  int cache_hits = 0;

  bool all_ok() const { return failed == 0; }
};

// Runs every grid point, isolating failures per point, and writes
// manifest.json plus a run_log.json sidecar with timings and cache hits.
ResultManifest run_sweep(const RunConfig& config, const RunHooks& hooks = {});

// Tidy tables for one figure (1, 2, 3, 4 or 6) built from a manifest; returns
// the written files. A schema.json describing every column is written too.
std::vector<std::filesystem::path> emit_figure_data(const std::filesystem::path& manifest_path, int figure,
                                                    const std::filesystem::path& out_dir);

// Column documentation for all figure tables.
nlohmann::json figure_schema();

// Writers shared with the CLI. Doubles use 17 significant digits.
std::string format_double(double x);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace polariton
