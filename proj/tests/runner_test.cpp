#include "polariton/runner.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "polariton/error.hpp"
#include "polariton/spectral.hpp"

namespace polariton {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("polariton_runner_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_doc(const fs::path& out) {
  return {{"schema_version", 1},
          {"delta", {0.0, 5.0}},
          {"t", {1.0}},
          {"sizes", {4}},
          {"boundaries", {"pbc", "hwbc"}},
          {"analyses", {"rstat", "gfd", "dos", "eth"}},
          {"bins", 10},
          {"gfd_orders", {1, 2, "inf"}},
          {"output_dir", out.string()},
          {"workers", 1}};
}

TEST(Config, DefaultsAndRoundTrip) {
  const auto c = parse_config(json{{"schema_version", 1}});
  EXPECT_EQ(c.bins, 100u);
  EXPECT_EQ(c.eth_subset, 100u);
  EXPECT_DOUBLE_EQ(c.eth_delta, 0.01);
  EXPECT_EQ(c.excitations(7), 7);
  const auto again = parse_config(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config(json{{"schema_version", 1}, {"detuning", {0.0}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"schema_version", 1}, {"eth", {{"width", 0.1}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"delta", {0.0}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"schema_version", 2}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"schema_version", 1}, {"analyses", {"spectral"}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"schema_version", 1}, {"t", {-1.0}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"schema_version", 1}, {"filling", 0.5}, {"sizes", {3}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"schema_version", 1}, {"window", {{"epsilon", {0.6, 0.4}}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"schema_version", 1}, {"gfd_orders", {"two"}}}), ConfigError);
  try {
    parse_config(json{{"schema_version", 1}, {"sector", {{"momentum", 0}, {"spin", 1}}}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sector.spin"), std::string::npos);
  }
}

TEST(Config, RelativePathsFollowTheConfigFile) {
  const auto dir = scratch("paths");
  {
    std::ofstream out(dir / "run.json");
    out << R"({"schema_version": 1, "output_dir": "out"})";
  }
  const auto c = load_config(dir / "run.json");
  EXPECT_EQ(c.output_dir, dir / "out");
  EXPECT_EQ(resolve_cache_dir(c), dir / "out" / "cache");
}

TEST(Cache, SpectrumRoundTripIsExact) {
  const auto dir = scratch("cache");
  const SpectrumPoint point{build_sector_basis(4, 4, Boundary::Periodic, 1, Parity::None).sector(),
                            {0.5, 1.0, 0.7, Boundary::Periodic}};
  SpectrumCache cache(dir, CachePolicy::ReadWrite);
  SolveCounters counters;
  const auto first = obtain_spectrum(point, true, &cache, counters);
  ASSERT_FALSE(first.has_real_vectors());
  const auto second = obtain_spectrum(point, true, &cache, counters);
  EXPECT_EQ(counters.solver_invocations, 1);
  EXPECT_EQ(counters.cache_hits, 1);
  EXPECT_EQ(first.eigenvalues, second.eigenvalues);
  EXPECT_EQ(first.complex_vectors(), second.complex_vectors());
  // Different parameters miss.
  auto other = point;
  other.params.t = 0.8;
  EXPECT_FALSE(cache.load(other.sector, other.params, false));
  // Corrupted files are a miss, not an error.
  const auto file = cache.file_for(spectrum_cache_key(point.sector, point.params));
  fs::resize_file(file, 40);
  EXPECT_FALSE(cache.load(point.sector, point.params, false));
}

TEST(Cache, ReadOnlyNeverWrites) {
  const auto dir = scratch("readonly") / "c";
  SpectrumCache cache(dir, CachePolicy::ReadOnly);
  SolveCounters counters;
  const SpectrumPoint point{build_sector_basis(3, 3, Boundary::HardWall, std::nullopt, Parity::Even).sector(),
                            {0.0, 1.0, 1.0, Boundary::HardWall}};
  obtain_spectrum(point, false, &cache, counters);
  cache.write_index();
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Runner, PointOrderAndIds) {
  auto c = parse_config(small_doc("/tmp/unused"));
  const auto points = spectrum_points(c);
  ASSERT_EQ(points.size(), 4u);
  EXPECT_EQ(points[0].sector.boundary, Boundary::Periodic);
  EXPECT_EQ(points[1].params.delta, 5.0);
  EXPECT_EQ(points[2].sector.boundary, Boundary::HardWall);
  EXPECT_FALSE(points[2].sector.momentum);
  EXPECT_NE(points[0].id(), points[1].id());
  EXPECT_TRUE(ground_state_points(c).empty());
}

TEST(Runner, SmokeRunThenWarmRerunIsByteIdentical) {
  const auto out = scratch("smoke");
  const auto config = parse_config(small_doc(out));
  const auto cold = run_sweep(config);
  ASSERT_TRUE(cold.all_ok()) << cold.document.dump(2);
  EXPECT_EQ(cold.succeeded, 4u);
  EXPECT_EQ(cold.solver_invocations, 4);
  EXPECT_EQ(cold.cache_hits, 0);

  std::map<std::string, std::string> before;
  for (const auto& p : cold.document.at("points")) {
    for (const auto& f : p.at("files")) {
      const auto rel = f.at("path").get<std::string>();
      before[rel] = slurp(out / rel);
      EXPECT_EQ(f.at("sha256").get<std::string>(), sha256_file(out / rel));
    }
  }
  EXPECT_GT(before.size(), 20u);
  const auto manifest_before = slurp(cold.path);

  const auto warm = run_sweep(config);
  ASSERT_TRUE(warm.all_ok());
  EXPECT_EQ(warm.solver_invocations, 0);
  EXPECT_EQ(warm.cache_hits, 4);
  for (const auto& [rel, text] : before) EXPECT_EQ(slurp(out / rel), text) << rel;
  EXPECT_EQ(slurp(warm.path), manifest_before);

  const auto log = json::parse(slurp(out / "run_log.json"));
  EXPECT_EQ(log.at("cache_hits"), 4);
}

TEST(Runner, SummaryMatchesDirectAnalysis) {
  const auto out = scratch("summary");
  auto doc = small_doc(out);
  doc["delta"] = {0.0};
  doc["boundaries"] = {"pbc"};
  const auto m = run_sweep(parse_config(doc));
  ASSERT_TRUE(m.all_ok());
  const auto id = m.document.at("points").at(0).at("id").get<std::string>();
  const auto summary = json::parse(slurp(out / "points" / id / "summary.json"));
  const auto basis = build_sector_basis(4, 4, Boundary::Periodic, 0, Parity::Odd);
  const auto spectrum = full_spectrum(build_hamiltonian({0.0, 1.0, 1.0, Boundary::Periodic}, basis), false);
  const auto r = mean_r(std::span(spectrum.eigenvalues.data(), spectrum.dim()), middle_third(spectrum.dim()));
  EXPECT_EQ(summary.at("dimension"), spectrum.dim());
  EXPECT_NEAR(summary.at("rstat").at("mean_r").get<double>(), r.mean, 1e-12);
  EXPECT_TRUE(summary.at("gfd").contains("inf"));
  EXPECT_TRUE(summary.contains("eth"));
}

TEST(Runner, FailingPointIsIsolated) {
  const auto out = scratch("crash");
  const auto config = parse_config(small_doc(out));
  const auto target = spectrum_points(config).at(1).id();
  RunHooks hooks;
  hooks.before_point = [&](const std::string& id) {
    if (id == target) throw Error("injected failure");
  };
  const auto m = run_sweep(config, hooks);
  EXPECT_FALSE(m.all_ok());
  EXPECT_EQ(m.failed, 1u);
  EXPECT_EQ(m.succeeded, 3u);
  bool seen = false;
  for (const auto& p : m.document.at("points")) {
    if (p.at("id") == target) {
      seen = true;
      EXPECT_EQ(p.at("status"), "failed");
      EXPECT_NE(p.at("error").get<std::string>().find("injected"), std::string::npos);
    } else {
      EXPECT_EQ(p.at("status"), "ok");
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Runner, EnvironmentOverridesCacheDir) {
  const auto out = scratch("env");
  const auto cache = out / "elsewhere";
  ::setenv(kCacheEnvVar, cache.c_str(), 1);
  auto doc = small_doc(out / "run");
  doc["delta"] = {0.0};
  doc["boundaries"] = {"hwbc"};
  doc["analyses"] = {"rstat"};
  const auto m = run_sweep(parse_config(doc));
  ::unsetenv(kCacheEnvVar);
  ASSERT_TRUE(m.all_ok());
  EXPECT_TRUE(fs::exists(cache / "index.json"));
  EXPECT_FALSE(fs::exists(out / "run" / "cache"));
}

TEST(Runner, GroundStatePointWritesSweepsAndCaches) {
  const auto out = scratch("gs");
  json doc = {{"schema_version", 1},
              {"delta", {0.0}},
              {"sizes", {3}},
              {"analyses", {"groundstate"}},
              {"ground_state", {{"t_min", 0.01}, {"t_max", 10.0}, {"points_per_decade", 4}, {"refine_points", 2}}},
              {"output_dir", out.string()}};
  const auto config = parse_config(doc);
  const auto cold = run_sweep(config);
  ASSERT_TRUE(cold.all_ok()) << cold.document.dump(2);
  EXPECT_GT(cold.solver_invocations, 0);
  const auto dir = out / "points" / "gs_L3_N3_delta0";
  const auto report = json::parse(slurp(dir / "critical.json"));
  EXPECT_EQ(report.at("estimates").size(), 3u);
  const auto sweep = slurp(dir / "sweep_pbc.csv");
  const auto warm = run_sweep(config);
  EXPECT_EQ(warm.solver_invocations, 0);
  EXPECT_EQ(warm.cache_hits, 1);
  EXPECT_EQ(slurp(dir / "sweep_pbc.csv"), sweep);

  const auto files = emit_figure_data(cold.path, 6, out / "fig6");
  EXPECT_TRUE(fs::exists(out / "fig6" / "fig6_critical.csv"));
  EXPECT_TRUE(fs::exists(out / "fig6" / "schema.json"));
  EXPECT_THROW(emit_figure_data(cold.path, 1, out / "fig1"), Error);
}

TEST(Emit, FigureTables) {
  const auto out = scratch("emit");
  const auto m = run_sweep(parse_config(small_doc(out)));
  ASSERT_TRUE(m.all_ok());
  for (int fig : {1, 2, 3, 4}) {
    const auto files = emit_figure_data(m.path, fig, out / "figs");
    EXPECT_GE(files.size(), 2u);
  }
  const auto fig2 = slurp(out / "figs" / "fig2.csv");
  EXPECT_EQ(std::count(fig2.begin(), fig2.end(), '\n'), 5);
  const auto fig1 = slurp(out / "figs" / "fig1.csv");
  EXPECT_EQ(std::count(fig1.begin(), fig1.end(), '\n'), 1 + 4 * 10);
  const auto schema = json::parse(slurp(out / "figs" / "schema.json"));
  EXPECT_TRUE(schema.contains("fig4_offdiagonal.csv"));

  EXPECT_THROW(emit_figure_data(m.path, 5, out / "x"), Error);
  EXPECT_THROW(emit_figure_data(m.path, 6, out / "x"), Error);
  EXPECT_THROW(emit_figure_data(out / "missing.json", 1, out / "x"), Error);
  auto doc = small_doc(out / "rs");
  doc["analyses"] = {"rstat"};
  const auto partial = run_sweep(parse_config(doc));
  EXPECT_THROW(emit_figure_data(partial.path, 3, out / "x"), Error);
  {
    std::ofstream empty(out / "empty.json");
    empty << R"({"points": []})";
  }
  EXPECT_THROW(emit_figure_data(out / "empty.json", 1, out / "x"), Error);
}

}  // namespace
}  // namespace polariton
