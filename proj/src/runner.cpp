#include "polariton/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "polariton/error.hpp"
#include "polariton/eth.hpp"
#include "polariton/multifractal.hpp"
#include "polariton/spectral.hpp"
#include "polariton/version.hpp"

namespace polariton {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

void write_text_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const fs::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
  }
  fs::rename(temp, path);
}

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string order_tag(double q) {
  if (std::isinf(q)) return "inf";
  return fmt::format("{}", q);
}

json order_json(double q) { return std::isinf(q) ? json("inf") : json(q); }

}  // namespace

// ---------------------------------------------------------------------------
// Grid points

std::string SpectrumPoint::id() const { return fmt::format("{}_delta{}_t{}", sector.label(), params.delta, params.t); }

json SpectrumPoint::describe() const {
  return {{"L", sector.sites},
          {"N", sector.excitations},
          {"boundary", std::string(to_string(sector.boundary))},
          {"momentum", sector.momentum ? json(*sector.momentum) : json(nullptr)},
          {"parity", to_string(sector.parity)},
          {"delta", params.delta},
          {"t", params.t}};
}

std::string GroundStatePoint::id() const { return fmt::format("gs_L{}_N{}_delta{}", sites, excitations, delta); }

json GroundStatePoint::describe() const { return {{"L", sites}, {"N", excitations}, {"delta", delta}}; }

std::vector<SpectrumPoint> spectrum_points(const RunConfig& config) {
  std::vector<SpectrumPoint> out;
  if (!config.needs_spectra()) return out;
  for (int L : config.sizes) {
    for (Boundary bc : config.boundaries) {
      Sector sector;
      sector.sites = L;
      sector.excitations = config.excitations(L);
      sector.boundary = bc;
      sector.momentum = bc == Boundary::Periodic ? config.momentum : std::nullopt;
      sector.parity = config.parity;
      for (double delta : config.deltas) {
        for (double t : config.ts) out.push_back({sector, {delta, 1.0, t, bc}});
      }
    }
  }
  return out;
}

std::vector<GroundStatePoint> ground_state_points(const RunConfig& config) {
  std::vector<GroundStatePoint> out;
  if (!config.analyses.count(Analysis::GroundState)) return out;
  for (int L : config.sizes) {
    for (double delta : config.deltas) out.push_back({L, config.excitations(L), delta});
  }
  return out;
}

SpectrumResult obtain_spectrum(const SpectrumPoint& point, bool want_vectors, SpectrumCache* cache,
                               SolveCounters& counters) {
  if (cache) {
    if (auto hit = cache->load(point.sector, point.params, want_vectors)) {
      ++counters.cache_hits;
      return std::move(*hit);
    }
  }
  const auto product = std::make_shared<const ProductBasis>(
      ProductBasis::enumerate(point.sector.sites, point.sector.excitations));
  const auto basis = SymBasis::build(point.sector, product);
  auto spectrum = full_spectrum(build_hamiltonian(point.params, basis), want_vectors);
  ++counters.solver_invocations;
  if (cache) cache->store(spectrum);
  return spectrum;
}

// ---------------------------------------------------------------------------
// Per-point analyses

namespace {

struct PointResult {
  std::vector<fs::path> files;  // relative to the output directory
  SolveCounters counters;
};

class PointWriter {
 public:
  PointWriter(fs::path root, fs::path rel) : root_(std::move(root)), rel_(std::move(rel)) {}

  void write(const std::string& name, const std::string& text) {
    write_text_file(root_ / rel_ / name, text);
    files_.push_back(rel_ / name);
  }
  std::vector<fs::path> take() { return std::move(files_); }

 private:
  fs::path root_;
  fs::path rel_;
  std::vector<fs::path> files_;
};

std::string binned_csv(const BinnedStatistic& b, const std::string& mean_col, const std::string& var_col) {
  std::string out = fmt::format("epsilon_bin_center,{},{},count\n", mean_col, var_col);
  for (std::size_t i = 0; i < b.bins(); ++i) {
    out += fmt::format("{},{},{},{}\n", format_double(b.center(i)), opt_cell(b.mean[i]), opt_cell(b.variance[i]),
                       b.counts[i]);
  }
  return out;
}

IndexWindow resolve_window(const WindowSpec& spec, const std::vector<double>& eps) {
  if (spec.kind == WindowSpec::Kind::MiddleThird) return middle_third(eps.size());
  return energy_window(eps, spec.lo, spec.hi, spec.hi >= 1.0);
}

PointResult run_spectrum_point(const SpectrumPoint& point, const RunConfig& config, SpectrumCache* cache,
                               const fs::path& out_dir) {
  PointResult result;
  PointWriter writer(out_dir, fs::path("points") / point.id());
  const bool want_eth = config.analyses.count(Analysis::Eth) > 0;
  const auto spectrum = obtain_spectrum(point, config.needs_vectors(), cache, result.counters);
  const std::span<const double> energies(spectrum.eigenvalues.data(), static_cast<std::size_t>(spectrum.dim()));
  const auto scaled = scale_energies(energies);
  const auto window = resolve_window(config.window, scaled.epsilons);

  json summary = point.describe();
  summary["dimension"] = spectrum.dim();
  summary["e_min"] = scaled.e_min;
  summary["e_max"] = scaled.e_max;
  summary["window"] = {window.begin, window.end};

  {
    std::string csv = "index,energy,epsilon\n";
    for (std::size_t i = 0; i < energies.size(); ++i) {
      csv += fmt::format("{},{},{}\n", i, format_double(energies[i]), format_double(scaled.epsilons[i]));
    }
    writer.write("eigenvalues.csv", csv);
  }

  if (config.analyses.count(Analysis::RStat)) {
    const auto m = mean_r(energies, window);
    const auto all = r_ratios(energies);
    summary["rstat"] = {{"mean_r", m.mean}, {"count", m.count}, {"excluded", m.excluded},
                        {"excluded_total", all.excluded}};
    writer.write("rstat.csv", binned_csv(binned_r(energies, config.bins), "mean", "variance"));
  }

  if (config.analyses.count(Analysis::Gfd)) {
    json gfd_summary = json::object();
    for (double q : config.gfd_orders) {
      const auto stats = gfd_window_stats(spectrum, q, window, config.bins);
      gfd_summary[order_tag(q)] = {{"q", order_json(q)}, {"mean", stats.mean}, {"variance", stats.variance},
                                   {"count", stats.count}, {"excluded_degenerate", stats.excluded}};
      writer.write(fmt::format("gfd_q{}.csv", order_tag(q)), binned_csv(stats.bins, "mean_Dq", "var_Dq"));
    }
    summary["gfd"] = gfd_summary;
    const auto ref = goe_reference(static_cast<double>(std::max<Eigen::Index>(spectrum.dim(), 2)));
    summary["goe"] = {{"dimension", spectrum.dim()}, {"mean_D1", ref.mean_d1}, {"var_D1", ref.var_d1}};
    writer.write("goe_reference.csv", fmt::format("dimension,mean_D1,var_D1\n{},{},{}\n", spectrum.dim(),
                                                  format_double(ref.mean_d1), format_double(ref.var_d1)));
  }

  if (config.analyses.count(Analysis::Dos)) {
    const auto dos = density_of_states(scaled.epsilons, config.bins);
    std::string csv = "epsilon_bin_center,rho,count\n";
    for (std::size_t i = 0; i < dos.bins(); ++i) {
      csv += fmt::format("{},{},{}\n", format_double(dos.center(i)), opt_cell(dos.mean[i]), dos.counts[i]);
    }
    writer.write("dos.csv", csv);
  }

  if (want_eth) {
    const auto product = std::make_shared<const ProductBasis>(
        ProductBasis::enumerate(point.sector.sites, point.sector.excitations));
    const auto block = build_hamiltonian(point.params, SymBasis::build(point.sector, product));
    const auto diag = diagonal_elements(spectrum, block.tunneling, window);
    const auto values = diag.window_values();
    const auto off = offdiagonal_elements(spectrum, block.tunneling, config.eth_delta, config.eth_subset);
    std::string csv = "eps_over_epsav,value\n";
    for (std::size_t a = diag.window.begin; a < diag.window.end; ++a) {
      csv += fmt::format("{},{}\n", format_double(diag.ratio(a)), format_double(diag.values[a]));
    }
    writer.write("eth_diagonal.csv", csv);
    csv = "omega,absvalue,running_avg\n";
    for (std::size_t i = 0; i < off.elements.size(); ++i) {
      csv += fmt::format("{},{},{}\n", format_double(off.elements[i].omega), format_double(off.elements[i].magnitude),
                         format_double(off.running_average[i]));
    }
    writer.write("eth_offdiagonal.csv", csv);
    const json eth = {{"eps_av", diag.eps_av},
                      {"Z_mean", z_statistic(values)},
                      {"offdiag_mean", off.mean_magnitude},
                      {"diagonal_count", values.size()},
                      {"offdiag_pairs", off.elements.size()},
                      {"delta", off.delta},
                      {"subset", off.subset}};
    summary["eth"] = eth;
    writer.write("eth_summary.json", eth.dump(2) + "\n");
  }

  writer.write("summary.json", summary.dump(2) + "\n");
  result.files = writer.take();
  return result;
}

std::string sweep_csv(const std::vector<GsSweepPoint>& sweep) {
  std::string out = "t_over_g,D1,D2,Dinf,E0\n";
  for (const auto& p : sweep) {
    out += fmt::format("{},{},{},{},{}\n", format_double(p.t), format_double(p.d1), format_double(p.d2),
                       format_double(p.dinf), format_double(p.energy));
  }
  return out;
}

std::string derivative_csv(const std::vector<GsSweepPoint>& sweep) {
  const auto d1 = gfd_derivative(sweep, 1.0);
  const auto d2 = gfd_derivative(sweep, 2.0);
  const auto dinf = gfd_derivative(sweep, kInfiniteQ);
  std::string out = "t_over_g,dD1,dD2,dDinf\n";
  for (std::size_t i = 0; i < d1.size(); ++i) {
    out += fmt::format("{},{},{},{}\n", format_double(d1[i].t), format_double(d1[i].value),
                       format_double(d2[i].value), format_double(dinf[i].value));
  }
  return out;
}

json sweep_to_json(const std::vector<GsSweepPoint>& sweep) {
  json rows = json::array();
  for (const auto& p : sweep) rows.push_back({p.t, p.energy, p.residual, p.d1, p.d2, p.dinf});
  return rows;
}

std::vector<GsSweepPoint> sweep_from_json(const json& rows, const GroundStatePoint& point, Boundary bc) {
  std::vector<GsSweepPoint> out;
  for (const auto& r : rows) {
    GsSweepPoint p;
    p.t = r.at(0).get<double>();
    p.energy = r.at(1).get<double>();
    p.residual = r.at(2).get<double>();
    p.d1 = r.at(3).get<double>();
    p.d2 = r.at(4).get<double>();
    p.dinf = r.at(5).get<double>();
    p.delta = point.delta;
    p.sites = point.sites;
    p.excitations = point.excitations;
    p.boundary = bc;
    out.push_back(p);
  }
  return out;
}

PointResult run_ground_state_point(const GroundStatePoint& point, const RunConfig& config, const fs::path& cache_dir,
                                   const fs::path& out_dir) {
  PointResult result;
  PointWriter writer(out_dir, fs::path("points") / point.id());
  const auto& g = config.ground_state;
  const json key_doc = {{"code_version", kCodeVersion}, {"kind", "groundstate"}, {"L", point.sites},
                        {"N", point.excitations},       {"delta", point.delta},   {"t_min", g.t_min},
                        {"t_max", g.t_max},             {"ppd", g.points_per_decade}, {"refine", g.refine_points}};
  const fs::path cache_file = cache_dir / (sha256_hex(key_doc.dump()) + ".gs.json");

  std::vector<GsSweepPoint> pbc, hwbc;
  bool loaded = false;
  if (config.cache != CachePolicy::Off && fs::exists(cache_file)) {
    try {
      std::ifstream in(cache_file);
      const json doc = json::parse(in);
      if (doc.at("key") == key_doc) {
        pbc = sweep_from_json(doc.at("periodic"), point, Boundary::Periodic);
        hwbc = sweep_from_json(doc.at("hard_wall"), point, Boundary::HardWall);
        loaded = true;
        ++result.counters.cache_hits;
      }
    } catch (const std::exception&) {
      loaded = false;
    }
  }
  if (!loaded) {
    CriticalSearchOptions options;
    options.t_min = g.t_min;
    options.t_max = g.t_max;
    options.points_per_decade = g.points_per_decade;
    options.refine_points = g.refine_points;
    auto search = find_critical_point(point.delta, point.sites, point.excitations, options);
    pbc = std::move(search.periodic);
    hwbc = std::move(search.hard_wall);
    result.counters.solver_invocations += static_cast<int>(pbc.size() + hwbc.size());
    if (config.cache == CachePolicy::ReadWrite) {
      const json doc = {{"key", key_doc}, {"periodic", sweep_to_json(pbc)}, {"hard_wall", sweep_to_json(hwbc)}};
      write_text_file(cache_file, doc.dump() + "\n");
    }
  }

  writer.write("sweep_pbc.csv", sweep_csv(pbc));
  writer.write("sweep_hwbc.csv", sweep_csv(hwbc));
  writer.write("derivative_pbc.csv", derivative_csv(pbc));
  writer.write("derivative_hwbc.csv", derivative_csv(hwbc));

  json report = point.describe();
  report["full_dimension"] = full_dimension(point.sites, point.excitations);
  report["estimates"] = json::array();
  for (double q : kGroundStateOrders) {
    const auto est = critical_bracket(pbc, hwbc, q);
    report["estimates"].push_back({{"q", order_json(q)},
                                   {"pbc_argmax", est.periodic.t},
                                   {"hwbc_argmax", est.hard_wall.t},
                                   {"lower", est.lower},
                                   {"upper", est.upper},
                                   {"boundary_warning", est.boundary_warning}});
  }
  const double n = static_cast<double>(full_dimension(point.sites, point.excitations));
  report["notes"] = json::array(
      {fmt::format("weak-tunnelling limit: the t=0 dressed product state has D1 = L ln2 / ln N = {} at resonance "
                   "in the bare basis, so D_q does not vanish at small t",
                   format_double(point.sites * std::log(2.0) / std::log(n)))});
  writer.write("critical.json", report.dump(2) + "\n");
  result.files = writer.take();
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sweep orchestration

ResultManifest run_sweep(const RunConfig& config, const RunHooks& hooks) {
  config.validate();
  const fs::path out_dir = config.output_dir;
  fs::create_directories(out_dir);
  const fs::path cache_dir = resolve_cache_dir(config);
  std::optional<SpectrumCache> cache;
  if (config.cache != CachePolicy::Off) cache.emplace(cache_dir, config.cache);

  struct Task {
    std::string id;
    std::string kind;
    json params;
    std::function<PointResult()> run;
  };
  std::vector<Task> tasks;
  for (const auto& p : spectrum_points(config)) {
    tasks.push_back({p.id(), "spectrum", p.describe(), [&, p] {
                       return run_spectrum_point(p, config, cache ? &*cache : nullptr, out_dir);
                     }});
  }
  for (const auto& p : ground_state_points(config)) {
    tasks.push_back({p.id(), "groundstate", p.describe(),
                     [&, p] { return run_ground_state_point(p, config, cache_dir, out_dir); }});
  }

  struct Outcome {
    bool ok = false;
    std::string error;
    PointResult result;
    double seconds = 0.0;
  };
  std::vector<Outcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        if (hooks.before_point) hooks.before_point(tasks[i].id);
        outcomes[i].result = tasks[i].run();
        outcomes[i].ok = true;
      } catch (const std::exception& e) {
        outcomes[i].error = e.what();
      } catch (...) {
        outcomes[i].error = "unknown failure";
      }
      outcomes[i].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers =
      std::min<std::size_t>(tasks.size(), config.workers > 0 ? static_cast<std::size_t>(config.workers) : hw);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (cache) cache->write_index();

  ResultManifest manifest;
  manifest.output_dir = out_dir;
  manifest.path = out_dir / "manifest.json";
  json points = json::array();
  json log_points = json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& o = outcomes[i];
    json entry = {{"id", tasks[i].id}, {"kind", tasks[i].kind}, {"params", tasks[i].params},
                  {"status", o.ok ? "ok" : "failed"}};
    json files = json::array();
    if (o.ok) {
      for (const auto& rel : o.result.files) {
        files.push_back({{"path", rel.generic_string()}, {"sha256", sha256_file(out_dir / rel)},
                         {"bytes", fs::file_size(out_dir / rel)}});
      }
      ++manifest.succeeded;
    } else {
      entry["error"] = o.error;
      ++manifest.failed;
    }
    entry["files"] = files;
    points.push_back(entry);
    manifest.solver_invocations += o.result.counters.solver_invocations;
    manifest.cache_hits += o.result.counters.cache_hits;
    log_points.push_back({{"id", tasks[i].id},
                          {"wall_seconds", o.seconds},
                          {"solver_invocations", o.result.counters.solver_invocations},
                          {"cache_hits", o.result.counters.cache_hits}});
  }
  manifest.document = {{"schema_version", kConfigSchemaVersion},
                       {"code_version", kCodeVersion},
                       {"config", to_json(config)},
                       {"points", points},
                       {"summary", {{"points", tasks.size()}, {"succeeded", manifest.succeeded}, {"failed", manifest.failed}}}};
  write_text_file(manifest.path, manifest.document.dump(2) + "\n");
  const json run_log = {{"workers", n_workers},
                        {"cache_dir", cache ? cache_dir.string() : std::string()},
                        {"solver_invocations", manifest.solver_invocations},
                        {"cache_hits", manifest.cache_hits},
                        {"points", log_points}};
  write_text_file(out_dir / "run_log.json", run_log.dump(2) + "\n");
  return manifest;
}

// ---------------------------------------------------------------------------
// Figure bundles

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw FormatError("missing column " + name);
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Csv read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  Csv csv;
  std::string line;
  if (std::getline(in, line)) csv.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) csv.rows.push_back(split(line));
  }
  return csv;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return json::parse(in);
}

std::string cell(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

struct PointFiles {
  json entry;
  fs::path dir;

  bool has(const std::string& name) const {
    for (const auto& f : entry.at("files")) {
      if (fs::path(f.at("path").get<std::string>()).filename() == name) return true;
    }
    return false;
  }
  fs::path file(const std::string& name) const { return dir / name; }
};

std::vector<PointFiles> usable_points(const json& manifest, const fs::path& root, const std::string& kind) {
  std::vector<PointFiles> out;
  for (const auto& p : manifest.at("points")) {
    if (p.at("status") != "ok" || p.at("kind") != kind) continue;
    out.push_back({p, root / "points" / p.at("id").get<std::string>()});
  }
  return out;
}

void require(const PointFiles& p, const std::string& file, const std::string& analysis, int figure) {
  if (!p.has(file)) {
    throw Error(fmt::format("figure {} needs analysis '{}' but point {} has no {}", figure, analysis,
                            p.entry.at("id").get<std::string>(), file));
  }
}

std::string key_cells(const json& params) {
  return fmt::format("{},{},{},{}", cell(params.at("L")), cell(params.at("boundary")), cell(params.at("delta")),
                     cell(params.at("t")));
}

}  // namespace

json figure_schema() {
  const json spectral_keys = {
      {"L", "chain length"},
      {"boundary", "pbc or hwbc"},
      {"delta", "detuning in units of g"},
      {"t_over_g", "photon tunnelling in units of g"},
  };
  auto with = [&](json extra) {
    json cols = spectral_keys;
    for (auto& [k, v] : extra.items()) cols[k] = v;
    return cols;
  };
  return {
      {"fig1.csv", with({{"eps_bin", "center of the scaled-energy bin"},
                         {"mean_r", "bin mean of r-ratios (empty if no defined ratio)"},
                         {"mean_D1", "bin mean of eigenstate D1"},
                         {"log10_var_D1", "log10 of the bin population variance of D1 (empty if zero or undefined)"}})},
      {"fig2.csv", with({{"dimension", "sector dimension"},
                         {"mean_r", "window mean r-ratio"},
                         {"mean_D1", "window mean D1"},
                         {"var_D1", "window population variance of D1"},
                         {"goe_mean_D1", "GOE mean of D1 at this dimension"},
                         {"goe_var_D1", "GOE variance of D1 at this dimension"}})},
      {"fig3.csv", with({{"eps_bin", "center of the scaled-energy bin"}, {"rho", "density of states"}})},
      {"fig4_diagonal.csv", with({{"eps_over_epsav", "eps_alpha / eps_av"}, {"value", "<alpha|H_tun|alpha>"}})},
      {"fig4_offdiagonal.csv", with({{"omega", "eps_alpha - eps_beta"},
                                     {"absvalue", "|<alpha|H_tun|beta>|"},
                                     {"running_avg", "trailing mean over the last 100 points in omega order"}})},
      {"fig4_summary.csv", with({{"dimension", "sector dimension"},
                                 {"Z_mean", "mean |consecutive difference| of diagonal elements in the window"},
                                 {"offdiag_mean", "mean |<alpha|H_tun|beta>| over window pairs"},
                                 {"pairs", "number of window pairs"}})},
      {"fig6_sweep.csv", {{"L", "chain length"},
                          {"delta", "detuning in units of g"},
                          {"boundary", "pbc or hwbc"},
                          {"t_over_g", "photon tunnelling in units of g"},
                          {"D1", "ground-state D1 in the product basis"},
                          {"D2", "ground-state D2"},
                          {"Dinf", "ground-state D_inf"},
                          {"E0", "ground-state energy"},
                          {"dD1", "dD1/dt"},
                          {"dD2", "dD2/dt"},
                          {"dDinf", "dDinf/dt"}}},
      {"fig6_critical.csv", {{"L", "chain length"},
                             {"delta", "detuning in units of g"},
                             {"q", "GFD order"},
                             {"pbc_argmax", "t of max |dD_q/dt| under PBC"},
                             {"hwbc_argmax", "t of max |dD_q/dt| under HWBC"},
                             {"lower", "bracket lower end"},
                             {"upper", "bracket upper end"},
                             {"boundary_warning", "argmax at a grid end"}}},
  };
}

std::vector<fs::path> emit_figure_data(const fs::path& manifest_path, int figure, const fs::path& out_dir) {
  const json manifest = read_json(manifest_path);
  const fs::path root = manifest_path.parent_path();
  if (!manifest.contains("points") || manifest.at("points").empty()) {
    throw Error("manifest " + manifest_path.string() + " lists no points");
  }
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file(out_dir / name, text);
    written.push_back(out_dir / name);
  };
  const auto spectral = usable_points(manifest, root, "spectrum");
  const auto ground = usable_points(manifest, root, "groundstate");
  const std::string keys = "L,boundary,delta,t_over_g";

  switch (figure) {
    case 1: {
      if (spectral.empty()) throw Error("figure 1 needs successful spectrum points");
      std::string out = keys + ",eps_bin,mean_r,mean_D1,log10_var_D1\n";
      for (const auto& p : spectral) {
        require(p, "rstat.csv", "rstat", 1);
        require(p, "gfd_q1.csv", "gfd", 1);
        const auto r = read_csv(p.file("rstat.csv"));
        const auto d = read_csv(p.file("gfd_q1.csv"));
        if (r.rows.size() != d.rows.size()) throw FormatError("bin mismatch in " + p.dir.string());
        const auto k = key_cells(p.entry.at("params"));
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
          std::string log_var;
          const auto& v = d.rows[i][d.column("var_Dq")];
          if (!v.empty() && std::stod(v) > 0.0) log_var = format_double(std::log10(std::stod(v)));
          out += fmt::format("{},{},{},{},{}\n", k, r.rows[i][0], r.rows[i][r.column("mean")],
                             d.rows[i][d.column("mean_Dq")], log_var);
        }
      }
      emit("fig1.csv", out);
      break;
    }
    case 2: {
      if (spectral.empty()) throw Error("figure 2 needs successful spectrum points");
      std::string out = keys + ",dimension,mean_r,mean_D1,var_D1,goe_mean_D1,goe_var_D1\n";
      for (const auto& p : spectral) {
        require(p, "rstat.csv", "rstat", 2);
        require(p, "gfd_q1.csv", "gfd", 2);
        const auto s = read_json(p.file("summary.json"));
        out += fmt::format("{},{},{},{},{},{},{}\n", key_cells(p.entry.at("params")), cell(s.at("dimension")),
                           cell(s.at("rstat").at("mean_r")), cell(s.at("gfd").at("1").at("mean")),
                           cell(s.at("gfd").at("1").at("variance")), cell(s.at("goe").at("mean_D1")),
                           cell(s.at("goe").at("var_D1")));
      }
      emit("fig2.csv", out);
      break;
    }
    case 3: {
      if (spectral.empty()) throw Error("figure 3 needs successful spectrum points");
      std::string out = keys + ",eps_bin,rho\n";
      for (const auto& p : spectral) {
        require(p, "dos.csv", "dos", 3);
        const auto d = read_csv(p.file("dos.csv"));
        const auto k = key_cells(p.entry.at("params"));
        for (const auto& row : d.rows) out += fmt::format("{},{},{}\n", k, row[0], row[d.column("rho")]);
      }
      emit("fig3.csv", out);
      break;
    }
    case 4: {
      if (spectral.empty()) throw Error("figure 4 needs successful spectrum points");
      std::string diag = keys + ",eps_over_epsav,value\n";
      std::string off = keys + ",omega,absvalue,running_avg\n";
      std::string summary = keys + ",dimension,Z_mean,offdiag_mean,pairs\n";
      for (const auto& p : spectral) {
        require(p, "eth_summary.json", "eth", 4);
        const auto k = key_cells(p.entry.at("params"));
        for (const auto& row : read_csv(p.file("eth_diagonal.csv")).rows) diag += fmt::format("{},{},{}\n", k, row[0], row[1]);
        for (const auto& row : read_csv(p.file("eth_offdiagonal.csv")).rows) {
          off += fmt::format("{},{},{},{}\n", k, row[0], row[1], row[2]);
        }
        const auto s = read_json(p.file("summary.json"));
        const auto& e = s.at("eth");
        summary += fmt::format("{},{},{},{},{}\n", k, cell(s.at("dimension")), cell(e.at("Z_mean")),
                               cell(e.at("offdiag_mean")), cell(e.at("offdiag_pairs")));
      }
      emit("fig4_diagonal.csv", diag);
      emit("fig4_offdiagonal.csv", off);
      emit("fig4_summary.csv", summary);
      break;
    }
    case 6: {
      if (ground.empty()) throw Error("figure 6 needs analysis 'groundstate' (no ground-state points in manifest)");
      std::string sweep = "L,delta,boundary,t_over_g,D1,D2,Dinf,E0,dD1,dD2,dDinf\n";
      std::string crit = "L,delta,q,pbc_argmax,hwbc_argmax,lower,upper,boundary_warning\n";
      for (const auto& p : ground) {
        const auto& params = p.entry.at("params");
        for (const char* bc : {"pbc", "hwbc"}) {
          const auto s = read_csv(p.file(fmt::format("sweep_{}.csv", bc)));
          const auto d = read_csv(p.file(fmt::format("derivative_{}.csv", bc)));
          for (std::size_t i = 0; i < s.rows.size(); ++i) {
            sweep += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", cell(params.at("L")), cell(params.at("delta")), bc,
                                 s.rows[i][0], s.rows[i][1], s.rows[i][2], s.rows[i][3], s.rows[i][4], d.rows[i][1],
                                 d.rows[i][2], d.rows[i][3]);
          }
        }
        const auto report = read_json(p.file("critical.json"));
        for (const auto& e : report.at("estimates")) {
          crit += fmt::format("{},{},{},{},{},{},{},{}\n", cell(params.at("L")), cell(params.at("delta")), cell(e.at("q")),
                              cell(e.at("pbc_argmax")), cell(e.at("hwbc_argmax")), cell(e.at("lower")),
                              cell(e.at("upper")), cell(e.at("boundary_warning")));
        }
      }
      emit("fig6_sweep.csv", sweep);
      emit("fig6_critical.csv", crit);
      break;
    }
    default:
      throw Error(fmt::format("unknown figure {} (expected 1, 2, 3, 4 or 6)", figure));
  }
  emit("schema.json", figure_schema().dump(2) + "\n");
  return written;
}

}  // namespace polariton
