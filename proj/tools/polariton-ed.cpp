#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "polariton/error.hpp"
#include "polariton/eth.hpp"
#include "polariton/multifractal.hpp"
#include "polariton/runner.hpp"
#include "polariton/spectral.hpp"
#include "polariton/version.hpp"

using namespace polariton;
namespace fs = std::filesystem;

namespace {

struct SectorArgs {
  int sites = 6;
  int excitations = -1;  // default: unit filling
  std::string boundary = "pbc";
  std::optional<int> momentum;
  std::string parity = "odd";

  void add_to(CLI::App* app) {
    app->add_option("--L", sites, "chain length")->required();
    app->add_option("--N", excitations, "total excitations (default L)");
    app->add_option("--boundary", boundary, "pbc or hwbc");
    app->add_option("--Q", momentum, "quasimomentum index for pbc (default 0)");
    app->add_option("--p", parity, "reflection parity: even (+1), odd (-1) or none");
  }

  Sector sector() const {
    Sector s;
    s.sites = sites;
    s.excitations = excitations < 0 ? sites : excitations;
    s.boundary = parse_boundary(boundary);
    if (s.boundary == Boundary::Periodic) s.momentum = momentum.value_or(0);
    s.parity = parse_parity(parity);
    s.validate();
    return s;
  }
};

struct PointArgs {
  SectorArgs where;
  double delta = 0.0;
  double t = 1.0;
  bool no_cache = false;
  std::string cache_dir;

  void add_to(CLI::App* app) {
    where.add_to(app);
    app->add_option("--delta", delta, "detuning in units of g");
    app->add_option("--t", t, "photon tunnelling in units of g");
    app->add_flag("--no-cache", no_cache, "neither read nor write the spectrum cache");
    app->add_option("--cache-dir", cache_dir, fmt::format("spectrum cache directory (overridden by ${})", kCacheEnvVar));
  }

  SpectrumPoint point() const {
    const auto s = sector();
    return {s, {delta, 1.0, t, s.boundary}};
  }
  Sector sector() const { return where.sector(); }

  std::optional<fs::path> cache_path() const {
    if (no_cache) return std::nullopt;
    fs::path dir = ".polariton-cache";
    if (const char* env = std::getenv(kCacheEnvVar); env && *env) {
      dir = env;
    } else if (!cache_dir.empty()) {
      dir = cache_dir;
    }
    return dir;
  }

  SpectrumResult solve(bool want_vectors) const {
    std::optional<SpectrumCache> c;
    if (const auto dir = cache_path()) c.emplace(*dir, CachePolicy::ReadWrite);
    SolveCounters counters;
    auto result = obtain_spectrum(point(), want_vectors, c ? &*c : nullptr, counters);
    if (c) c->write_index();
    return result;
  }
};

HamiltonianBlock block_for(const SpectrumPoint& p) {
  const auto product = std::make_shared<const ProductBasis>(ProductBasis::enumerate(p.sector.sites, p.sector.excitations));
  return build_hamiltonian(p.params, SymBasis::build(p.sector, product));
}

double parse_q(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfiniteQ;
  return std::stod(text);
}

std::span<const double> levels(const SpectrumResult& s) {
  return {s.eigenvalues.data(), static_cast<std::size_t>(s.dim())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact diagonalization of the Jaynes-Cummings-Hubbard chain"};
  app.set_version_flag("--version", std::string(kCodeVersion));
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run every point of a JSON sweep config");
  std::string config_path;
  int workers = -1;
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "override the worker count");

  // sector-dim
  auto* dim = app.add_subcommand("sector-dim", "print the dimension of a symmetry sector");
  SectorArgs dim_args;
  dim_args.add_to(dim);

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "print all eigenvalues of a sector, one per line");
  PointArgs spec_args;
  std::string dump_path;
  spec_args.add_to(spectrum);
  spectrum->add_option("--dump-matrix", dump_path, "write the Hamiltonian block as row,col,value triplets");

  auto* gfd_cmd = app.add_subcommand("gfd", "middle-third GFD mean and variance with the GOE reference");
  PointArgs gfd_args;
  std::string gfd_q = "1";
  gfd_args.add_to(gfd_cmd);
  gfd_cmd->add_option("--q", gfd_q, "order: a positive number or inf");

  auto* rstat = app.add_subcommand("rstat", "middle-third mean level-spacing ratio");
  PointArgs r_args;
  r_args.add_to(rstat);

  auto* dos = app.add_subcommand("dos", "density of states in scaled energy as CSV");
  PointArgs dos_args;
  std::size_t dos_bins = 100;
  dos_args.add_to(dos);
  dos->add_option("--bins", dos_bins, "number of equal-width bins");

  auto* eth = app.add_subcommand("eth", "ETH statistics of the tunnelling term");
  PointArgs eth_args;
  double eth_delta = 0.01;
  std::size_t eth_subset = 100;
  eth_args.add_to(eth);
  eth->add_option("--width", eth_delta, "relative window width for off-diagonal pairs");
  eth->add_option("--subset", eth_subset, "running-average length");

  auto* gs = app.add_subcommand("ground-state", "ground-state GFD sweep and critical bracket");
  int gs_L = 6;
  int gs_N = -1;
  double gs_delta = 0.0;
  CriticalSearchOptions gs_opts;
  std::string gs_out;
  gs->add_option("--L", gs_L, "chain length")->required();
  gs->add_option("--N", gs_N, "total excitations (default L)");
  gs->add_option("--delta", gs_delta, "detuning in units of g");
  gs->add_option("--t-min", gs_opts.t_min, "smallest t/g");
  gs->add_option("--t-max", gs_opts.t_max, "largest t/g");
  gs->add_option("--points-per-decade", gs_opts.points_per_decade, "coarse grid density");
  gs->add_option("--refine", gs_opts.refine_points, "refinement points on each side of a coarse argmax");
  gs->add_option("--sweep-csv", gs_out, "write both sweeps to this CSV");

  auto* emit = app.add_subcommand("emit", "write plot-ready tables for one figure");
  std::string manifest_path;
  int figure = 0;
  std::string emit_out = "figures";
  emit->add_option("manifest", manifest_path, "manifest.json of a run")->required();
  emit->add_option("--figure", figure, "figure id")->required()->check(CLI::IsMember({1, 2, 3, 4, 6}));
  emit->add_option("--out", emit_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = load_config(config_path);
      if (workers >= 0) config.workers = workers;
      const auto m = run_sweep(config);
      for (const auto& p : m.document.at("points")) {
        if (p.at("status") != "ok") {
          std::cerr << fmt::format("FAILED {}: {}\n", p.at("id").get<std::string>(), p.at("error").get<std::string>());
        }
      }
      std::cout << fmt::format("{} ok, {} failed, {} solves, {} cache hits; manifest {}\n", m.succeeded, m.failed,
                               m.solver_invocations, m.cache_hits, m.path.string());
      return m.all_ok() ? 0 : 1;
    }
    if (*dim) {
      const auto s = dim_args.sector();
      const auto product = std::make_shared<const ProductBasis>(ProductBasis::enumerate(s.sites, s.excitations));
      std::cout << SymBasis::build(s, product).dimension() << '\n';
      return 0;
    }
    if (*spectrum) {
      if (!dump_path.empty()) {
        std::ofstream out(dump_path);
        if (!out) throw Error("cannot write " + dump_path);
        block_for(spec_args.point()).total.write_triplets(out);
      }
      const auto s = spec_args.solve(false);
      for (double e : levels(s)) std::cout << format_double(e) << '\n';
      return 0;
    }
    if (*gfd_cmd) {
      const double q = parse_q(gfd_q);
      const auto s = gfd_args.solve(true);
      const auto stats = gfd_window_stats(s, q, middle_third(static_cast<std::size_t>(s.dim())), 100);
      const auto ref = goe_reference(static_cast<double>(s.dim()));
      std::cout << fmt::format("dimension {}\nq {}\nmean {}\nvariance {}\ncount {}\ngoe_mean_D1 {}\ngoe_var_D1 {}\n",
                               s.dim(), gfd_q, format_double(stats.mean), format_double(stats.variance), stats.count,
                               format_double(ref.mean_d1), format_double(ref.var_d1));
      return 0;
    }
    if (*rstat) {
      const auto s = r_args.solve(false);
      const auto m = mean_r(levels(s), middle_third(static_cast<std::size_t>(s.dim())));
      std::cout << fmt::format("dimension {}\nmean_r {}\ncount {}\nexcluded {}\n", s.dim(), format_double(m.mean),
                               m.count, m.excluded);
      return 0;
    }
    if (*dos) {
      const auto s = dos_args.solve(false);
      const auto d = density_of_states(scale_energies(levels(s)).epsilons, dos_bins);
      std::cout << "epsilon_bin_center,rho,count\n";
      for (std::size_t i = 0; i < d.bins(); ++i) {
        std::cout << fmt::format("{},{},{}\n", format_double(d.center(i)), format_double(d.mean[i].value_or(0.0)),
                                 d.counts[i]);
      }
      return 0;
    }
    if (*eth) {
      const auto p = eth_args.point();
      const auto s = eth_args.solve(true);
      const auto block = block_for(p);
      const auto diag = diagonal_elements(s, block.tunneling);
      const auto off = offdiagonal_elements(s, block.tunneling, eth_delta, eth_subset);
      std::cout << fmt::format("dimension {}\neps_av {}\nZ_mean {}\noffdiag_mean {}\npairs {}\n", s.dim(),
                               format_double(diag.eps_av), format_double(z_statistic(diag.window_values())),
                               format_double(off.mean_magnitude), off.elements.size());
      return 0;
    }
    if (*gs) {
      const int n = gs_N < 0 ? gs_L : gs_N;
      const auto search = find_critical_point(gs_delta, gs_L, n, gs_opts);
      if (!gs_out.empty()) {
        std::string csv = "boundary,t_over_g,D1,D2,Dinf,E0\n";
        for (const auto* sweep : {&search.periodic, &search.hard_wall}) {
          for (const auto& pt : *sweep) {
            csv += fmt::format("{},{},{},{},{},{}\n", to_string(pt.boundary), format_double(pt.t), format_double(pt.d1),
                               format_double(pt.d2), format_double(pt.dinf), format_double(pt.energy));
          }
        }
        write_text_file(gs_out, csv);
      }
      std::cout << "q,pbc_argmax,hwbc_argmax,lower,upper,boundary_warning\n";
      for (const auto& e : search.estimates) {
        std::cout << fmt::format("{},{},{},{},{},{}\n", std::isinf(e.q) ? std::string("inf") : fmt::format("{}", e.q),
                                 format_double(e.periodic.t), format_double(e.hard_wall.t), format_double(e.lower),
                                 format_double(e.upper), e.boundary_warning);
      }
      return 0;
    }
    if (*emit) {
      for (const auto& f : emit_figure_data(manifest_path, figure, emit_out)) std::cout << f.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
