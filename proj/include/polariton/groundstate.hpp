#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "polariton/basis.hpp"
#include "polariton/eigensolver.hpp"
#include "polariton/model.hpp"

namespace polariton {

inline constexpr std::array<double, 3> kGroundStateOrders{1.0, 2.0, std::numeric_limits<double>::infinity()};

struct GsSweepPoint {
  double t = 0.0;
  double delta = 0.0;
  int sites = 0;
  int excitations = 0;
  Boundary boundary = Boundary::Periodic;
  double energy = 0.0;
  double residual = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double dinf = 0.0;

  double dq(double q) const;
};

/// Ground states of one chain at fixed detuning for varying t. The sector
/// basis and the two Hamiltonian parts are built once and reused.
class GroundStateSolver {
 public:
  GroundStateSolver(int sites, int excitations, Boundary boundary, double delta, double g = 1.0,
                    std::size_t max_states = kDefaultMaxStates);

  // Q = 0 (PBC) and reflection-even sector that holds the nodeless ground state.
  static Sector ground_sector(int sites, int excitations, Boundary boundary);

  const SymBasis& basis() const { return basis_; }
  double full_dimension() const { return static_cast<double>(basis_.product().size()); }

  SectorOperator hamiltonian(double t) const;
  // Throws ConvergenceError naming t when Lanczos fails.
  Eigenpair solve(double t, const LanczosOptions& options = {}) const;
  // Ground state expanded over the product basis |n>.
  Eigen::VectorXd bare_state(const Eigenpair& pair) const;
  GsSweepPoint point(double t, const LanczosOptions& options = {}) const;

 private:
  int sites_;
  int excitations_;
  Boundary boundary_;
  double delta_;
  double g_;
  SymBasis basis_;
  SectorOperator::RealMatrix interaction_;
  SectorOperator::RealMatrix hopping_;  // tunnelling part at t = 1
};

std::vector<GsSweepPoint> gs_sweep(const std::vector<double>& grid, double delta, int sites, int excitations,
                                   Boundary boundary, const LanczosOptions& options = {});

// Multinomial amplitudes sqrt(N! / (L^N nu_1! ... nu_L!)) of the PBC ground
// state at t = infinity, on the product basis (atoms in the ground state).
Eigen::VectorXd analytic_infinite_t_state(int sites, int excitations);
Eigen::VectorXd analytic_infinite_t_state(const ProductBasis& basis);

// Log-spaced grid from lo to hi with the given number of points per decade
// (both ends included).
std::vector<double> geometric_grid(double lo, double hi, int points_per_decade);

struct DerivativePoint {
  double t = 0.0;
  double value = 0.0;
};

// Second-order three-point differences on a nonuniform grid; one-sided at the ends.
std::vector<DerivativePoint> gfd_derivative(const std::vector<double>& t, const std::vector<double>& values);
std::vector<DerivativePoint> gfd_derivative(const std::vector<GsSweepPoint>& sweep, double q);

struct ArgMax {
  std::size_t index = 0;
  double t = 0.0;
  double magnitude = 0.0;
  bool on_boundary = false;  // grid too narrow
};

ArgMax argmax_abs_derivative(const std::vector<DerivativePoint>& derivative);

struct CriticalEstimate {
  double q = 1.0;
  int sites = 0;
  ArgMax periodic;
  ArgMax hard_wall;
  double lower = 0.0;
  double upper = 0.0;
  bool boundary_warning = false;
};

// Sweeps must share one grid.
CriticalEstimate critical_bracket(const std::vector<GsSweepPoint>& periodic,
                                  const std::vector<GsSweepPoint>& hard_wall, double q);

struct CriticalSearchOptions {
  double t_min = 1e-3;
  double t_max = 1e2;
  int points_per_decade = 10;
  int refine_points = 12;  // linear points inserted on each side of a coarse argmax
  LanczosOptions lanczos;
};

struct CriticalSearch {
  std::vector<GsSweepPoint> periodic;
  std::vector<GsSweepPoint> hard_wall;
  std::vector<CriticalEstimate> estimates;  // one per order in kGroundStateOrders
};

// Coarse geometric sweep under both boundaries, then a linear refinement
// around every coarse argmax applied to both sweeps.
CriticalSearch find_critical_point(double delta, int sites, int excitations, const CriticalSearchOptions& options = {});

}  // namespace polariton
