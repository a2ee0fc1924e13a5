#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpplab/grid.hpp"
#include "kpplab/model.hpp"

namespace kpplab {

enum class Scheme { explicit_euler, imex };

struct SolverConfig {
  double h = 0.1;
  std::optional<double> dt;  // nullopt: 0.9 x the scheme's stability bound
  Scheme scheme = Scheme::explicit_euler;
  double t_final = 1.0;
  std::vector<double> snapshot_times;
  double boundary_leak_tolerance = 1e-8;
  double boundary_leak_abort = 1e-3;
};

/// t0, t0 + step, ..., up to t1 (t1 included when it lies on the comb up to rounding).
std::vector<double> uniform_times(double t0, double t1, double step);

/// Values above -floor and below 1 + floor are admissible solution states.
inline constexpr double kMaximumPrincipleSlack = 1e-12;

/// Discrete right-hand side div_h(a grad_h u) + f(x, u) with Dirichlet-zero ghost nodes
/// outside the grid and face coefficients a evaluated at face midpoints.
class ReactionDiffusionOperator {
 public:
  ReactionDiffusionOperator(const Grid& grid, const CoefficientField& coefficient, const Reaction& reaction);

  const Grid& grid() const { return grid_; }
  double max_coefficient() const { return max_face_; }

  void diffusion(std::span<const double> u, std::span<double> out) const;
  void rhs(std::span<const double> u, std::span<double> out) const;
  GridFunction rhs(const GridFunction& u) const;

  /// Explicit stability (monotonicity) bound h^2 / (2 dim sup a).
  double explicit_limit() const;
  /// Backward-Euler diffusion step (I - dt D) x = b, 1D only.
  void implicit_diffusion_solve(std::span<const double> b, double dt, std::span<double> x) const;
  /// Sampled bound on |df/du| over the grid nodes.
  double reaction_lipschitz() const;

 private:
  Grid grid_;
  Reaction reaction_;
  std::vector<Point> points_;
  std::vector<double> face_east_;   // a at x_i + h/2, size n + 1 (index i is the face left of node i)
  std::vector<double> face_north_;  // 2D: a at y_j + h/2 per node column, size (n + 1) * n
  double max_face_ = 0.0;
};

/// What a state must satisfy between steps.
enum class StateBounds { unit_interval, nonnegative };

/// Fixed-step integrator shared by solve, fundamental_solution and the tumor protocol.
class TimeIntegrator {
 public:
  TimeIntegrator(const Grid& grid, const CoefficientField& coefficient, const Reaction& reaction, Scheme scheme,
                 std::optional<double> dt, StateBounds bounds = StateBounds::unit_interval);

  const Grid& grid() const { return op_.grid(); }
  const ReactionDiffusionOperator& op() const { return op_; }
  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }

  /// One step of size `dt` (<= dt()).
  void step(std::span<double> u, double dt) const;
  /// Advances u from t_from to t_to with equal substeps no longer than dt().
  void advance(GridFunction& u, double t_from, double t_to) const;
  GridFunction rhs(const GridFunction& u) const { return op_.rhs(u); }

 private:
  void check_state(std::span<const double> u, double t) const;

  ReactionDiffusionOperator op_;
  Scheme scheme_;
  StateBounds bounds_;
  double dt_ = 0.0;
  mutable std::vector<double> scratch_;
  mutable std::vector<double> scratch2_;
};

/// One time step of size cfg.dt (or the automatic step). `t` is used in diagnostics only.
GridFunction step(const GridFunction& state, double t, const Problem& p, const SolverConfig& cfg);

struct Snapshot {
  double t = 0.0;
  GridFunction u;
  GridFunction rhs;  // discrete right-hand side at this state (the artifact's u_t)
};

struct Trajectory {
  Problem problem;
  SolverConfig config;
  double dt = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<std::string> warnings;
  double max_boundary_value = 0.0;

  const Snapshot* at(double t, double tolerance = 1e-9) const;
  std::vector<double> times() const;
};

/// Integrates the problem and records snapshots at cfg.snapshot_times.
/// Throws NumericalError when the boundary value exceeds cfg.boundary_leak_abort.
Trajectory solve(const Problem& p, const SolverConfig& cfg);

/// Same, starting from an explicit initial state on the problem's grid.
Trajectory solve_from(const Problem& p, const SolverConfig& cfg, const GridFunction& initial);

/// Writes `t,x[,y],u,rhs` rows for every snapshot (17 significant digits).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

struct FundamentalSolution {
  Point source;
  std::vector<double> times;
  std::vector<GridFunction> kernels;
  std::vector<double> mass;
  double dt = 0.0;

  const GridFunction& at(double t) const;
};

struct KernelRunOptions {
  std::optional<double> dt;
  double mass_tolerance = 1e-6;
};

/// Numerical p(t, .; y) of p_t = div(a grad p) with p(0) a unit mass in the cell at y.
/// Throws NumericalError when the mass deviates from 1 beyond the tolerance.
FundamentalSolution fundamental_solution(const CoefficientField& coefficient, std::span<const double> t_targets,
                                         Point source, const Grid& grid, const KernelRunOptions& opts = {});

enum class HalfLineSide { right, left };

/// Snapshot of a linear half-line run.
struct LinearSnapshot {
  double t = 0.0;
  GridFunction v;
  GridFunction rhs;  // a v_xx + rate v at interior nodes; 0 at the two Dirichlet nodes
};

/// Explicit solver for v_t = a v_xx + rate v on a 1D interval grid.
/// Side right: grid [0, X], v = g(t) at x = 0 and v = 0 at x = X.
/// Side left: grid [-X, 0], v = 0 at x = -X and v = g(t) at x = 0.
std::vector<LinearSnapshot> solve_half_line(double diffusivity, double rate, const GridFunction& v0,
                                            const std::function<double(double)>& boundary, HalfLineSide side,
                                            std::span<const double> times, std::optional<double> dt = std::nullopt);

}  // namespace kpplab
