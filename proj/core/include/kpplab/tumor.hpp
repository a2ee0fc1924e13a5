#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "kpplab/grid.hpp"
#include "kpplab/model.hpp"
#include "kpplab/solver.hpp"

namespace kpplab {

struct TreatmentEvent {
  double t = 0.0;
  double beta = 0.5;  // surviving fraction
};

struct TreatmentSchedule {
  std::vector<TreatmentEvent> events;
  double sigma_img = 0.5;  // imaging threshold

  /// Throws InvalidArgument unless times strictly increase and beta, sigma lie in (0, 1).
  void check() const;
};

/// Pointwise multiplication by beta in (0, 1]; beta = 1 is the identity.
GridFunction apply_treatment(const GridFunction& state, double beta);

/// Measure of {u > sigma}: exact for the piecewise-linear interpolant in 1D,
/// sub-sampled bilinear fractions of mixed cells in 2D.
double observed_size(const GridFunction& state, double sigma);

/// Trapezoid integral.
double total_mass(const GridFunction& state);

/// Interpolated crossing of a level along one grid edge.
struct LevelCrossing {
  Point x;
  std::size_t from = 0;  // node with the interior-side value
  std::size_t to = 0;
  double weight = 0.0;   // x = (1 - weight) x_from + weight x_to
  double slope = 0.0;    // |u_to - u_from| / h
};

std::vector<LevelCrossing> level_crossings(const GridFunction& state, double level);

/// Linear interpolation of a field at a crossing.
double interpolate_at(const GridFunction& field, const LevelCrossing& c);

struct JumpResidual {
  GridFunction residual;
  double max_abs = 0.0;
};

/// rhs(beta u) - [beta rhs(u) + rate beta (1 - beta) u^2] with the discrete operator.
/// Throws HypothesisMismatch unless the reaction is homogeneous logistic.
JumpResidual jump_identity_residual(const GridFunction& state_before, const GridFunction& rhs_before, double beta,
                                    const Problem& p);

struct ProtocolConfig {
  SolverConfig solver;  // snapshot_times is ignored
  double comb = 0.1;
  double grazing_slope = 1e-3;
};

struct ProtocolSample {
  double t = 0.0;
  double S = 0.0;
  double mass = 0.0;
  int event_flag = 0;  // 0 comb point, -1 left limit at an event, +1 right limit
};

struct EventDiagnostics {
  double t = 0.0;
  double beta = 0.0;
  double S_before = 0.0;
  double S_after = 0.0;
  double mass_before = 0.0;
  double mass_after = 0.0;
  std::vector<Point> boundary;               // interpolated sigma-crossings after treatment
  std::vector<double> boundary_rhs_before;   // pre-treatment rhs at those points
  std::vector<double> boundary_rhs_after;
  double boundary_rhs_min = 0.0;             // min of boundary_rhs_before (+inf when empty)
  std::size_t grazing = 0;                   // crossings with slope below the grazing threshold
  double jump_residual = 0.0;                // max |jump identity residual| (logistic only, else NaN)
  int dS_sign = 0;                           // sign of S(next comb) - S(t+)
  int dmass_sign = 0;
  std::vector<double> S_after_comb;          // S on the comb points following the event
};

struct ProtocolResult {
  std::vector<ProtocolSample> samples;
  std::vector<EventDiagnostics> events;
  std::vector<std::string> warnings;
};

/// Integrates the problem with multiplicative jumps at the scheduled times, recording S and
/// mass on a comb (event times inserted exactly) plus one-sided values at each event.
ProtocolResult run_protocol(const Problem& p, const TreatmentSchedule& sched, const ProtocolConfig& cfg);

/// `t,S,mass,event_flag`
void write_protocol_csv(std::ostream& os, const ProtocolResult& result);

struct TumorSweepRow {
  double beta, sigma, t0;
  int dS_sign, dmass_sign;
  double boundary_rhs_min;
};

/// Single-event protocol over the cross product (beta, sigma, t0); runs in parallel over `workers` threads.
std::vector<TumorSweepRow> tumor_sweep(const Problem& p, std::span<const double> betas, std::span<const double> sigmas,
                                       std::span<const double> t0s, const ProtocolConfig& cfg, unsigned workers = 0);

/// `beta,sigma,t0,dS_sign,dmass_sign,boundary_rhs_min`
void write_tumor_sweep_csv(std::ostream& os, std::span<const TumorSweepRow> rows);

}  // namespace kpplab
