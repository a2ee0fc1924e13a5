#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpplab/grid.hpp"
#include "kpplab/kernels.hpp"
#include "kpplab/solver.hpp"

namespace kpplab {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Values below this are the far-field zero region, where the sign of u_t is meaningless.
inline constexpr double kZeroFloor = 1e-300;
/// Values with 1 - u below this are rounding-saturated at 1 and excluded from strict positivity checks.
inline constexpr double kOneFloor = 1e-10;
/// Slack of the ordering tests u(t + s) >= u(t) - slack.
inline constexpr double kOrderSlack = 1e-10;

enum class Side { left, right };

/// Outermost sign change of u - level between neighbouring nodes on the given side, with
/// linear sub-cell interpolation.
/// Operates along the centreline in 2D. Throws InsufficientData when there is no crossing.
double level_position(const GridFunction& snapshot, double level, Side side);

struct SpeedFit {
  double speed = 0.0;
  double intercept = 0.0;
  std::vector<double> times;
  std::vector<double> positions;
};

/// Least-squares slope of the right-side level position over snapshots in [t_begin, t_end]
/// whose right edge lies below the level.
/// Throws InsufficientData with fewer than 5 crossings.
SpeedFit spreading_speed(const Trajectory& traj, double level, double t_begin, double t_end);

/// Smallest snapshot-aligned shift T >= 0 with u(1 + t, .) >= u(1, .) - kOrderSlack for every
/// snapshot at 1 + t, t >= T. Returns kNever when even the last snapshot fails.
/// Throws InvalidArgument without a snapshot at t = 1.
double find_T_monotone(const Trajectory& traj);

/// Smallest comb shift tau such that every comb shift tau' >= tau satisfies
/// u(t + tau') >= u(t) - kOrderSlack for all comb times t >= t_floor.
/// Throws InsufficientData when the comb after t_floor has fewer than 20 times or is not uniform.
double estimate_tau_star(const Trajectory& traj, double t_floor);

struct EpsilonCertificate {
  double eps = 0.0;
  double T_eps = kNever;    // first snapshot time after which the implication holds throughout
  bool pass = false;
  std::size_t checked_snapshots = 0;
  std::size_t qualifying_points = 0;  // points with u >= eps on the certified snapshots
};

/// Certificate built from a trajectory.
struct MonotonicityCertificate {
  double T_mono = kNever;
  double tau_star_estimate = kNever;
  std::vector<EpsilonCertificate> eps;
  std::vector<double> times;
  /// inf of the rhs over the grid and its Dirichlet-zero extension, i.e. min(0, min_x rhs),
  /// taken over points not saturated at 1 (1 - u >= kOneFloor).
  std::vector<double> inf_rhs;
  /// min_x rhs over every grid point.
  std::vector<double> min_rhs;
  double tail_inf_abs = 0.0;  // |inf_rhs| at the last snapshot
  /// Whether rhs > 0 at every non-degenerate cell of the last snapshot (the open conjecture; reported only).
  bool global_positivity_observed = false;

  std::map<std::string, bool> verdicts;
};

/// For each eps: first snapshot T_eps after which every point with u >= eps has rhs > 0
/// (points saturated at 1 within kOneFloor excluded), on all later snapshots.
MonotonicityCertificate theorem1_report(const Trajectory& traj, std::span<const double> eps_list);

/// Parameters of the one-dimensional class with sidewise-linear reactions near zero.
struct GlobalMonotonicityClass {
  double rate_minus = 1.0;
  double rate_plus = 1.0;
  double theta = 0.5;
  double radius = 0.0;
  double a_minus = 1.0;
  double a_plus = 1.0;
};

/// Checks 1D, constant-outside-a-bounded-interval diffusion and a reaction sampled equal to
/// rate^± u on [0, theta] outside the transition zone. Throws HypothesisMismatch otherwise.
GlobalMonotonicityClass theorem2_class(const Problem& p);

struct GlobalMonotonicity {
  double tau_global = kNever;
  std::size_t checked_snapshots = 0;
  GlobalMonotonicityClass params;
  double T0 = 0.0;  // max of the half-line thresholds for rate^- and rate^+
};

/// Smallest snapshot time after which rhs > 0 at every cell outside the zero and
/// saturation regions on all later snapshots.
GlobalMonotonicity theorem2_report(const Trajectory& traj);

/// max(t0(rate^-), t0(rate^+)).
double theorem2_T0(double rate_minus, double rate_plus);

struct HarnackFit {
  double C = 0.0;
  std::size_t samples = 0;
  double T0 = 0.0;
  double shift_minus = 0.0;  // sqrt(8 a^- T0)
  double shift_plus = 0.0;   // sqrt(8 a^+ T0)
};

struct HarnackWindow {
  double t_min = 1.0;
  double x_radius = 30.0;
  double floor = 1e-200;
};

/// Empirical C = min u(t + T0, x ± sqrt(8 a^± T0)) / u(t, x) over snapshot times t >= t_min
/// whose shifted time is also a snapshot (linear interpolation in x).
HarnackFit harnack_constant(const Trajectory& traj, const GlobalMonotonicityClass& cls, double T0, const HarnackWindow& w = {});

struct Prop91Verdict {
  bool pass = false;
  double t0 = 0.0;
  std::size_t points = 0;
  std::size_t violations = 0;
  double min_rhs = 0.0;
  std::optional<std::pair<double, double>> witness;  // (t, x) of the smallest rhs
};

struct Prop91Setup {
  HalfLineSide side = HalfLineSide::right;
  double h = 0.05;
  double extent = 60.0;  // truncation length X
  /// Reliable sub-domain: |x| <= X - reliable_margin * sqrt(a t).
  double reliable_margin = 8.0;
};

/// Solves the linear half-line problem with boundary trace g and checks rhs > 0 at every
/// sampled (t, x) with t >= t0 and |x| >= sqrt(8 a t) inside the reliable sub-domain.
/// `v0` is a function of |x| on the half-line. Throws InvalidArgument when g is negative
/// or decreasing on its samples.
Prop91Verdict prop91_verify(const HalfLineParams& pp, const std::function<double(double)>& v0,
                            const std::function<double(double)>& g, std::span<const double> t_grid,
                            const Prop91Setup& setup = {});

/// Writes a structured text report and CSV curves (`t,inf_rhs`, `eps,T_eps`).
void write_certificate(std::ostream& os, const MonotonicityCertificate& cert);
void write_inf_rhs_csv(std::ostream& os, const MonotonicityCertificate& cert);
void write_t_eps_csv(std::ostream& os, const MonotonicityCertificate& cert);
void write_level_csv(std::ostream& os, const SpeedFit& fit);

}  // namespace kpplab
