#include "kpplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "kpplab/csv.hpp"
#include "kpplab/error.hpp"

namespace kpplab {

std::vector<double> uniform_times(double t0, double t1, double step) {
  if (!(step > 0.0)) throw InvalidArgument("time comb step must be positive");
  if (t1 < t0) throw InvalidArgument("time comb end precedes its start");
  std::vector<double> ts;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
  ts.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) ts.push_back(t0 + static_cast<double>(i) * step);
  return ts;
}

// ReactionDiffusionOperator ------------------------------------------------------

ReactionDiffusionOperator::ReactionDiffusionOperator(const Grid& grid, const CoefficientField& coefficient,
                                                     const Reaction& reaction)
    : grid_(grid), reaction_(reaction) {
  const std::size_t n = grid.nodes_per_axis();
  const double h = grid.h();
  points_.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) points_[k] = grid.point(k);

  auto check_face = [&](double a, Point at) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw InvalidArgument(fmt::format("diffusivity {} at ({}, {}) is not positive", a, at.x, at.y));
    }
    max_face_ = std::max(max_face_, a);
    return a;
  };

  if (grid.dim() == 1) {
    face_east_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const Point at{grid.origin() + (static_cast<double>(i) - 0.5) * h, 0.0};
      face_east_[i] = check_face(coefficient(at), at);
    }
  } else {
    face_east_.resize((n + 1) * n);
    face_north_.resize((n + 1) * n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i <= n; ++i) {
        const Point at{grid.origin() + (static_cast<double>(i) - 0.5) * h, grid.coord(j)};
        face_east_[j * (n + 1) + i] = check_face(coefficient(at), at);
      }
    }
    for (std::size_t j = 0; j <= n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const Point at{grid.coord(i), grid.origin() + (static_cast<double>(j) - 0.5) * h};
        face_north_[j * n + i] = check_face(coefficient(at), at);
      }
    }
  }
}

void ReactionDiffusionOperator::diffusion(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = grid_.nodes_per_axis();
  const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
  if (grid_.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? u[i - 1] : 0.0;
      const double right = i + 1 < n ? u[i + 1] : 0.0;
      out[i] = (face_east_[i + 1] * (right - u[i]) - face_east_[i] * (u[i] - left)) * inv_h2;
    }
    return;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = j * n + i;
      const double w = i > 0 ? u[k - 1] : 0.0;
      const double e = i + 1 < n ? u[k + 1] : 0.0;
      const double s = j > 0 ? u[k - n] : 0.0;
      const double nn = j + 1 < n ? u[k + n] : 0.0;
      const double fx = face_east_[j * (n + 1) + i + 1] * (e - u[k]) - face_east_[j * (n + 1) + i] * (u[k] - w);
      const double fy = face_north_[(j + 1) * n + i] * (nn - u[k]) - face_north_[j * n + i] * (u[k] - s);
      out[k] = (fx + fy) * inv_h2;
    }
  }
}

void ReactionDiffusionOperator::rhs(std::span<const double> u, std::span<double> out) const {
  diffusion(u, out);
  if (reaction_.kind() == Reaction::Kind::none) return;
  for (std::size_t k = 0; k < u.size(); ++k) out[k] += reaction_(points_[k], u[k]);
}

GridFunction ReactionDiffusionOperator::rhs(const GridFunction& u) const {
  GridFunction out(grid_);
  rhs(u.values(), out.values());
  return out;
}

double ReactionDiffusionOperator::explicit_limit() const {
  return grid_.h() * grid_.h() / (2.0 * grid_.dim() * max_face_);
}

void ReactionDiffusionOperator::implicit_diffusion_solve(std::span<const double> b, double dt,
                                                         std::span<double> x) const {
  if (grid_.dim() != 1) throw InvalidArgument("implicit diffusion is available in one dimension only");
  const std::size_t n = grid_.nodes_per_axis();
  const double c = dt / (grid_.h() * grid_.h());
  // Thomas algorithm; the matrix is a diagonally dominant M-matrix.
  std::vector<double> cp(n);
  std::vector<double> dp(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lower = i > 0 ? -c * face_east_[i] : 0.0;
    const double upper = i + 1 < n ? -c * face_east_[i + 1] : 0.0;
    const double diag = 1.0 + c * (face_east_[i] + face_east_[i + 1]);
    const double denom = i > 0 ? diag - lower * cp[i - 1] : diag;
    cp[i] = upper / denom;
    dp[i] = (b[i] - (i > 0 ? lower * dp[i - 1] : 0.0)) / denom;
  }
  x[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
}

double ReactionDiffusionOperator::reaction_lipschitz() const {
  if (reaction_.kind() == Reaction::Kind::none) return 0.0;
  const std::size_t stride = std::max<std::size_t>(1, points_.size() / 256);
  constexpr int levels = 64;
  double lip = 0.0;
  for (std::size_t k = 0; k < points_.size(); k += stride) {
    double prev = reaction_(points_[k], 0.0);
    for (int l = 1; l <= levels; ++l) {
      const double u = static_cast<double>(l) / levels;
      const double f = reaction_(points_[k], u);
      lip = std::max(lip, std::abs(f - prev) * levels);
      prev = f;
    }
  }
  return lip;
}

// TimeIntegrator ------------------------------------------------------------------

TimeIntegrator::TimeIntegrator(const Grid& grid, const CoefficientField& coefficient, const Reaction& reaction,
                               Scheme scheme, std::optional<double> dt, StateBounds bounds)
    : op_(grid, coefficient, reaction), scheme_(scheme), bounds_(bounds) {
  if (scheme == Scheme::imex && grid.dim() != 1) throw InvalidArgument("the imex scheme supports dimension 1 only");
  const double limit = op_.explicit_limit();
  if (scheme == Scheme::explicit_euler) {
    if (dt) {
      if (!(*dt > 0.0)) throw InvalidArgument("dt must be positive");
      if (*dt > limit * (1.0 + 1e-12)) {
        throw NumericalError(fmt::format("stability violation: dt = {} exceeds h^2/(2 dim sup a) = {}", *dt, limit));
      }
      dt_ = *dt;
    } else {
      dt_ = 0.9 * limit;
    }
  } else {
    const double lip = op_.reaction_lipschitz();
    if (dt) {
      if (!(*dt > 0.0)) throw InvalidArgument("dt must be positive");
      if (*dt * lip > 1.0 + 1e-12) {
        throw NumericalError(fmt::format("stability violation: dt = {} exceeds 1 / Lip(f) = {}", *dt, 1.0 / lip));
      }
      dt_ = *dt;
    } else {
      dt_ = 0.9 / std::max(lip, 1.0);
    }
  }
  scratch_.resize(grid.size());
  scratch2_.resize(grid.size());
}

void TimeIntegrator::step(std::span<double> u, double dt) const {
  if (scheme_ == Scheme::explicit_euler) {
    op_.rhs(u, scratch_);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += dt * scratch_[k];
    return;
  }
  // Explicit reaction, implicit diffusion.
  op_.rhs(u, scratch_);
  op_.diffusion(u, scratch2_);
  for (std::size_t k = 0; k < u.size(); ++k) scratch_[k] = u[k] + dt * (scratch_[k] - scratch2_[k]);
  op_.implicit_diffusion_solve(scratch_, dt, u);
}

void TimeIntegrator::check_state(std::span<const double> u, double t) const {
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = u[k];
    if (!std::isfinite(v)) {
      throw NumericalError(fmt::format("non-finite value {} at node {} (t = {})", v, k, t));
    }
    const bool low = v < -kMaximumPrincipleSlack;
    const bool high = bounds_ == StateBounds::unit_interval && v > 1.0 + kMaximumPrincipleSlack;
    if (low || high) {
      throw NumericalError(fmt::format("maximum principle violated: u = {} at node {} (t = {})", v, k, t));
    }
  }
}

void TimeIntegrator::advance(GridFunction& u, double t_from, double t_to) const {
  if (t_to < t_from) throw InvalidArgument("cannot integrate backwards in time");
  if (t_to == t_from) return;
  const double span = t_to - t_from;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_ - 1e-9)));
  const double sub = span / static_cast<double>(steps);
  auto values = u.values();
  for (std::size_t s = 0; s < steps; ++s) {
    step(values, sub);
    check_state(values, t_from + static_cast<double>(s + 1) * sub);
  }
}

GridFunction step(const GridFunction& state, double t, const Problem& p, const SolverConfig& cfg) {
  p.check();
  TimeIntegrator integ(state.grid(), p.coefficient, p.reaction, cfg.scheme, cfg.dt);
  GridFunction out = state;
  integ.step(out.values(), integ.dt());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!std::isfinite(out[k])) throw NumericalError(fmt::format("non-finite value after step at t = {}", t));
    if (out[k] < -kMaximumPrincipleSlack || out[k] > 1.0 + kMaximumPrincipleSlack) {
      throw NumericalError(fmt::format("maximum principle violated after step at t = {}: u = {}", t, out[k]));
    }
  }
  return out;
}

// solve ---------------------------------------------------------------------------

const Snapshot* Trajectory::at(double t, double tolerance) const {
  for (const auto& s : snapshots) {
    if (std::abs(s.t - t) <= tolerance) return &s;
  }
  return nullptr;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> ts;
  ts.reserve(snapshots.size());
  for (const auto& s : snapshots) ts.push_back(s.t);
  return ts;
}

namespace {

std::vector<double> checked_times(std::vector<double> ts, double t_final) {
  if (ts.empty()) ts.push_back(t_final);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < 0.0 || ts[i] > t_final * (1.0 + 1e-12) + 1e-12) {
      throw InvalidArgument(fmt::format("snapshot time {} outside [0, {}]", ts[i], t_final));
    }
    if (i > 0 && !(ts[i] > ts[i - 1])) throw InvalidArgument("snapshot times must be strictly increasing");
  }
  return ts;
}

void monitor_leak(Trajectory& traj, const GridFunction& u, double t) {
  const double edge = u.edge_max();
  traj.max_boundary_value = std::max(traj.max_boundary_value, edge);
  if (edge > traj.config.boundary_leak_abort) {
    throw NumericalError(fmt::format("boundary value {} at t = {} exceeds the abort threshold {}; domain too small",
                                     edge, t, traj.config.boundary_leak_abort));
  }
  if (edge > traj.config.boundary_leak_tolerance && traj.warnings.empty()) {
    traj.warnings.push_back(fmt::format("boundary leak: value {} at t = {} exceeds tolerance {}", edge, t,
                                        traj.config.boundary_leak_tolerance));
  }
}

}  // namespace

Trajectory solve_from(const Problem& p, const SolverConfig& cfg, const GridFunction& initial) {
  p.check();
  if (!(cfg.t_final > 0.0)) throw InvalidArgument("t_final must be positive");
  const Grid grid = Grid::symmetric(p.dimension, p.half_width, cfg.h);
  if (!(initial.grid() == grid)) throw InvalidArgument("initial state does not live on the problem grid");

  Trajectory traj{p, cfg, 0.0, {}, {}, 0.0};
  traj.config.snapshot_times = checked_times(cfg.snapshot_times, cfg.t_final);
  TimeIntegrator integ(grid, p.coefficient, p.reaction, cfg.scheme, cfg.dt);
  traj.dt = integ.dt();

  GridFunction u = initial;
  double t = 0.0;
  for (double ts : traj.config.snapshot_times) {
    integ.advance(u, t, ts);
    t = ts;
    monitor_leak(traj, u, t);
    traj.snapshots.push_back(Snapshot{t, u, integ.rhs(u)});
  }
  if (t < cfg.t_final) {
    integ.advance(u, t, cfg.t_final);
    monitor_leak(traj, u, cfg.t_final);
  }
  return traj;
}

Trajectory solve(const Problem& p, const SolverConfig& cfg) {
  p.check();
  const Grid grid = Grid::symmetric(p.dimension, p.half_width, cfg.h);
  return solve_from(p, cfg, make_initial(p.initial, grid));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const bool two_d = traj.problem.dimension == 2;
  if (two_d) {
    csv::header(os, {"t", "x", "y", "u", "rhs"});
  } else {
    csv::header(os, {"t", "x", "u", "rhs"});
  }
  for (const auto& s : traj.snapshots) {
    const Grid& g = s.u.grid();
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      const Point x = g.point(k);
      if (two_d) {
        csv::row(os, {s.t, x.x, x.y, s.u[k], s.rhs[k]});
      } else {
        csv::row(os, {s.t, x.x, s.u[k], s.rhs[k]});
      }
    }
  }
}

// Fundamental solution -------------------------------------------------------------

const GridFunction& FundamentalSolution::at(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, t)) return kernels[i];
  }
  throw InvalidArgument(fmt::format("no kernel stored at t = {}", t));
}

FundamentalSolution fundamental_solution(const CoefficientField& coefficient, std::span<const double> t_targets,
                                         Point source, const Grid& grid, const KernelRunOptions& opts) {
  if (t_targets.empty()) throw InvalidArgument("no target times");
  auto src = grid.flat_index_of(source);
  if (!src) throw InvalidArgument(fmt::format("source ({}, {}) is not a grid node", source.x, source.y));

  std::vector<double> ts(t_targets.begin(), t_targets.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (!(ts.front() > 0.0)) throw InvalidArgument("kernel target times must be positive");

  TimeIntegrator integ(grid, coefficient, Reaction::none(), Scheme::explicit_euler, opts.dt, StateBounds::nonnegative);
  GridFunction p(grid);
  p[*src] = 1.0 / grid.cell_volume();

  FundamentalSolution out;
  out.source = source;
  out.dt = integ.dt();
  double t = 0.0;
  for (double target : ts) {
    integ.advance(p, t, target);
    t = target;
    double mass = 0.0;
    for (double v : p.values()) mass += v;
    mass *= grid.cell_volume();
    if (std::abs(mass - 1.0) > opts.mass_tolerance) {
      throw NumericalError(fmt::format("kernel mass {} at t = {} deviates from 1 by more than {}; truncation too tight",
                                       mass, t, opts.mass_tolerance));
    }
    out.times.push_back(t);
    out.kernels.push_back(p);
    out.mass.push_back(mass);
  }
  return out;
}

}  // namespace kpplab
