#include "kpplab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "kpplab/csv.hpp"
#include "kpplab/error.hpp"

namespace kpplab {

namespace {

bool saturated(double u) { return 1.0 - u < kOneFloor; }

// rhs > 0 wherever the state is neither in the zero tail nor saturated at 1.
bool positive_where_active(const Snapshot& s, double u_min) {
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    const double u = s.u[k];
    if (u < u_min || u <= kZeroFloor || saturated(u)) continue;
    if (!(s.rhs[k] > 0.0)) return false;
  }
  return true;
}

bool ordered(const GridFunction& later, const GridFunction& earlier) {
  for (std::size_t k = 0; k < later.size(); ++k) {
    if (later[k] < earlier[k] - kOrderSlack) return false;
  }
  return true;
}

// First index from which pred holds on every later element; size() when the last fails.
template <class Pred>
std::size_t first_of_suffix(std::size_t count, Pred pred) {
  std::size_t first = count;
  for (std::size_t i = count; i-- > 0;) {
    if (!pred(i)) break;
    first = i;
  }
  return first;
}

double interpolate_1d(const GridFunction& f, double x) {
  const Grid& g = f.grid();
  if (x < g.lower() || x > g.upper()) return std::nan("");
  const double s = (x - g.lower()) / g.h();
  const auto i = std::min(static_cast<std::size_t>(s), g.nodes_per_axis() - 2);
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * f[i] + w * f[i + 1];
}

}  // namespace

double level_position(const GridFunction& snapshot, double level, Side side) {
  const std::vector<double> u = snapshot.centerline();
  const Grid& g = snapshot.grid();
  const std::size_t n = u.size();
  auto crosses = [&](std::size_t i) { return (u[i] >= level) != (u[i + 1] >= level); };
  auto at = [&](std::size_t i) { return g.coord(i) + g.h() * (u[i] - level) / (u[i] - u[i + 1]); };
  if (side == Side::right) {
    for (std::size_t i = n - 1; i-- > 0;) {
      if (crosses(i)) return at(i);
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (crosses(i)) return at(i);
    }
  }
  throw InsufficientData(fmt::format("no crossing of level {}", level));
}

SpeedFit spreading_speed(const Trajectory& traj, double level, double t_begin, double t_end) {
  SpeedFit fit;
  for (const auto& s : traj.snapshots) {
    if (s.t < t_begin - 1e-9 || s.t > t_end + 1e-9) continue;
    if (s.u.centerline().back() >= level) continue;  // front has left the domain
    try {
      fit.positions.push_back(level_position(s.u, level, Side::right));
      fit.times.push_back(s.t);
    } catch (const InsufficientData&) {
    }
  }
  const std::size_t m = fit.times.size();
  if (m < 5) throw InsufficientData(fmt::format("only {} level crossings in [{}, {}]", m, t_begin, t_end));
  double mt = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mt += fit.times[i];
    mx += fit.positions[i];
  }
  mt /= static_cast<double>(m);
  mx /= static_cast<double>(m);
  double stt = 0.0, stx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    stt += (fit.times[i] - mt) * (fit.times[i] - mt);
    stx += (fit.times[i] - mt) * (fit.positions[i] - mx);
  }
  fit.speed = stx / stt;
  fit.intercept = mx - fit.speed * mt;
  return fit;
}

double find_T_monotone(const Trajectory& traj) {
  const Snapshot* base = traj.at(1.0);
  if (!base) throw InvalidArgument("find_T_monotone needs a snapshot at t = 1");
  std::vector<const Snapshot*> later;
  for (const auto& s : traj.snapshots) {
    if (s.t >= base->t - 1e-9) later.push_back(&s);
  }
  const std::size_t first =
      first_of_suffix(later.size(), [&](std::size_t i) { return ordered(later[i]->u, base->u); });
  if (first == later.size()) return kNever;
  return later[first]->t - base->t;
}

double estimate_tau_star(const Trajectory& traj, double t_floor) {
  std::vector<const Snapshot*> comb;
  for (const auto& s : traj.snapshots) {
    if (s.t >= t_floor - 1e-9) comb.push_back(&s);
  }
  const std::size_t m = comb.size();
  if (m < 20) throw InsufficientData(fmt::format("tau* estimate needs 20 comb times after {}, got {}", t_floor, m));
  const double delta = comb[1]->t - comb[0]->t;
  for (std::size_t i = 1; i < m; ++i) {
    if (std::abs(comb[i]->t - comb[i - 1]->t - delta) > 1e-6 * delta) {
      throw InsufficientData("tau* estimate needs a uniform comb");
    }
  }
  auto shift_ok = [&](std::size_t k) {
    for (std::size_t i = 0; i + k < m; ++i) {
      if (!ordered(comb[i + k]->u, comb[i]->u)) return false;
    }
    return true;
  };
  // Shifts 1..m-1 map to indices 0..m-2.
  const std::size_t first = first_of_suffix(m - 1, [&](std::size_t i) { return shift_ok(i + 1); });
  if (first == m - 1) return kNever;
  return static_cast<double>(first + 1) * delta;
}

MonotonicityCertificate theorem1_report(const Trajectory& traj, std::span<const double> eps_list) {
  if (traj.snapshots.empty()) throw InsufficientData("trajectory has no snapshots");
  MonotonicityCertificate cert;
  bool in_bounds = true;
  for (const auto& s : traj.snapshots) {
    cert.times.push_back(s.t);
    cert.min_rhs.push_back(s.rhs.min());
    double inf = 0.0;
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      if (!saturated(s.u[k])) inf = std::min(inf, s.rhs[k]);
    }
    cert.inf_rhs.push_back(inf);
    in_bounds = in_bounds && s.u.min() >= -kMaximumPrincipleSlack && s.u.max() <= 1.0 + kMaximumPrincipleSlack;
  }
  cert.tail_inf_abs = std::abs(cert.inf_rhs.back());

  const std::size_t n = traj.snapshots.size();
  bool all_eps = !eps_list.empty();
  for (double eps : eps_list) {
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument(fmt::format("eps = {} is outside (0, 1]", eps));
    EpsilonCertificate ec;
    ec.eps = eps;
    const std::size_t first =
        first_of_suffix(n, [&](std::size_t i) { return positive_where_active(traj.snapshots[i], eps); });
    if (first < n) {
      ec.T_eps = traj.snapshots[first].t;
      ec.pass = true;
      ec.checked_snapshots = n - first;
      for (std::size_t i = first; i < n; ++i) {
        const auto& u = traj.snapshots[i].u;
        for (std::size_t k = 0; k < u.size(); ++k) {
          if (u[k] >= eps && !saturated(u[k])) ++ec.qualifying_points;
        }
      }
    }
    all_eps = all_eps && ec.pass;
    cert.eps.push_back(ec);
  }

  if (traj.at(1.0)) cert.T_mono = find_T_monotone(traj);
  try {
    cert.tau_star_estimate = estimate_tau_star(traj, 1.0);
  } catch (const InsufficientData&) {
  }
  cert.global_positivity_observed = positive_where_active(traj.snapshots.back(), 0.0);

  cert.verdicts["maximum_principle"] = in_bounds;
  cert.verdicts["eps_certified"] = all_eps;
  cert.verdicts["T_mono_finite"] = std::isfinite(cert.T_mono);
  cert.verdicts["inf_rhs_tail_decreasing"] = cert.tail_inf_abs <= std::abs(cert.inf_rhs[n / 2]);
  return cert;
}

double theorem2_T0(double rate_minus, double rate_plus) {
  return std::max(t0_threshold(rate_minus), t0_threshold(rate_plus));
}

GlobalMonotonicityClass theorem2_class(const Problem& p) {
  if (p.dimension != 1) throw HypothesisMismatch("the global monotonicity class is one-dimensional");
  const auto ff = p.coefficient.far_field();
  if (!ff) throw HypothesisMismatch(fmt::format("coefficient '{}' is not constant outside a bounded interval", p.coefficient.label()));
  const auto claim = p.reaction.linear_near_zero();
  if (!claim) throw HypothesisMismatch(fmt::format("reaction '{}' is not linear near zero", p.reaction.label()));
  if (!(claim->rate_minus > 0.0 && claim->rate_plus > 0.0 && claim->theta > 0.0 && claim->theta < 1.0)) {
    throw HypothesisMismatch("linear-near-zero claim needs positive rates and theta in (0, 1)");
  }

  GlobalMonotonicityClass cls{claim->rate_minus, claim->rate_plus, claim->theta,
                    std::max(ff->radius, p.reaction.radius()), ff->minus, ff->plus};
  const double R = cls.radius;
  for (double off : {0.0, 0.5, 1.0, 3.0, 10.0, 100.0}) {
    for (double sign : {-1.0, 1.0}) {
      const Point x{sign * (R + off), 0.0};
      const double rate = sign < 0 ? cls.rate_minus : cls.rate_plus;
      const double a = sign < 0 ? cls.a_minus : cls.a_plus;
      if (std::abs(p.coefficient(x) - a) > 1e-12 * a) {
        throw HypothesisMismatch(fmt::format("a({}) = {} differs from the far-field value {}", x.x, p.coefficient(x), a));
      }
      for (int j = 0; j <= 20; ++j) {
        const double u = cls.theta * j / 20.0;
        const double f = p.reaction(x, u);
        if (std::abs(f - rate * u) > 1e-12 * std::max(1.0, rate * u)) {
          throw HypothesisMismatch(fmt::format("f({}, {}) = {} differs from {} u", x.x, u, f, rate));
        }
      }
    }
  }
  return cls;
}

GlobalMonotonicity theorem2_report(const Trajectory& traj) {
  GlobalMonotonicity gm;
  gm.params = theorem2_class(traj.problem);
  gm.T0 = theorem2_T0(gm.params.rate_minus, gm.params.rate_plus);
  const std::size_t n = traj.snapshots.size();
  const std::size_t first = first_of_suffix(n, [&](std::size_t i) { return positive_where_active(traj.snapshots[i], 0.0); });
  if (first < n) {
    gm.tau_global = traj.snapshots[first].t;
    gm.checked_snapshots = n - first;
  }
  return gm;
}

HarnackFit harnack_constant(const Trajectory& traj, const GlobalMonotonicityClass& cls, double T0, const HarnackWindow& w) {
  if (!(T0 > 0.0)) throw InvalidArgument("Harnack shift T0 must be positive");
  HarnackFit fit;
  fit.T0 = T0;
  fit.shift_minus = std::sqrt(8.0 * cls.a_minus * T0);
  fit.shift_plus = std::sqrt(8.0 * cls.a_plus * T0);
  fit.C = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snapshots) {
    if (s.t < w.t_min - 1e-9) continue;
    const Snapshot* later = traj.at(s.t + T0, 1e-6);
    if (!later) continue;
    const Grid& g = s.u.grid();
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      const double x = g.coord(k);
      if (std::abs(x) > w.x_radius || s.u[k] < w.floor) continue;
      for (double target : {x + fit.shift_plus, x - fit.shift_minus}) {
        const double v = interpolate_1d(later->u, target);
        if (std::isnan(v)) continue;
        fit.C = std::min(fit.C, v / s.u[k]);
        ++fit.samples;
      }
    }
  }
  if (fit.samples == 0) throw InsufficientData("no snapshot pairs separated by T0 in the Harnack window");
  return fit;
}

Prop91Verdict prop91_verify(const HalfLineParams& pp, const std::function<double(double)>& v0,
                            const std::function<double(double)>& g, std::span<const double> t_grid,
                            const Prop91Setup& setup) {
  pp.check();
  if (t_grid.empty()) throw InvalidArgument("prop91 needs at least one time");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw InvalidArgument("prop91 times must be sorted");
  const double t_max = t_grid.back();
  double prev = g(0.0);
  if (prev < 0.0) throw InvalidArgument(fmt::format("boundary trace is negative at t = 0 ({})", prev));
  for (int i = 1; i <= 400; ++i) {
    const double t = t_max * i / 400.0;
    const double cur = g(t);
    if (cur < 0.0) throw InvalidArgument(fmt::format("boundary trace is negative at t = {} ({})", t, cur));
    if (cur < prev - 1e-14) throw InvalidArgument(fmt::format("boundary trace decreases near t = {}", t));
    prev = cur;
  }

  const auto nodes = static_cast<std::size_t>(std::llround(setup.extent / setup.h)) + 1;
  const double origin = setup.side == HalfLineSide::right ? 0.0 : -setup.extent;
  const Grid grid = Grid::interval(origin, setup.h, nodes);
  GridFunction init(grid);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double v = v0(std::abs(grid.coord(i)));
    if (v < 0.0) throw InvalidArgument("v0 must be nonnegative");
    init[i] = v;
  }
  const auto snaps = solve_half_line(pp.diffusivity, pp.rate, init, g, setup.side, t_grid);

  Prop91Verdict verdict;
  verdict.t0 = t0_threshold(pp.rate);
  verdict.min_rhs = std::numeric_limits<double>::infinity();
  for (const auto& s : snaps) {
    if (s.t < verdict.t0) continue;
    const double edge = positivity_edge(pp.diffusivity, s.t);
    const double reliable = setup.extent - setup.reliable_margin * std::sqrt(pp.diffusivity * s.t);
    for (std::size_t i = 1; i + 1 < nodes; ++i) {
      const double ax = std::abs(grid.coord(i));
      if (ax < edge || ax > reliable || s.v[i] <= kZeroFloor) continue;
      ++verdict.points;
      if (!(s.rhs[i] > 0.0)) ++verdict.violations;
      if (s.rhs[i] < verdict.min_rhs) {
        verdict.min_rhs = s.rhs[i];
        verdict.witness = std::pair{s.t, grid.coord(i)};
      }
    }
  }
  if (verdict.points == 0) throw InsufficientData("no sampled points in the reliable positivity region");
  verdict.pass = verdict.violations == 0;
  return verdict;
}

void write_certificate(std::ostream& os, const MonotonicityCertificate& cert) {
  auto num = [](double v) { return csv::number(v); };
  os << "# monotonicity certificate\n";
  os << "snapshots: " << cert.times.size() << "\n";
  os << "T_mono: " << num(cert.T_mono) << "\n";
  os << "tau_star_estimate: " << num(cert.tau_star_estimate) << "\n";
  os << "tail_inf_rhs_abs: " << num(cert.tail_inf_abs) << "\n";
  os << "global_positivity_observed: " << (cert.global_positivity_observed ? "true" : "false") << "\n";
  os << "eps:\n";
  for (const auto& e : cert.eps) {
    os << "  - eps: " << num(e.eps) << "\n";
    os << "    T_eps: " << num(e.T_eps) << "\n";
    os << "    pass: " << (e.pass ? "true" : "false") << "\n";
    os << "    checked_snapshots: " << e.checked_snapshots << "\n";
    os << "    qualifying_points: " << e.qualifying_points << "\n";
  }
  os << "verdicts:\n";
  for (const auto& [name, ok] : cert.verdicts) os << "  " << name << ": " << (ok ? "pass" : "fail") << "\n";
}

void write_inf_rhs_csv(std::ostream& os, const MonotonicityCertificate& cert) {
  csv::header(os, {"t", "inf_rhs"});
  for (std::size_t i = 0; i < cert.times.size(); ++i) csv::row(os, {cert.times[i], cert.inf_rhs[i]});
}

void write_t_eps_csv(std::ostream& os, const MonotonicityCertificate& cert) {
  csv::header(os, {"eps", "T_eps"});
  for (const auto& e : cert.eps) csv::row(os, {e.eps, e.T_eps});
}

void write_level_csv(std::ostream& os, const SpeedFit& fit) {
  csv::header(os, {"t", "level_pos"});
  for (std::size_t i = 0; i < fit.times.size(); ++i) csv::row(os, {fit.times[i], fit.positions[i]});
}

}  // namespace kpplab
