#include "kpplab/tumor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "kpplab/csv.hpp"
#include "kpplab/error.hpp"

namespace kpplab {

void TreatmentSchedule::check() const {
  if (!(sigma_img > 0.0 && sigma_img < 1.0)) throw InvalidArgument(fmt::format("sigma_img = {} is outside (0, 1)", sigma_img));
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.t > 0.0)) throw InvalidArgument(fmt::format("treatment time {} must be positive", e.t));
    if (!(e.beta > 0.0 && e.beta < 1.0)) throw InvalidArgument(fmt::format("beta = {} is outside (0, 1)", e.beta));
    if (i > 0 && !(e.t > events[i - 1].t)) throw InvalidArgument("treatment times must strictly increase");
  }
}

GridFunction apply_treatment(const GridFunction& state, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument(fmt::format("beta = {} is outside (0, 1]", beta));
  GridFunction out = state;
  for (auto& v : out.values()) v *= beta;
  return out;
}

double observed_size(const GridFunction& state, double sigma) {
  const Grid& g = state.grid();
  const std::size_t n = g.nodes_per_axis();
  const double h = g.h();
  double size = 0.0;
  if (g.dim() == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a = state[i];
      const double b = state[i + 1];
      if (a > sigma && b > sigma) {
        size += h;
      } else if (a > sigma) {
        size += h * (a - sigma) / (a - b);
      } else if (b > sigma) {
        size += h * (b - sigma) / (b - a);
      }
    }
    return size;
  }
  constexpr int sub = 16;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double c00 = state[j * n + i];
      const double c10 = state[j * n + i + 1];
      const double c01 = state[(j + 1) * n + i];
      const double c11 = state[(j + 1) * n + i + 1];
      const double lo = std::min({c00, c10, c01, c11});
      const double hi = std::max({c00, c10, c01, c11});
      if (lo > sigma) {
        size += h * h;
        continue;
      }
      if (hi <= sigma) continue;
      int inside = 0;
      for (int q = 0; q < sub; ++q) {
        const double sy = (q + 0.5) / sub;
        for (int r = 0; r < sub; ++r) {
          const double sx = (r + 0.5) / sub;
          const double v = (1 - sx) * (1 - sy) * c00 + sx * (1 - sy) * c10 + (1 - sx) * sy * c01 + sx * sy * c11;
          if (v > sigma) ++inside;
        }
      }
      size += h * h * inside / static_cast<double>(sub * sub);
    }
  }
  return size;
}

double total_mass(const GridFunction& state) {
  const Grid& g = state.grid();
  const std::size_t n = g.nodes_per_axis();
  auto w = [&](std::size_t i) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; };
  double acc = 0.0;
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) acc += w(i) * state[i];
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) acc += w(i) * w(j) * state[j * n + i];
    }
  }
  return acc * g.cell_volume();
}

std::vector<LevelCrossing> level_crossings(const GridFunction& state, double level) {
  const Grid& g = state.grid();
  const std::size_t n = g.nodes_per_axis();
  std::vector<LevelCrossing> out;
  auto edge = [&](std::size_t k0, std::size_t k1) {
    const bool above0 = state[k0] > level;
    if (above0 == (state[k1] > level)) return;
    const std::size_t from = above0 ? k0 : k1;
    const std::size_t to = above0 ? k1 : k0;
    const double uf = state[from];
    const double ut = state[to];
    LevelCrossing c;
    c.from = from;
    c.to = to;
    c.weight = (uf - level) / (uf - ut);
    const Point pf = g.point(from);
    const Point pt = g.point(to);
    c.x = Point{(1 - c.weight) * pf.x + c.weight * pt.x, (1 - c.weight) * pf.y + c.weight * pt.y};
    c.slope = std::abs(ut - uf) / g.h();
    out.push_back(c);
  };
  if (g.dim() == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) edge(i, i + 1);
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n) edge(j * n + i, j * n + i + 1);
        if (j + 1 < n) edge(j * n + i, (j + 1) * n + i);
      }
    }
  }
  return out;
}

double interpolate_at(const GridFunction& field, const LevelCrossing& c) {
  return (1.0 - c.weight) * field[c.from] + c.weight * field[c.to];
}

JumpResidual jump_identity_residual(const GridFunction& state_before, const GridFunction& rhs_before, double beta,
                                    const Problem& p) {
  const auto rate = p.reaction.logistic_rate();
  if (!rate) throw HypothesisMismatch(fmt::format("jump identity needs a homogeneous logistic reaction, got '{}'", p.reaction.label()));
  const ReactionDiffusionOperator op(state_before.grid(), p.coefficient, p.reaction);
  const GridFunction after = apply_treatment(state_before, beta);
  GridFunction res = op.rhs(after);
  double max_abs = 0.0;
  for (std::size_t k = 0; k < res.size(); ++k) {
    const double u = state_before[k];
    res[k] -= beta * rhs_before[k] + *rate * beta * (1.0 - beta) * u * u;
    max_abs = std::max(max_abs, std::abs(res[k]));
  }
  return JumpResidual{std::move(res), max_abs};
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

struct TimePoint {
  double t;
  const TreatmentEvent* event;
};

std::vector<TimePoint> protocol_times(const TreatmentSchedule& sched, double t_final, double comb) {
  std::vector<TimePoint> pts;
  for (double t : uniform_times(0.0, t_final, comb)) pts.push_back({t, nullptr});
  for (const auto& e : sched.events) {
    if (e.t > t_final + 1e-9) throw InvalidArgument(fmt::format("treatment at t = {} lies after t_final = {}", e.t, t_final));
    auto it = std::find_if(pts.begin(), pts.end(), [&](const TimePoint& p) { return std::abs(p.t - e.t) <= 1e-9; });
    if (it != pts.end()) {
      *it = {e.t, &e};
    } else {
      pts.push_back({e.t, &e});
    }
  }
  std::sort(pts.begin(), pts.end(), [](const TimePoint& a, const TimePoint& b) { return a.t < b.t; });
  return pts;
}

}  // namespace

ProtocolResult run_protocol(const Problem& p, const TreatmentSchedule& sched, const ProtocolConfig& cfg) {
  p.check();
  sched.check();
  if (!(cfg.comb > 0.0)) throw InvalidArgument("comb spacing must be positive");
  if (!(cfg.solver.t_final > 0.0)) throw InvalidArgument("t_final must be positive");
  const Grid grid = Grid::symmetric(p.dimension, p.half_width, cfg.solver.h);
  const TimeIntegrator integ(grid, p.coefficient, p.reaction, cfg.solver.scheme, cfg.solver.dt);
  const double sigma = sched.sigma_img;

  ProtocolResult res;
  GridFunction u = make_initial(p.initial, grid);
  bool leak_warned = false;
  auto record = [&](double t, int flag) { res.samples.push_back({t, observed_size(u, sigma), total_mass(u), flag}); };

  double t = 0.0;
  for (const auto& tp : protocol_times(sched, cfg.solver.t_final, cfg.comb)) {
    integ.advance(u, t, tp.t);
    t = tp.t;
    const double edge = u.edge_max();
    if (edge > cfg.solver.boundary_leak_abort) {
      throw NumericalError(fmt::format("boundary value {} exceeds the abort threshold at t = {}", edge, t));
    }
    if (edge > cfg.solver.boundary_leak_tolerance && !leak_warned) {
      res.warnings.push_back(fmt::format("boundary value {} exceeds the leak tolerance at t = {}", edge, t));
      leak_warned = true;
    }
    if (!tp.event) {
      record(t, 0);
      if (!res.events.empty()) {
        auto& last = res.events.back();
        last.S_after_comb.push_back(res.samples.back().S);
        if (last.S_after_comb.size() == 1) {
          last.dS_sign = sign_of(res.samples.back().S - last.S_after);
          last.dmass_sign = sign_of(res.samples.back().mass - last.mass_after);
        }
      }
      continue;
    }

    const double beta = tp.event->beta;
    record(t, -1);
    const GridFunction before = u;
    const GridFunction rhs_before = integ.rhs(before);
    u = apply_treatment(before, beta);
    record(t, +1);
    const GridFunction rhs_after = integ.rhs(u);

    EventDiagnostics ev;
    ev.t = t;
    ev.beta = beta;
    ev.S_before = res.samples[res.samples.size() - 2].S;
    ev.mass_before = res.samples[res.samples.size() - 2].mass;
    ev.S_after = res.samples.back().S;
    ev.mass_after = res.samples.back().mass;
    ev.boundary_rhs_min = std::numeric_limits<double>::infinity();
    for (const auto& c : level_crossings(u, sigma)) {
      ev.boundary.push_back(c.x);
      const double rb = interpolate_at(rhs_before, c);
      ev.boundary_rhs_before.push_back(rb);
      ev.boundary_rhs_after.push_back(interpolate_at(rhs_after, c));
      ev.boundary_rhs_min = std::min(ev.boundary_rhs_min, rb);
      if (c.slope < cfg.grazing_slope) ++ev.grazing;
    }
    ev.jump_residual = p.reaction.logistic_rate() ? jump_identity_residual(before, rhs_before, beta, p).max_abs
                                                  : std::numeric_limits<double>::quiet_NaN();
    if (ev.boundary.empty()) {
      res.warnings.push_back(fmt::format("no cells above sigma = {} after the treatment at t = {}", sigma, t));
    } else if (!(ev.boundary_rhs_min > 0.0)) {
      res.warnings.push_back(fmt::format("pre-treatment rhs {} <= 0 on the imaged boundary at t = {}",
                                         ev.boundary_rhs_min, t));
    }
    if (ev.grazing > 0) {
      res.warnings.push_back(fmt::format("{} grazing boundary crossings at t = {}", ev.grazing, t));
    }
    res.events.push_back(std::move(ev));
  }
  return res;
}

void write_protocol_csv(std::ostream& os, const ProtocolResult& result) {
  csv::header(os, {"t", "S", "mass", "event_flag"});
  for (const auto& s : result.samples) csv::row(os, {s.t, s.S, s.mass, static_cast<double>(s.event_flag)});
}

std::vector<TumorSweepRow> tumor_sweep(const Problem& p, std::span<const double> betas, std::span<const double> sigmas,
                                       std::span<const double> t0s, const ProtocolConfig& cfg, unsigned workers) {
  struct Job {
    double beta, sigma, t0;
  };
  std::vector<Job> jobs;
  for (double b : betas) {
    for (double s : sigmas) {
      for (double t0 : t0s) jobs.push_back({b, s, t0});
    }
  }
  std::vector<TumorSweepRow> rows(jobs.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const Job& j = jobs[i];
        ProtocolConfig c = cfg;
        c.solver.t_final = std::max(cfg.solver.t_final, j.t0 + cfg.comb);
        const auto r = run_protocol(p, TreatmentSchedule{{TreatmentEvent{j.t0, j.beta}}, j.sigma}, c);
        const auto& ev = r.events.front();
        rows[i] = TumorSweepRow{j.beta, j.sigma, j.t0, ev.dS_sign, ev.dmass_sign, ev.boundary_rhs_min};
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_tumor_sweep_csv(std::ostream& os, std::span<const TumorSweepRow> rows) {
  csv::header(os, {"beta", "sigma", "t0", "dS_sign", "dmass_sign", "boundary_rhs_min"});
  for (const auto& r : rows) {
    csv::row(os, {r.beta, r.sigma, r.t0, static_cast<double>(r.dS_sign), static_cast<double>(r.dmass_sign),
                  r.boundary_rhs_min});
  }
}

}  // namespace kpplab
