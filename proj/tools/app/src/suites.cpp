#include "kpplab_app/suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include <fmt/format.h>

#include "kpplab/kpplab.hpp"

namespace kpplab::app {

namespace {

// Pinned parameters of the reference runs.
constexpr double kCombStep = 0.5;
constexpr double kHomogeneousFinal = 80.0;
constexpr double kPiecewiseFinal = 60.0;
constexpr double kEps = 0.1;
constexpr double kTumorComb = 0.1;
constexpr std::uint64_t kSeed = 20240611;

SolverConfig reference_solver(double h, double t_final) {
  SolverConfig cfg;
  cfg.h = h;
  cfg.t_final = t_final;
  cfg.snapshot_times = uniform_times(0.0, t_final, kCombStep);
  return cfg;
}

std::ofstream open_artifact(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw Error(fmt::format("cannot write {}", (dir / name).string()));
  return os;
}

bool within_unit_interval(const Trajectory& traj) {
  return std::all_of(traj.snapshots.begin(), traj.snapshots.end(), [](const Snapshot& s) {
    return s.u.min() >= -kMaximumPrincipleSlack && s.u.max() <= 1.0 + kMaximumPrincipleSlack;
  });
}

}  // namespace

struct VerificationContext::Cache {
  std::optional<Trajectory> homogeneous;
  std::optional<MonotonicityCertificate> homogeneous_cert;
  std::optional<Trajectory> piecewise;

  const Trajectory& homogeneous_run() {
    if (!homogeneous) homogeneous = solve(builtin_problem("homogeneous-kpp"), reference_solver(0.1, kHomogeneousFinal));
    return *homogeneous;
  }
  const MonotonicityCertificate& homogeneous_certificate() {
    if (!homogeneous_cert) {
      const double eps[] = {kEps};
      homogeneous_cert = theorem1_report(homogeneous_run(), eps);
    }
    return *homogeneous_cert;
  }
  const Trajectory& piecewise_run() {
    if (!piecewise) piecewise = solve(builtin_problem("piecewise-kpp"), reference_solver(0.1, kPiecewiseFinal));
    return *piecewise;
  }
};

VerificationContext::VerificationContext(std::optional<std::filesystem::path> out)
    : out_(std::move(out)), cache_(std::make_unique<Cache>()) {}
VerificationContext::~VerificationContext() = default;

std::string format_result(const CriterionResult& r) {
  return fmt::format("{} C{} {}: {}", r.pass ? "PASS" : "FAIL", r.id, r.title, r.measured);
}

namespace {

// 1. Spreading speed of the homogeneous run.
CriterionResult spreading(VerificationContext& ctx) {
  CriterionResult r{1, "spreading speed", false, ""};
  const auto& traj = ctx.cache().homogeneous_run();
  const SpeedFit fit = spreading_speed(traj, 0.5, 40.0, 80.0);
  r.pass = std::abs(fit.speed - 2.0) <= 0.1;
  r.measured = fmt::format("level-0.5 speed {:.6f} over t in [40, 80] (target 2 +/- 0.1)", fit.speed);
  if (ctx.out()) {
    auto os = open_artifact(*ctx.out(), "level.csv");
    write_level_csv(os, fit);
  }
  return r;
}

// 2. Finite T_eps, stable under grid refinement.
CriterionResult eps_certificate(VerificationContext& ctx) {
  CriterionResult r{2, "eps-monotonicity certificate", false, ""};
  const auto& cert = ctx.cache().homogeneous_certificate();
  const auto& e = cert.eps.front();
  const double eps[] = {kEps};
  const auto fine = theorem1_report(solve(builtin_problem("homogeneous-kpp"), reference_solver(0.05, kHomogeneousFinal)), eps);
  const double T_fine = fine.eps.front().T_eps;
  const bool finite = e.pass && e.T_eps <= 40.0;
  const bool stable = std::isfinite(T_fine) && std::abs(T_fine - e.T_eps) <= kCombStep + 1e-9;
  r.pass = finite && stable;
  r.measured = fmt::format("eps = {}: T_eps = {} (<= 40), {} later snapshots pass; T_eps at h/2 = {} (shift <= {})", kEps,
                           e.T_eps, e.checked_snapshots, T_fine, kCombStep);
  if (ctx.out()) {
    auto os = open_artifact(*ctx.out(), "certificate.txt");
    write_certificate(os, cert);
    auto ts = open_artifact(*ctx.out(), "t_eps.csv");
    write_t_eps_csv(ts, cert);
  }
  return r;
}

// 3. Decay of the negative part of the rhs.
CriterionResult inf_rhs_decay(VerificationContext& ctx) {
  CriterionResult r{3, "inf rhs decay", false, ""};
  const auto& cert = ctx.cache().homogeneous_certificate();
  auto value_at = [&](double t) {
    for (std::size_t i = 0; i < cert.times.size(); ++i) {
      if (std::abs(cert.times[i] - t) < 1e-9) return std::abs(cert.inf_rhs[i]);
    }
    throw InsufficientData(fmt::format("no snapshot at t = {}", t));
  };
  const double v40 = value_at(40.0);
  const double v80 = value_at(80.0);
  r.pass = v80 <= 1e-3 && v80 <= v40;
  r.measured = fmt::format("|inf rhs| = {:.3e} at t = 80 (<= 1e-3), {:.3e} at t = 40", v80, v40);
  if (ctx.out()) {
    auto os = open_artifact(*ctx.out(), "inf_rhs.csv");
    write_inf_rhs_csv(os, cert);
  }
  return r;
}

// 4. Half-line quadrature against the PDE solve.
CriterionResult green_equivalence(VerificationContext& ctx) {
  CriterionResult r{4, "half-line Green equivalence", false, ""};
  const HalfLineParams pp{1.0, 1.0};
  const double h = 0.02;
  const double t = 0.5;
  const Grid grid = Grid::interval(0.0, h, 501);
  GridFunction v0(grid);
  for (std::size_t i = 0; i < grid.nodes_per_axis(); ++i) {
    const double x = grid.coord(i);
    v0[i] = (x >= 1.0 - 1e-12 && x <= 2.0 + 1e-12) ? 1.0 : 0.0;
  }
  const GridFunction w = halfline_quadrature(pp, v0, t);
  const double times[] = {t};
  const auto v = solve_half_line(pp.diffusivity, pp.rate, v0, [](double) { return 0.0; }, HalfLineSide::right, times);
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.nodes_per_axis(); ++i) {
    err = std::max(err, std::abs(v.front().v[i] - w[i]));
    scale = std::max(scale, std::abs(w[i]));
  }
  const double rel = err / scale;
  r.pass = rel <= 1e-2;
  r.measured = fmt::format("relative L-inf error {:.3e} at t = 0.5, h = 0.02 (<= 1e-2)", rel);
  if (ctx.out()) {
    auto os = open_artifact(*ctx.out(), "green_comparison.csv");
    csv::header(os, {"x", "quadrature", "pde"});
    for (std::size_t i = 0; i < grid.nodes_per_axis(); ++i) csv::row(os, {grid.coord(i), w[i], v.front().v[i]});
  }
  return r;
}

// 5. Sign scan of the closed-form G_t and the threshold value.
CriterionResult kernel_scan(VerificationContext& ctx) {
  CriterionResult r{5, "G_t sign scan", false, ""};
  const GreenScanSpec spec;
  std::optional<std::ofstream> os;
  if (ctx.out()) {
    os = open_artifact(*ctx.out(), "green_scan.csv");
    write_green_scan_header(*os);
  }
  const auto rep = scan_green_dt(spec, [&](const GreenScanRow& row) {
    if (os) write_green_scan_row(*os, row);
  });
  const double t0 = t0_threshold(1.0);
  r.pass = rep.violations == 0 && rep.points > 0 && std::abs(t0 - 2.0819767) <= 1e-6;
  r.measured = fmt::format("{} violations over {} points (min G_t/G = {:.3e}); t0(1) = {:.9f} (2.0819767 +/- 1e-6)",
                           rep.violations, rep.points, rep.worst.g_t / rep.worst.g, t0);
  return r;
}

// 6. Full half-line solution with a nondecreasing boundary trace.
CriterionResult halfline_solution(VerificationContext&) {
  CriterionResult r{6, "half-line solution positivity", false, ""};
  const HalfLineParams pp{1.0, 1.0};
  const double t0 = t0_threshold(pp.rate);
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(t0 + 2.0 * t0 * i / 20.0);
  auto g = [](double t) { return -std::expm1(-t); };
  auto zero = [](double) { return 0.0; };
  std::size_t points = 0;
  std::size_t violations = 0;
  double min_rhs = std::numeric_limits<double>::infinity();
  for (auto side : {HalfLineSide::right, HalfLineSide::left}) {
    Prop91Setup setup;
    setup.side = side;
    const auto v = prop91_verify(pp, zero, g, times, setup);
    points += v.points;
    violations += v.violations;
    min_rhs = std::min(min_rhs, v.min_rhs);
  }
  r.pass = violations == 0;
  r.measured = fmt::format("{} violations over {} points, t in [{:.4f}, {:.4f}], both sides; min rhs {:.3e}", violations,
                           points, t0, 3.0 * t0, min_rhs);
  return r;
}

// 7. Global monotonicity of the piecewise problem.
CriterionResult global_monotonicity(VerificationContext& ctx) {
  CriterionResult r{7, "global monotonicity (piecewise)", false, ""};
  const auto& traj = ctx.cache().piecewise_run();
  const auto gm = theorem2_report(traj);
  r.pass = std::isfinite(gm.tau_global) && gm.checked_snapshots > 0;
  std::string harnack = "n/a";
  try {
    const double shift = std::ceil(gm.T0 / kCombStep - 1e-9) * kCombStep;
    harnack = fmt::format("{:.3e} (shift {})", harnack_constant(traj, gm.params, shift).C, shift);
  } catch (const InsufficientData&) {
  }
  r.measured = fmt::format("tau_global = {} with {} later snapshots all positive; T0 = {:.4f}, Harnack C = {}",
                           gm.tau_global, gm.checked_snapshots, gm.T0, harnack);
  if (ctx.out()) {
    auto os = open_artifact(*ctx.out(), "theorem2.txt");
    os << "tau_global: " << csv::number(gm.tau_global) << "\n";
    os << "checked_snapshots: " << gm.checked_snapshots << "\n";
    os << "T0: " << csv::number(gm.T0) << "\n";
    os << "harnack_C: " << harnack << "\n";
  }
  return r;
}

// 8. Two-sided Gaussian bounds for a variable coefficient.
CriterionResult aronson(VerificationContext& ctx) {
  CriterionResult r{8, "Aronson constant", false, ""};
  const Grid grid = Grid::symmetric(1, 40.0, 0.05);
  const double times[] = {0.5, 1.0, 2.0, 4.0};
  const auto kernels = fundamental_solution(CoefficientField::sinusoidal(1.0, 0.5, 5.0), times, Point{}, grid);
  AronsonWindow window;
  window.times.assign(std::begin(times), std::end(times));
  const auto fit = fit_aronson_K(kernels, window);
  r.pass = std::isfinite(fit.K) && fit.K <= 50.0;
  r.measured = fmt::format("K = {:.3f} (lower {:.3f}, upper {:.3f}; <= 50) over {} points; Gaussian-normalised K = {:.3f}",
                           fit.K, fit.K_lower, fit.K_upper, fit.points, fit.K_gaussian);
  if (ctx.out()) {
    auto os = open_artifact(*ctx.out(), "aronson.txt");
    os << "K: " << csv::number(fit.K) << "\nK_lower: " << csv::number(fit.K_lower)
       << "\nK_upper: " << csv::number(fit.K_upper) << "\nK_gaussian: " << csv::number(fit.K_gaussian)
       << "\nwitness_bound: " << fit.witness.bound << "\nwitness_t: " << csv::number(fit.witness.t)
       << "\nwitness_x: " << csv::number(fit.witness.x.x) << "\npoints: " << fit.points << "\n";
  }
  return r;
}

// 9. Constant-coefficient kernel ratio and its negative control.
CriterionResult ratio_constant(VerificationContext& ctx) {
  CriterionResult r{9, "kernel ratio, constant coefficient", false, ""};
  const RatioWindow window{10.0, 1e-12};
  const auto rep = check_prop61(CoefficientField::constant(1.0), 4.0, 0.8, window, KernelGridSpec{});
  const auto control = check_prop61(CoefficientField::constant(1.0), 1.0, 0.99, window, KernelGridSpec{});
  const double exact = constant_coefficient_ratio(4.0, 1);
  const bool main_ok = rep.pass && std::abs(rep.min_ratio - exact) <= 1e-3 && rep.argmin <= 0.05 + 1e-9;
  r.pass = main_ok && !control.pass;
  r.measured = fmt::format("tau = 4, sigma = 0.8: min ratio {:.6f} at |x| = {} (exact {:.6f} +/- 1e-3); "
                           "control tau = 1, sigma = 0.99: min ratio {:.6f}, {}",
                           rep.min_ratio, rep.argmin, exact, control.min_ratio, control.pass ? "passes (unexpected)" : "fails as predicted");
  if (ctx.out()) {
    auto os = open_artifact(*ctx.out(), "ratio.csv");
    write_ratio_csv(os, rep);
  }
  return r;
}

// 10. Kernel ratio for oscillating coefficients.
CriterionResult ratio_variable(VerificationContext& ctx) {
  CriterionResult r{10, "kernel ratio, variable coefficient", false, ""};
  const double amps[] = {0.05, 0.1, 0.2, 0.4};
  const auto sweep = sweep_gradient_amplitude(amps, 5.0, 4.0, 0.8, RatioWindow{15.0, 1e-12}, KernelGridSpec{});
  std::string detail;
  for (const auto& rep : sweep.reports) detail += fmt::format(" {:.6f}", rep.min_ratio);
  r.pass = !sweep.reports.empty() && sweep.reports.front().pass;
  r.measured = fmt::format("largest passing amplitude {} (A = 0.05 must pass); min ratios{}", sweep.largest_passing, detail);
  if (ctx.out()) {
    for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
      auto os = open_artifact(*ctx.out(), fmt::format("ratio_amp_{}.csv", sweep.amplitudes[i]));
      write_ratio_csv(os, sweep.reports[i]);
    }
  }
  return r;
}

// 11. Algebraic jump identity of the discrete operator.
CriterionResult jump_identity(VerificationContext& ctx) {
  CriterionResult r{11, "treatment jump identity", false, ""};
  const auto& traj = ctx.cache().homogeneous_run();
  const Snapshot* s = traj.at(5.0);
  if (!s) throw InsufficientData("no snapshot at t = 5");
  double worst = 0.0;
  for (double beta : {0.3, 0.5, 0.8}) {
    worst = std::max(worst, jump_identity_residual(s->u, s->rhs, beta, traj.problem).max_abs);
  }
  r.pass = worst <= 1e-12;
  r.measured = fmt::format("max |residual| = {:.3e} over beta in {{0.3, 0.5, 0.8}} at t = 5 (<= 1e-12)", worst);
  return r;
}

// 12. Observed size after a treatment given positive boundary rhs.
CriterionResult observed_size_after_event(VerificationContext& ctx) {
  CriterionResult r{12, "observed size after treatment", false, ""};
  const double T_eps = ctx.cache().homogeneous_certificate().eps.front().T_eps;
  if (!std::isfinite(T_eps)) {
    r.measured = "no certified T_eps";
    return r;
  }
  const double t0 = std::max(5.0, T_eps + 1.0);
  ProtocolConfig cfg;
  cfg.solver.h = 0.1;
  cfg.solver.t_final = t0 + 10.0 * kTumorComb + 1e-6;
  cfg.comb = kTumorComb;
  const TreatmentSchedule sched{{TreatmentEvent{t0, 0.5}}, 0.3};
  const auto res = run_protocol(builtin_problem("homogeneous-kpp"), sched, cfg);
  const auto& ev = res.events.front();
  std::size_t decreases = 0;
  double prev = ev.S_after;
  const std::size_t n = std::min<std::size_t>(10, ev.S_after_comb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (ev.S_after_comb[i] < prev) ++decreases;
    prev = ev.S_after_comb[i];
  }
  const bool precondition = ev.boundary_rhs_min > 0.0 && ev.grazing == 0;
  r.pass = precondition && n == 10 && decreases == 0;
  r.measured = fmt::format("event t0 = {} (T_eps = {}), beta = 0.5, sigma = 0.3: min boundary rhs {:.3e}, "
                           "{} decreases of S over {} comb points (S: {:.6f} -> {:.6f})",
                           t0, T_eps, ev.boundary_rhs_min, decreases, n, ev.S_after, prev);
  if (ctx.out()) {
    auto os = open_artifact(*ctx.out(), "protocol.csv");
    write_protocol_csv(os, res);
  }
  return r;
}

// 13. Property suites: comparison, maximum principle, Green identities, mass jump.
CriterionResult properties(VerificationContext& ctx) {
  CriterionResult r{13, "property suites", false, ""};
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const Problem problems[] = {
      builtin_problem("homogeneous-kpp"),
      Problem{1, 30.0, CoefficientField::sinusoidal(1.0, 0.5, 3.0),
              Reaction::separable(1.0, 0.5, 4.0, GrowthProfile::logistic), InitialCondition::bump(1.0, 1.0)},
      builtin_problem("piecewise-kpp"),
  };
  std::size_t comparison_violations = 0;
  std::size_t max_principle_violations = 0;
  for (int pair = 0; pair < 20; ++pair) {
    Problem p = problems[pair % 3];
    p.half_width = 30.0;
    SolverConfig cfg;
    cfg.h = 0.2;
    cfg.t_final = 5.0;
    cfg.snapshot_times = uniform_times(0.0, 5.0, 1.0);
    cfg.boundary_leak_tolerance = std::numeric_limits<double>::infinity();
    cfg.boundary_leak_abort = std::numeric_limits<double>::infinity();
    const Grid grid = Grid::symmetric(1, p.half_width, cfg.h);
    GridFunction lo(grid);
    GridFunction hi(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      lo[k] = unif(rng);
      hi[k] = lo[k] + unif(rng) * (1.0 - lo[k]);
    }
    const auto a = solve_from(p, cfg, lo);
    const auto b = solve_from(p, cfg, hi);
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        if (b.snapshots[i].u[k] < a.snapshots[i].u[k] - kMaximumPrincipleSlack) ++comparison_violations;
      }
    }
    if (!within_unit_interval(a) || !within_unit_interval(b)) ++max_principle_violations;
  }
  if (!within_unit_interval(ctx.cache().homogeneous_run())) ++max_principle_violations;
  if (!within_unit_interval(ctx.cache().piecewise_run())) ++max_principle_violations;

  std::size_t green_violations = 0;
  for (int i = 0; i < 200; ++i) {
    const HalfLineParams pp{0.5 + 1.5 * unif(rng), 0.5 + 1.5 * unif(rng)};
    const double t = 0.2 + 4.0 * unif(rng);
    const double x = 10.0 * unif(rng);
    const double y = 10.0 * unif(rng);
    const double g = half_line_green(pp, t, x, y);
    if (g != half_line_green(pp, t, y, x)) ++green_violations;
    if (half_line_green(pp, t, 0.0, y) != 0.0) ++green_violations;
    if (g < 0.0) ++green_violations;
    const double dt = 1e-5 * t;
    const double fd = (half_line_green(pp, t + dt, x, y) - half_line_green(pp, t - dt, x, y)) / (2.0 * dt);
    const double gt = half_line_green_dt(pp, t, x, y);
    if (std::abs(fd - gt) > 1e-5 * std::max(std::abs(gt), 1e-3 * g) + 1e-300) ++green_violations;
  }

  std::size_t mass_violations = 0;
  ProtocolConfig pcfg;
  pcfg.solver.h = 0.1;
  pcfg.solver.t_final = 6.0;
  pcfg.comb = kTumorComb;
  Problem tumor = builtin_problem("homogeneous-kpp");
  tumor.half_width = 40.0;
  const TreatmentSchedule sched{{{1.5, 0.3}, {3.0, 0.5}, {4.5, 0.8}}, 0.3};
  for (const auto& ev : run_protocol(tumor, sched, pcfg).events) {
    if (std::abs(ev.mass_after - ev.beta * ev.mass_before) > 1e-12 * ev.mass_before) ++mass_violations;
  }

  const std::size_t total = comparison_violations + max_principle_violations + green_violations + mass_violations;
  r.pass = total == 0;
  r.measured = fmt::format("violations: comparison {} (20 pairs), maximum principle {}, Green identities {} (200 points), "
                           "mass jump {} (3 events)",
                           comparison_violations, max_principle_violations, green_violations, mass_violations);
  return r;
}

using CriterionFn = CriterionResult (*)(VerificationContext&);

constexpr CriterionFn kCriteria[kCriterionCount] = {
    spreading,      eps_certificate, inf_rhs_decay,  green_equivalence, kernel_scan,
    halfline_solution, global_monotonicity, aronson, ratio_constant, ratio_variable,
    jump_identity,  observed_size_after_event, properties,
};

const char* const kTitles[kCriterionCount] = {
    "spreading speed",         "eps-monotonicity certificate", "inf rhs decay",
    "half-line Green equivalence", "G_t sign scan",           "half-line solution positivity",
    "global monotonicity (piecewise)", "Aronson constant",    "kernel ratio, constant coefficient",
    "kernel ratio, variable coefficient", "treatment jump identity", "observed size after treatment",
    "property suites",
};

}  // namespace

CriterionResult run_criterion(int id, VerificationContext& ctx) {
  if (id < 1 || id > kCriterionCount) throw InvalidArgument(fmt::format("no criterion {}", id));
  try {
    return kCriteria[id - 1](ctx);
  } catch (const Error& e) {
    return CriterionResult{id, kTitles[id - 1], false, fmt::format("error: {}", e.what())};
  }
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"theorem1", "theorem2",  "green",      "kernel-mono",
                                              "aronson",  "tumor-jump", "prop91-scan"};
  return names;
}

std::vector<int> suite_criteria(const std::string& suite) {
  static const std::map<std::string, std::vector<int>> table{
      {"theorem1", {1, 2, 3, 13}}, {"theorem2", {7}},           {"green", {4}},        {"kernel-mono", {9, 10}},
      {"aronson", {8}},            {"tumor-jump", {11, 12}},   {"prop91-scan", {5, 6}},
  };
  const auto it = table.find(suite);
  if (it == table.end()) {
    std::string known;
    for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
    throw InvalidArgument(fmt::format("unknown suite '{}' (known: {})", suite, known));
  }
  return it->second;
}

}  // namespace kpplab::app
