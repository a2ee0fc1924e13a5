#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "kpplab/error.hpp"
#include "kpplab/solver.hpp"

using namespace kpplab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SolverConfig config(double h, double t_final, std::vector<double> snaps) {
  SolverConfig c;
  c.h = h;
  c.t_final = t_final;
  c.snapshot_times = std::move(snaps);
  return c;
}

Problem heat_problem(int dim, double L) {
  Problem p;
  p.dimension = dim;
  p.half_width = L;
  p.reaction = Reaction::none();
  p.initial = InitialCondition::gaussian(1.0, 0.5);
  return p;
}

// Heat flow of C exp(-beta |x|^2) in dimension dim.
double heat_gaussian(double beta, double t, double r2, int dim) {
  const double s = 1.0 + 4.0 * beta * t;
  return std::pow(s, -0.5 * dim) * std::exp(-beta * r2 / s);
}

double max_rel_error(const GridFunction& u, double t, double radius) {
  double err = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Point x = u.grid().point(k);
    if (x.norm() > radius) continue;
    const double exact = heat_gaussian(0.5, t, u.grid().dim() == 1 ? x.x * x.x : x.norm_squared(), u.grid().dim());
    err = std::max(err, std::abs(u[k] - exact) / exact);
  }
  return err;
}

}  // namespace

TEST_CASE("constant states 0 and 1 are steady") {
  Problem p;
  p.half_width = 5.0;
  SolverConfig cfg;
  cfg.h = 0.1;
  const Grid g = Grid::symmetric(1, 5.0, 0.1);
  const GridFunction zero(g, 0.0);
  const auto z = step(zero, 0.0, p, cfg);
  CHECK(z.max() == 0.0);
  CHECK(z.min() == 0.0);
  const GridFunction one(g, 1.0);
  const auto o = step(one, 0.0, p, cfg);
  for (std::size_t k = 1; k + 1 < o.size(); ++k) CHECK(o[k] == 1.0);
}

TEST_CASE("heat flow of a Gaussian matches the closed form") {
  const Problem p = heat_problem(1, 30.0);
  const auto traj = solve(p, config(0.05, 2.0, {2.0}));
  const auto& u = traj.snapshots.back().u;
  CHECK(max_rel_error(u, 2.0, 6.0) <= 1e-3);
  // Frozen oracle: normalised density of variance 5 at x = 1.
  const double at1 = u[*u.grid().index_of(1.0)] / std::sqrt(2.0 * std::numbers::pi);
  CHECK(at1 == doctest::Approx(0.16143422587153619).epsilon(1e-4));
}

TEST_CASE("two-dimensional heat flow of a Gaussian") {
  const Problem p = heat_problem(2, 8.0);
  const auto traj = solve(p, config(0.1, 1.0, {1.0}));
  CHECK(max_rel_error(traj.snapshots.back().u, 1.0, 3.0) <= 5e-3);
}

TEST_CASE("second-order spatial convergence on the heat test") {
  const Problem p = heat_problem(1, 20.0);
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto traj = solve(p, config(h, 1.0, {1.0}));
    const double err = max_rel_error(traj.snapshots.back().u, 1.0, 4.0);
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("domain-filling constant follows the logistic ODE") {
  Problem p;
  p.half_width = 20.0;
  p.initial = InitialCondition::constant(0.5);
  auto cfg = config(0.5, 5.0, {1.0, 2.5, 5.0});
  cfg.dt = 1e-4;
  cfg.boundary_leak_tolerance = kInf;
  cfg.boundary_leak_abort = kInf;
  const auto traj = solve(p, cfg);
  for (const auto& s : traj.snapshots) {
    const double exact = 1.0 / (1.0 + std::exp(-s.t));
    for (std::size_t k = 0; k < s.u.size(); ++k) {
      if (std::abs(s.u.grid().coord(k)) > 5.0) continue;
      CHECK(std::abs(s.u[k] - exact) / exact <= 1e-4);
    }
  }
  // Frozen oracle at t = 5.
  CHECK(traj.snapshots.back().u[*traj.snapshots.back().u.grid().index_of(0.0)] ==
        doctest::Approx(0.99330714907571514).epsilon(1e-4));
}

TEST_CASE("homogeneous KPP invades the origin") {
  const Problem p = builtin_problem("homogeneous-kpp");
  const auto traj = solve(p, config(0.1, 40.0, uniform_times(0.0, 40.0, 2.0)));
  const std::size_t origin = *traj.snapshots.front().u.grid().index_of(0.0);
  CHECK(traj.at(40.0)->u[origin] >= 0.999);
  for (std::size_t i = 2; i < traj.snapshots.size(); ++i) {
    CHECK(traj.snapshots[i].u[origin] >= traj.snapshots[i - 1].u[origin] - 1e-12);
  }
  CHECK(traj.warnings.empty());
}

TEST_CASE("comparison and maximum principles on random ordered bump pairs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    Problem a = trial % 2 ? builtin_problem("piecewise-kpp") : builtin_problem("heterogeneous-kpp");
    a.half_width = 20.0;
    Problem b = a;
    const double r1 = 0.5 + unif(rng);
    const double h1 = 0.2 + 0.5 * unif(rng);
    a.initial = InitialCondition::bump(r1, h1);
    b.initial = InitialCondition::bump(r1 + unif(rng), h1 + (1.0 - h1) * unif(rng));
    const auto cfg = config(0.1, 4.0, uniform_times(0.0, 4.0, 0.5));
    const auto ta = solve(a, cfg);
    const auto tb = solve(b, cfg);
    for (std::size_t i = 0; i < ta.snapshots.size(); ++i) {
      const auto& ua = ta.snapshots[i].u;
      const auto& ub = tb.snapshots[i].u;
      for (std::size_t k = 0; k < ua.size(); ++k) CHECK(ua[k] <= ub[k] + 1e-12);
      CHECK(ua.min() >= -kMaximumPrincipleSlack);
      CHECK(ub.max() <= 1.0 + kMaximumPrincipleSlack);
    }
  }
}

TEST_CASE("stored rhs is the explicit increment") {
  const Problem p = builtin_problem("heterogeneous-kpp");
  const Grid g = Grid::symmetric(1, p.half_width, 0.1);
  const TimeIntegrator integ(g, p.coefficient, p.reaction, Scheme::explicit_euler, std::nullopt);
  GridFunction u = make_initial(InitialCondition::gaussian(0.8, 0.05), g);
  const GridFunction rhs = integ.rhs(u);
  GridFunction next = u;
  integ.step(next.values(), integ.dt());
  for (std::size_t k = 0; k < u.size(); ++k) {
    CHECK((next[k] - u[k]) / integ.dt() == doctest::Approx(rhs[k]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("stability and leak errors") {
  Problem p;
  p.half_width = 5.0;
  auto cfg = config(0.1, 1.0, {1.0});
  cfg.dt = 0.01;  // limit is h^2 / 2 = 0.005
  CHECK_THROWS_AS(solve(p, cfg), NumericalError);

  auto leak = config(0.1, 10.0, {10.0});
  CHECK_THROWS_AS(solve(p, leak), NumericalError);

  auto warn = config(0.1, 2.0, {2.0});
  warn.boundary_leak_tolerance = 1e-30;
  warn.boundary_leak_abort = kInf;
  const auto traj = solve(p, warn);
  CHECK(traj.warnings.size() == 1);
  CHECK(traj.max_boundary_value > 1e-30);
}

TEST_CASE("IMEX scheme is one-dimensional and consistent with explicit stepping") {
  Problem p = builtin_problem("homogeneous-kpp");
  p.half_width = 30.0;
  auto ex = config(0.1, 5.0, {5.0});
  auto im = ex;
  im.scheme = Scheme::imex;
  im.dt = 0.001;
  const auto a = solve(p, ex);
  const auto b = solve(p, im);
  double diff = 0.0;
  for (std::size_t k = 0; k < a.snapshots.back().u.size(); ++k) {
    diff = std::max(diff, std::abs(a.snapshots.back().u[k] - b.snapshots.back().u[k]));
  }
  CHECK(diff <= 1e-2);
  Problem p2 = p;
  p2.dimension = 2;
  p2.half_width = 5.0;
  CHECK_THROWS_AS(solve(p2, im), InvalidArgument);
  auto stiff = im;
  stiff.dt = 2.0;  // dt * Lip > 1
  CHECK_THROWS_AS(solve(p, stiff), NumericalError);
}

TEST_CASE("fundamental solution: closed form, mass and symmetry") {
  const Grid g = Grid::symmetric(1, 40.0, 0.05);
  const double times[] = {1.0};
  const auto fs = fundamental_solution(CoefficientField::constant(1.0), times, Point{}, g);
  const auto& p = fs.at(1.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double x = g.coord(k);
    if (std::abs(x) > 4.0) continue;
    const double exact = std::exp(-x * x / 4.0) / std::sqrt(4.0 * std::numbers::pi);
    CHECK(std::abs(p[k] - exact) / exact <= 1e-2);
  }
  CHECK(fs.mass.front() == doctest::Approx(1.0).epsilon(1e-6));

  const auto a = CoefficientField::sinusoidal(1.0, 0.5, 5.0);
  const double t2[] = {2.0};
  const auto from_y = fundamental_solution(a, t2, Point{3.0, 0.0}, g);
  const auto from_x = fundamental_solution(a, t2, Point{-2.0, 0.0}, g);
  const double pxy = from_y.at(2.0)[*g.index_of(-2.0)];
  const double pyx = from_x.at(2.0)[*g.index_of(3.0)];
  CHECK(std::abs(pxy - pyx) / pyx <= 1e-2);

  CHECK_THROWS_AS(fundamental_solution(a, t2, Point{0.01, 0.0}, g), InvalidArgument);
  const Grid small = Grid::symmetric(1, 3.0, 0.05);
  CHECK_THROWS_AS(fundamental_solution(CoefficientField::constant(1.0), t2, Point{}, small), NumericalError);
}

TEST_CASE("trajectory CSV dialect") {
  Problem p;
  p.half_width = 1.0;
  auto cfg = config(0.5, 0.1, {0.0, 0.1});
  cfg.boundary_leak_abort = kInf;
  cfg.boundary_leak_tolerance = kInf;
  const auto traj = solve(p, cfg);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  const std::string s = os.str();
  CHECK(s.rfind("t,x,u,rhs\n", 0) == 0);
  CHECK(s.find('\r') == std::string::npos);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  std::size_t lines = 0;
  for (char c : s) lines += c == '\n';
  CHECK(lines == 1 + 2 * 5);
}

TEST_CASE("uniform comb") {
  const auto ts = uniform_times(0.0, 1.0, 0.1);
  CHECK(ts.size() == 11);
  CHECK(ts.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(uniform_times(0.0, 1.0, 0.0), InvalidArgument);
}
