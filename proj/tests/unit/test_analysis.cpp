#include <doctest.h>

#include <cmath>
#include <functional>

#include "kpplab/analysis.hpp"
#include "kpplab/error.hpp"

using namespace kpplab;

namespace {

// Trajectory with u(t, x) from a closed form and rhs from a centred time difference.
Trajectory synthetic(const std::function<double(double, double)>& f, const Grid& g, std::vector<double> times) {
  Trajectory traj;
  for (double t : times) {
    GridFunction u(g), rhs(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.coord(k);
      u[k] = f(t, x);
      rhs[k] = (f(t + 1e-6, x) - f(t - 1e-6, x)) / 2e-6;
    }
    traj.snapshots.push_back(Snapshot{t, u, rhs});
  }
  return traj;
}

Trajectory kpp_run(double a, double half_width, double h, double t_final, double every) {
  Problem p;
  p.half_width = half_width;
  p.coefficient = CoefficientField::constant(a);
  SolverConfig cfg;
  cfg.h = h;
  cfg.t_final = t_final;
  cfg.snapshot_times = uniform_times(0.0, t_final, every);
  return solve(p, cfg);
}

}  // namespace

TEST_CASE("level position examples") {
  const Grid g = Grid::interval(0.0, 1.0, 4);
  const GridFunction rising(g, {0.0, 0.2, 0.6, 0.9});
  CHECK(level_position(rising, 0.5, Side::right) == doctest::Approx(1.75));

  const GridFunction step(g, {0.0, 0.5, 1.0, 1.0});
  CHECK(level_position(step, 0.5, Side::right) == doctest::Approx(1.0));

  const Grid s = Grid::symmetric(1, 3.0, 1.0);
  const GridFunction bump(s, {0.0, 0.2, 0.7, 1.0, 0.7, 0.2, 0.0});
  CHECK(level_position(bump, 0.5, Side::left) == doctest::Approx(-level_position(bump, 0.5, Side::right)));
  CHECK(level_position(bump, 0.5, Side::right) == doctest::Approx(1.4));
  CHECK_THROWS_AS(level_position(bump, 1.5, Side::right), InsufficientData);
}

TEST_CASE("spreading speed of homogeneous KPP: level invariance and sqrt(a) scaling") {
  const auto run1 = kpp_run(1.0, 60.0, 0.2, 25.0, 1.0);
  const auto run2 = kpp_run(2.0, 80.0, 0.2, 25.0, 1.0);
  const double c = spreading_speed(run1, 0.5, 10.0, 25.0).speed;
  CHECK(c == doctest::Approx(2.0).epsilon(0.1));
  for (double level : {0.1, 0.9}) {
    CHECK(spreading_speed(run1, level, 10.0, 25.0).speed == doctest::Approx(c).epsilon(0.03));
  }
  CHECK(spreading_speed(run2, 0.5, 10.0, 25.0).speed / c == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  CHECK_THROWS_AS(spreading_speed(run1, 0.5, 10.0, 12.0), InsufficientData);
}

TEST_CASE("monotone synthetic trajectories") {
  const Grid g = Grid::symmetric(1, 10.0, 0.5);
  const auto saturating = synthetic([](double t, double) { return 1.0 - std::exp(-t); }, g, uniform_times(0.5, 12.0, 0.5));
  CHECK(find_T_monotone(saturating) == 0.0);

  auto front = [](double t, double x) { return std::min(1.0, std::exp(t - std::abs(x))); };
  const auto traj = synthetic(front, g, uniform_times(0.0, 15.0, 0.5));
  CHECK(estimate_tau_star(traj, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(estimate_tau_star(traj, 12.0), InsufficientData);
}

TEST_CASE("tau* and T_mono for a dip-then-grow amplitude") {
  // u = A(t) phi(x) with A decreasing until t = 3: shifts below 4 fail at t = 1.
  const Grid g = Grid::symmetric(1, 5.0, 0.5);
  auto dip = [](double t, double x) { return 0.01 * ((t - 3.0) * (t - 3.0) + 0.1) * std::exp(-x * x); };
  const auto traj = synthetic(dip, g, uniform_times(0.0, 15.0, 0.5));
  CHECK(estimate_tau_star(traj, 1.0) == doctest::Approx(4.0));
  CHECK(find_T_monotone(traj) == doctest::Approx(4.0));

  SUBCASE("time-shift invariance") {
    auto shifted = [&](double t, double x) { return dip(t - 2.0, x); };
    const auto later = synthetic(shifted, g, uniform_times(2.0, 17.0, 0.5));
    CHECK(estimate_tau_star(later, 3.0) == doctest::Approx(4.0));
  }
}

TEST_CASE("pure heat decays at the origin") {
  Problem p;
  p.half_width = 20.0;
  p.reaction = Reaction::none();
  p.initial = InitialCondition::gaussian(1.0, 0.5);
  SolverConfig cfg;
  cfg.h = 0.2;
  cfg.t_final = 6.0;
  cfg.snapshot_times = uniform_times(0.0, 6.0, 0.5);
  const auto traj = solve(p, cfg);
  CHECK(find_T_monotone(traj) == kNever);
  const double eps[] = {0.1};
  const auto cert = theorem1_report(traj, eps);
  CHECK(cert.eps.front().T_eps == kNever);
  CHECK_FALSE(cert.verdicts.at("eps_certified"));
}

TEST_CASE("theorem1 report on homogeneous KPP") {
  const auto traj = kpp_run(1.0, 60.0, 0.2, 20.0, 0.5);
  const double eps[] = {0.1, 0.5, 1.0};
  const auto cert = theorem1_report(traj, eps);
  CHECK(cert.verdicts.at("maximum_principle"));
  CHECK(cert.verdicts.at("eps_certified"));
  CHECK(cert.verdicts.at("T_mono_finite"));
  CHECK(cert.eps[0].T_eps <= 5.0);
  CHECK(cert.eps[0].qualifying_points > 0);
  CHECK(cert.eps[2].T_eps == 0.0);  // vacuous
  CHECK(cert.eps[2].qualifying_points == 0);
  CHECK(cert.inf_rhs.size() == traj.snapshots.size());
  for (std::size_t i = 0; i < cert.inf_rhs.size(); ++i) {
    CHECK(cert.inf_rhs[i] <= 0.0);
    CHECK(std::min(cert.min_rhs[i], 0.0) <= cert.inf_rhs[i]);
  }
  const double bad[] = {0.0};
  CHECK_THROWS_AS(theorem1_report(traj, bad), InvalidArgument);
}

TEST_CASE("theorem2 class detection") {
  const Problem pw = builtin_problem("piecewise-kpp");
  const auto cls = theorem2_class(pw);
  CHECK(cls.rate_minus == doctest::Approx(0.5));
  CHECK(cls.rate_plus == doctest::Approx(1.0));
  CHECK(cls.theta == doctest::Approx(0.3));
  CHECK(theorem2_T0(0.5, 1.0) == doctest::Approx(2.0 * 2.0819767068693264));

  Problem flat = builtin_problem("homogeneous-kpp");
  flat.dimension = 2;
  CHECK_THROWS_AS(theorem2_class(flat), HypothesisMismatch);
  CHECK_THROWS_AS(theorem2_class(builtin_problem("homogeneous-kpp")), HypothesisMismatch);

  Problem unclaimed = pw;
  unclaimed.reaction = Reaction::piecewise([](double u) { return u * (1.0 - u); }, [](double u) { return u * (1.0 - u); },
                                           10.0, std::nullopt, "logistic halves");
  CHECK_THROWS_AS(theorem2_class(unclaimed), HypothesisMismatch);

  Problem wrong = pw;
  wrong.reaction = Reaction::piecewise([](double u) { return u * (1.0 - u); }, [](double u) { return u * (1.0 - u); },
                                       10.0, LinearNearZero{1.0, 1.0, 0.3}, "false claim");
  CHECK_THROWS_AS(theorem2_class(wrong), HypothesisMismatch);

  Problem wiggly = pw;
  wiggly.coefficient = CoefficientField::sinusoidal(1.0, 0.2, 3.0);
  CHECK_THROWS_AS(theorem2_class(wiggly), HypothesisMismatch);
}

TEST_CASE("half-line positivity with zero boundary trace on both sides") {
  const HalfLineParams pp{1.0, 1.0};
  auto v0 = [](double x) { return x * std::exp(-x * x); };
  auto g = [](double) { return 0.0; };
  const double times[] = {2.1, 3.0, 4.0};
  Prop91Setup setup;
  setup.h = 0.1;
  setup.extent = 40.0;
  for (auto side : {HalfLineSide::right, HalfLineSide::left}) {
    setup.side = side;
    const auto v = prop91_verify(pp, v0, g, times, setup);
    CHECK(v.pass);
    CHECK(v.points > 0);
    CHECK(v.min_rhs > 0.0);
    CHECK(v.t0 == doctest::Approx(2.0819767068693264));
  }
  auto decreasing = [](double t) { return std::exp(-t); };
  CHECK_THROWS_AS(prop91_verify(pp, v0, decreasing, times, setup), InvalidArgument);
  const double early[] = {0.5, 1.0};
  CHECK_THROWS_AS(prop91_verify(pp, v0, g, early, setup), InsufficientData);
}
