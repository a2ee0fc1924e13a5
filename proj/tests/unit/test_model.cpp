#include <doctest.h>

#include <cmath>

#include "kpplab/error.hpp"
#include "kpplab/model.hpp"

using namespace kpplab;

TEST_CASE("smoothstep weight is a monotone C2 blend") {
  const double R = 3.0;
  CHECK(smoothstep_weight(-R, R) == 0.0);
  CHECK(smoothstep_weight(R, R) == 1.0);
  CHECK(smoothstep_weight(0.0, R) == doctest::Approx(0.5));
  double prev = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double w = smoothstep_weight(-R + 2.0 * R * i / 600.0, R);
    CHECK(w >= prev);
    prev = w;
  }
  const double d = 1e-4;
  const double slope_edge = (smoothstep_weight(-R + d, R) - smoothstep_weight(-R, R)) / d;
  CHECK(slope_edge == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("logistic reaction: mu = 0.9 with s0 = 0.1") {
  Problem p;
  p.half_width = 10.0;
  const auto rep = validate_problem(p, 32);
  CHECK(rep.mu == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(rep.lipschitz == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.all_pass());
}

TEST_CASE("weak Allee growth fails the KPP lower bound with a witness near zero") {
  Problem p;
  p.half_width = 10.0;
  p.reaction = Reaction::separable(1.0, 0.0, 1.0, GrowthProfile::weak_allee);
  const auto rep = validate_problem(p, 32);
  const auto& v = rep.verdicts.at("kpp_lower_bound");
  CHECK_FALSE(v.pass);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->u == doctest::Approx(1e-9));
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("ellipticity constant of 2 + sin(x) is 3") {
  Problem p;
  p.half_width = 50.0;
  p.coefficient = CoefficientField::function([](Point x) { return 2.0 + std::sin(x.x); }, "2+sin(x)");
  const auto rep = validate_problem(p, 2001);
  CHECK(rep.nu == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(rep.nu <= 3.0);
  CHECK(rep.verdicts.at("ellipticity").pass);
}

TEST_CASE("reactions not vanishing at 0 or 1 are rejected") {
  Problem p;
  p.half_width = 10.0;
  p.reaction = Reaction::separable([](Point) { return 1.0; }, [](double u) { return u * (1.0 - u) + 0.1; }, "shifted");
  CHECK_THROWS_AS(validate_problem(p, 16), InvalidArgument);
  CHECK_THROWS_AS(validate_problem(Problem{}, 8), InvalidArgument);
}

TEST_CASE("every builtin problem passes its hypotheses") {
  for (const auto& name : builtin_problem_names()) {
    CAPTURE(name);
    const auto rep = validate_problem(builtin_problem(name), 64);
    CHECK(rep.all_pass());
  }
  CHECK_THROWS_AS(builtin_problem("nope"), InvalidArgument);
}

TEST_CASE("Lipschitz bound dominates every sample") {
  Problem p = builtin_problem("heterogeneous-kpp");
  const auto rep = validate_problem(p, 64);
  for (int i = 0; i <= 64; ++i) {
    const Point x{-p.half_width + 2.0 * p.half_width * i / 64.0, 0.0};
    for (int j = 1; j <= 64; ++j) {
      const double s = j / 64.0;
      CHECK(p.reaction(x, s) <= rep.lipschitz * s + 1e-12);
    }
  }
}

TEST_CASE("piecewise KPP: linear near zero outside the transition and KPP ratio monotone") {
  const double R = 10.0;
  const Reaction f = Reaction::piecewise_kpp(0.5, 1.0, 0.3, R);
  for (double u = 0.0; u <= 0.3; u += 0.01) {
    CHECK(f(Point{-R - 1.0, 0.0}, u) == doctest::Approx(0.5 * u).epsilon(1e-14));
    CHECK(f(Point{R, 0.0}, u) == doctest::Approx(1.0 * u).epsilon(1e-14));
  }
  for (int i = 0; i < 100; ++i) {
    const Point x{-2.0 * R + 4.0 * R * i / 99.0, 0.0};
    double prev = INFINITY;
    for (int j = 1; j <= 100; ++j) {
      const double u = j / 100.0;
      const double ratio = f(x, 1.0 - u) / u;
      CHECK(ratio <= prev + 1e-12);
      prev = ratio;
    }
  }
  REQUIRE(f.linear_near_zero().has_value());
  CHECK(f.linear_near_zero()->theta == 0.3);
}

TEST_CASE("problem structural check") {
  Problem p;
  p.reaction = Reaction::piecewise_kpp(0.5, 1.0, 0.3, 10.0);
  p.half_width = 10.0;
  CHECK_THROWS_AS(p.check(), InvalidArgument);
  p.half_width = 20.0;
  CHECK_NOTHROW(p.check());
  p.dimension = 3;
  CHECK_THROWS_AS(p.check(), InvalidArgument);
}

TEST_CASE("initial data sampling") {
  const Grid g = Grid::symmetric(1, 3.0, 0.5);
  const auto gauss = make_initial(InitialCondition::gaussian(1.0, 1.0), g);
  CHECK(gauss[*g.index_of(0.0)] == 1.0);
  CHECK(gauss[*g.index_of(2.0)] == doctest::Approx(std::exp(-4.0)));

  const auto expo = make_initial(InitialCondition::exponential(2.0, 1.0), g);
  CHECK(expo[*g.index_of(0.0)] == 1.0);
  CHECK(expo[*g.index_of(1.0)] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));

  const auto bump = make_initial(InitialCondition::bump(1.0, 0.5), g);
  CHECK(bump[*g.index_of(1.5)] == 0.0);
  CHECK(bump[*g.index_of(1.0)] == 0.5);
  CHECK(bump[*g.index_of(-0.5)] == 0.5);

  CHECK_THROWS_AS(make_initial(InitialCondition::bump(1.0, 1.0), Grid::interval(5.0, 0.1, 11)), InvalidArgument);
  CHECK_THROWS_AS(InitialCondition::exponential(2.0, 1.0, 1.0), InvalidArgument);
  CHECK(InitialCondition::gaussian(1.0, 1.0).decay_class() == InitialCondition::DecayClass::gaussian);
  CHECK(InitialCondition::exponential(1.0, 1.0).decay_class() == InitialCondition::DecayClass::exponential);
}

TEST_CASE("coefficient fields") {
  const auto pw = CoefficientField::piecewise(1.0, 2.0, 10.0);
  CHECK(pw(Point{-10.0, 0.0}) == 1.0);
  CHECK(pw(Point{25.0, 0.0}) == 2.0);
  CHECK(pw(Point{0.0, 0.0}) == doctest::Approx(1.5));
  REQUIRE(pw.far_field().has_value());
  CHECK(pw.far_field()->radius == 10.0);
  const auto s = CoefficientField::sinusoidal(1.0, 0.5, 5.0);
  CHECK(s(Point{5.0 * M_PI / 2.0, 7.0}) == doctest::Approx(1.5));
  CHECK_FALSE(s.far_field().has_value());
  CHECK_THROWS_AS(CoefficientField::sinusoidal(1.0, 1.0, 5.0), InvalidArgument);
  CHECK_THROWS_AS(CoefficientField::constant(0.0), InvalidArgument);
}
