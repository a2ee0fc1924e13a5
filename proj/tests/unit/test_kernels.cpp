#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kpplab/error.hpp"
#include "kpplab/kernels.hpp"

using namespace kpplab;

TEST_CASE("heat kernel against frozen oracle values") {
  CHECK(gaussian_kernel(1.0, 1.0, Point{}, 1) == doctest::Approx(0.28209479177387814).epsilon(1e-14));
  CHECK(gaussian_kernel(2.0, 3.0, Point{1.0, 0.0}, 1) == doctest::Approx(0.11046478188859791).epsilon(1e-14));
  // Diffusivity enters only through D t.
  CHECK(gaussian_kernel(2.5, 1.0, Point{0.7, 0.0}, 1) == doctest::Approx(gaussian_kernel(1.0, 2.5, Point{0.7, 0.0}, 1)));
  CHECK(gaussian_kernel(1.0, 1.0, Point{}, 2) == doctest::Approx(1.0 / (4.0 * std::numbers::pi)));
  CHECK_THROWS_AS(gaussian_kernel(1.0, 0.0, Point{}, 1), InvalidArgument);
}

TEST_CASE("half-line Green function against frozen oracle values") {
  CHECK(half_line_green({1.0, 0.0}, 1.0, 1.0, 1.0) == doctest::Approx(0.17831791741872947).epsilon(1e-14));
  CHECK(half_line_green({2.0, 0.5}, 1.5, 2.0, 0.7) == doctest::Approx(0.11168561948139424).epsilon(1e-14));
  CHECK(half_line_green_dt({1.0, 1.0}, 2.0, 3.0, 1.0) == doctest::Approx(0.5448931335341686).epsilon(1e-13));
  CHECK(half_line_green_dt({1.0, 1.0}, 3.0, 5.0, 1.0) == doctest::Approx(0.80323783850020622).epsilon(1e-13));
}

TEST_CASE("half-line Green function: symmetry, boundary zero, positivity") {
  const HalfLineParams pp{1.3, 0.7};
  for (double t : {0.1, 1.0, 7.0}) {
    for (double x : {0.0, 0.2, 1.5, 9.0}) {
      for (double y : {0.0, 0.4, 3.0}) {
        CHECK(half_line_green(pp, t, x, y) == doctest::Approx(half_line_green(pp, t, y, x)).epsilon(1e-14));
        CHECK(half_line_green(pp, t, x, y) >= 0.0);
      }
    }
    CHECK(half_line_green(pp, t, 0.0, 2.0) == 0.0);
  }
  CHECK_THROWS_AS(half_line_green(pp, 1.0, -1.0, 1.0), InvalidArgument);
}

TEST_CASE("closed-form G_t matches a central difference") {
  const HalfLineParams pp{0.8, 1.2};
  for (double t : {0.5, 2.0, 6.0}) {
    for (double x : {0.3, 2.0, 6.0}) {
      for (double y : {0.1, 1.0, 4.0}) {
        const double dt = 1e-5 * t;
        const double fd = (half_line_green(pp, t + dt, x, y) - half_line_green(pp, t - dt, x, y)) / (2.0 * dt);
        CHECK(half_line_green_dt(pp, t, x, y) == doctest::Approx(fd).epsilon(1e-6).scale(1e-12));
      }
    }
  }
}

TEST_CASE("positivity threshold and edge") {
  CHECK(t0_threshold(1.0) == doctest::Approx(2.0819767068693264).epsilon(1e-14));
  CHECK(t0_threshold(2.0) == doctest::Approx(1.0409883534346632).epsilon(1e-14));
  CHECK(t0_threshold(HalfLineParams{3.0, 0.5}) == doctest::Approx(2.0 * t0_threshold(1.0)));
  CHECK(positivity_edge(2.0, 1.0) == doctest::Approx(4.0));
  CHECK(phi_profile(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(phi_profile(0.9) < phi_profile(1.0));
  CHECK(phi_profile(1.1) < phi_profile(1.0));
  CHECK_THROWS_AS(t0_threshold(0.0), InvalidArgument);
}

TEST_CASE("half-line quadrature") {
  const Grid g = Grid::interval(0.0, 0.05, 801);
  std::vector<std::string> warnings;
  SUBCASE("zero datum stays zero") {
    const auto w = halfline_quadrature({1.0, 1.0}, GridFunction(g, 0.0), 1.0, &warnings);
    CHECK(w.max() == 0.0);
    CHECK(warnings.empty());
  }
  SUBCASE("growth enters as e^{rate t}") {
    GridFunction v0(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.coord(k);
      v0[k] = x * std::exp(-x * x);
    }
    const auto w0 = halfline_quadrature({1.0, 0.1}, v0, 1.5);
    const auto w1 = halfline_quadrature({1.0, 0.5}, v0, 1.5);
    for (std::size_t k = 0; k < g.size(); k += 37) {
      CHECK(w1[k] == doctest::Approx(std::exp(0.6) * w0[k]).epsilon(1e-12).scale(1e-300));
    }
    CHECK(w0[0] == 0.0);
  }
  SUBCASE("datum at the far edge warns and negative data throw") {
    const auto w = halfline_quadrature({1.0, 1.0}, GridFunction(g, 0.5), 1.0, &warnings);
    CHECK(warnings.size() == 1);
    CHECK(w.max() > 0.0);
    GridFunction neg(g, 0.0);
    neg[3] = -1.0;
    CHECK_THROWS_AS(halfline_quadrature({1.0, 1.0}, neg, 1.0), InvalidArgument);
  }
}

TEST_CASE("G_t is positive on the guaranteed region for other rates") {
  GreenScanSpec spec;
  spec.rates = {0.25, 4.0};
  spec.diffusivities = {0.3, 3.0};
  spec.n_t = 8;
  spec.n_x = 12;
  spec.n_y = 30;
  std::size_t rows = 0;
  const auto rep = scan_green_dt(spec, [&](const GreenScanRow&) { ++rows; });
  CHECK(rep.points == 2 * 2 * 8 * 12 * 30);
  CHECK(rows == rep.points);
  CHECK(rep.violations == 0);
  CHECK(rep.worst.g_t > 0.0);
  CHECK(rep.worst.x >= positivity_edge(rep.worst.a, rep.worst.t) - 1e-12);
}

TEST_CASE("Aronson fit for constant diffusion") {
  const Grid g = Grid::symmetric(1, 30.0, 0.05);
  const double times[] = {1.0, 2.0, 4.0};
  const auto fs = fundamental_solution(CoefficientField::constant(1.0), times, Point{}, g);
  AronsonWindow w;
  w.times = {1.0, 2.0, 4.0};
  w.radius = 6.0;
  const auto fit = fit_aronson_K(fs, w);
  CHECK(fit.K >= 1.0);
  CHECK(fit.K == std::max(fit.K_lower, fit.K_upper));
  CHECK(fit.K_gaussian <= 1.1);  // heat kernel itself, up to discretisation
  CHECK(fit.points > 0);

  AronsonWindow narrow = w;
  narrow.radius = 3.0;
  CHECK(fit_aronson_K(fs, narrow).K <= fit.K);

  AronsonWindow empty = w;
  empty.floor = 1e10;
  CHECK_THROWS_AS(fit_aronson_K(fs, empty), InsufficientData);
}

TEST_CASE("kernel ratio for constant diffusion") {
  CHECK(constant_coefficient_ratio(4.0, 1) == doctest::Approx(0.89442719099991588).epsilon(1e-14));
  CHECK(constant_coefficient_ratio(4.0, 2) == doctest::Approx(0.8));
  // Smallest tau with sqrt(tau / (tau + 1)) >= 0.9.
  const double tau_threshold = 4.2631578947368421;
  CHECK(constant_coefficient_ratio(tau_threshold, 1) == doctest::Approx(0.9).epsilon(1e-14));

  RatioWindow win;
  win.radius = 8.0;
  const KernelGridSpec spec{30.0, 0.05, 1};
  const auto rep = check_prop61(CoefficientField::constant(1.0), 4.0, 0.85, win, spec);
  CHECK(rep.pass);
  CHECK(rep.min_ratio == doctest::Approx(0.894427).epsilon(1e-3));
  CHECK(rep.argmin <= 0.1);
  const auto below = check_prop61(CoefficientField::constant(1.0), 4.0, 0.9, win, spec);
  CHECK_FALSE(below.pass);
  const auto above = check_prop61(CoefficientField::constant(1.0), 4.5, 0.9, win, spec);
  CHECK(above.pass);
  CHECK_THROWS_AS(check_prop61(CoefficientField::constant(1.0), 4.0, 1.0, win, spec), InvalidArgument);
}

TEST_CASE("amplitude sweep reports the largest passing amplitude") {
  RatioWindow win;
  win.radius = 6.0;
  const KernelGridSpec spec{30.0, 0.1, 1};
  const double amps[] = {0.0, 0.1};
  const auto sw = sweep_gradient_amplitude(amps, 5.0, 4.0, 0.85, win, spec);
  CHECK(sw.reports.size() == 2);
  CHECK(sw.largest_passing == doctest::Approx(0.1));
  const auto strict = sweep_gradient_amplitude(amps, 5.0, 4.0, 0.99, win, spec);
  CHECK(strict.largest_passing < 0.0);
}
