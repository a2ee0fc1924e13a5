#include "kpplab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "kpplab/csv.hpp"
#include "kpplab/error.hpp"

namespace kpplab {

double gaussian_kernel(double diffusivity, double t, Point x, int dim) {
  if (!(t > 0.0) || !(diffusivity > 0.0)) throw InvalidArgument("gaussian_kernel needs t > 0 and D > 0");
  if (dim != 1 && dim != 2) throw InvalidArgument("gaussian_kernel supports dimensions 1 and 2");
  const double r2 = dim == 1 ? x.x * x.x : x.norm_squared();
  const double four_dt = 4.0 * diffusivity * t;
  return std::exp(-r2 / four_dt) / std::pow(std::numbers::pi * four_dt, 0.5 * dim);
}

void HalfLineParams::check() const {
  if (!(diffusivity > 0.0) || !(rate > 0.0)) {
    throw InvalidArgument(fmt::format("half-line parameters must be positive (a = {}, rate = {})", diffusivity, rate));
  }
}

namespace {

void check_green_args(const HalfLineParams& pp, double t, double x, double y) {
  if (!(pp.diffusivity > 0.0) || !(pp.rate >= 0.0)) throw InvalidArgument("half-line Green function needs a > 0, rate >= 0");
  if (!(t > 0.0)) throw InvalidArgument("half-line Green function needs t > 0");
  if (x < 0.0 || y < 0.0) throw InvalidArgument("half-line Green function needs x, y >= 0");
}

}  // namespace

// With A = (x-y)^2/(4at) and d = xy/(at) = (x+y)^2/(4at) - A, both kernels factor through
// e^{rate t - A}, leaving expm1(-d) for the reflected difference.
double half_line_green(const HalfLineParams& pp, double t, double x, double y) {
  check_green_args(pp, t, x, y);
  const double a = pp.diffusivity;
  const double A = (x - y) * (x - y) / (4.0 * a * t);
  const double d = x * y / (a * t);
  return std::exp(pp.rate * t - A) / std::sqrt(4.0 * std::numbers::pi * a * t) * -std::expm1(-d);
}

double half_line_green_dt(const HalfLineParams& pp, double t, double x, double y) {
  check_green_args(pp, t, x, y);
  const double a = pp.diffusivity;
  const double A = (x - y) * (x - y) / (4.0 * a * t);
  const double d = x * y / (a * t);
  const double c = pp.rate * t - 0.5 + A;
  const double bracket = -std::expm1(-d) * c - d * std::exp(-d);
  return std::exp(pp.rate * t - A) / std::sqrt(4.0 * std::numbers::pi * a * t * t * t) * bracket;
}

double phi_profile(double s) { return s * std::exp(-s); }

double t0_threshold(double rate) {
  if (!(rate > 0.0)) throw InvalidArgument("t0 needs a positive rate");
  constexpr double e = std::numbers::e;
  return 1.0 / (2.0 * rate) + e / ((e - 1.0) * rate);
}

double positivity_edge(double diffusivity, double t) { return std::sqrt(8.0 * diffusivity * t); }

GridFunction halfline_quadrature(const HalfLineParams& pp, const GridFunction& v0, double t,
                                 std::vector<std::string>* warnings) {
  pp.check();
  const Grid& grid = v0.grid();
  if (grid.dim() != 1 || std::abs(grid.origin()) > 1e-12) {
    throw InvalidArgument("halfline_quadrature needs a 1D grid starting at x = 0");
  }
  if (!(t > 0.0)) throw InvalidArgument("halfline_quadrature needs t > 0");
  const std::size_t n = grid.nodes_per_axis();
  for (std::size_t j = 0; j < n; ++j) {
    if (v0[j] < 0.0) throw InvalidArgument(fmt::format("v0 is negative ({}) at x = {}", v0[j], grid.coord(j)));
  }
  if (warnings && v0[n - 1] != 0.0) {
    warnings->push_back(fmt::format("v0 support reaches the truncation edge x = {}", grid.upper()));
  }

  const double h = grid.h();
  GridFunction w(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.coord(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (v0[j] == 0.0) continue;
      const double weight = (j == 0 || j + 1 == n) ? 0.5 * h : h;
      acc += weight * half_line_green(pp, t, x, grid.coord(j)) * v0[j];
    }
    w[i] = acc;
  }
  return w;
}

GreenScanReport scan_green_dt(const GreenScanSpec& spec, const std::function<void(const GreenScanRow&)>& sink) {
  if (spec.n_t < 2 || spec.n_x < 2 || spec.n_y < 1) throw InvalidArgument("scan needs n_t, n_x >= 2 and n_y >= 1");
  GreenScanReport rep;
  double worst = std::numeric_limits<double>::infinity();
  for (double a : spec.diffusivities) {
    for (double rate : spec.rates) {
      const HalfLineParams pp{a, rate};
      pp.check();
      const double t0 = t0_threshold(rate);
      for (std::size_t it = 0; it < spec.n_t; ++it) {
        const double t = t0 + (spec.t_span - 1.0) * t0 * static_cast<double>(it) / static_cast<double>(spec.n_t - 1);
        const double edge = positivity_edge(a, t);
        for (std::size_t ix = 0; ix < spec.n_x; ++ix) {
          const double x = edge + spec.x_width * static_cast<double>(ix) / static_cast<double>(spec.n_x - 1);
          for (std::size_t iy = 1; iy <= spec.n_y; ++iy) {
            const double y = spec.y_max * static_cast<double>(iy) / static_cast<double>(spec.n_y);
            const GreenScanRow row{a, rate, t, x, y, half_line_green(pp, t, x, y), half_line_green_dt(pp, t, x, y)};
            ++rep.points;
            if (!(row.g_t > 0.0)) ++rep.violations;
            const double score = row.g > 0.0 ? row.g_t / row.g : -std::numeric_limits<double>::infinity();
            if (score < worst) {
              worst = score;
              rep.worst = row;
            }
            if (sink) sink(row);
          }
        }
      }
    }
  }
  return rep;
}

void write_green_scan_header(std::ostream& os) { csv::header(os, {"a", "lambda", "t", "x", "y", "G", "G_t"}); }

void write_green_scan_row(std::ostream& os, const GreenScanRow& r) {
  csv::row(os, {r.a, r.rate, r.t, r.x, r.y, r.g, r.g_t});
}

// Aronson fit ---------------------------------------------------------------------

namespace {

struct KernelPoint {
  double t;
  double d2;
  double log_p;
  Point x;
};

constexpr double kLattice = 1e-3;
constexpr double kMaxK = 1e8;

// Smallest K = 1 + m kLattice satisfying a predicate that is monotone in K.
template <class Pred>
double smallest_lattice_K(Pred ok) {
  if (ok(1.0)) return 1.0;
  std::int64_t lo = 0;  // fails
  std::int64_t hi = 1;
  while (!ok(1.0 + static_cast<double>(hi) * kLattice)) {
    lo = hi;
    hi *= 2;
    if (1.0 + static_cast<double>(hi) * kLattice > kMaxK) {
      throw NumericalError("no finite K certifies the window (kernel corrupted or excessive leak)");
    }
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(1.0 + static_cast<double>(mid) * kLattice)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 1.0 + static_cast<double>(hi) * kLattice;
}

// Slack of each bound in log space (>= 0 means satisfied).
double lower_slack(const KernelPoint& q, double K, int dim, bool gaussian) {
  if (gaussian) {
    return q.log_p - (-K * q.d2 / (4.0 * q.t) - std::log(K) - 0.5 * dim * std::log(4.0 * std::numbers::pi * q.t));
  }
  return q.log_p - (-K * q.d2 / q.t - std::log(K) - 0.5 * dim * std::log(q.t));
}

double upper_slack(const KernelPoint& q, double K, int dim, bool gaussian) {
  if (gaussian) {
    return (std::log(K) - q.d2 / (4.0 * K * q.t) - 0.5 * dim * std::log(4.0 * std::numbers::pi * q.t)) - q.log_p;
  }
  return (std::log(K) - q.d2 / (K * q.t) - 0.5 * dim * std::log(q.t)) - q.log_p;
}

}  // namespace

AronsonFit fit_aronson_K(const FundamentalSolution& kernels, const AronsonWindow& window) {
  if (window.times.empty()) throw InvalidArgument("Aronson window has no times");
  if (kernels.kernels.empty()) throw InvalidArgument("no kernels supplied");
  const int dim = kernels.kernels.front().grid().dim();

  std::vector<KernelPoint> pts;
  for (double t : window.times) {
    const GridFunction& p = kernels.at(t);
    const Grid& g = p.grid();
    for (std::size_t k = 0; k < p.size(); ++k) {
      const Point x = g.point(k);
      const Point dx{x.x - kernels.source.x, dim == 1 ? 0.0 : x.y - kernels.source.y};
      const double d2 = dx.norm_squared();
      if (d2 > window.radius * window.radius || !(p[k] >= window.floor)) continue;
      pts.push_back({t, d2, std::log(p[k]), x});
    }
  }
  if (pts.empty()) throw InsufficientData("Aronson window is empty after floor filtering");

  auto all = [&](auto slack, bool gaussian) {
    return [&, slack, gaussian](double K) {
      return std::all_of(pts.begin(), pts.end(), [&](const KernelPoint& q) { return slack(q, K, dim, gaussian) >= 0.0; });
    };
  };

  AronsonFit fit;
  fit.window = window;
  fit.points = pts.size();
  fit.K_lower = smallest_lattice_K(all(lower_slack, false));
  fit.K_upper = smallest_lattice_K(all(upper_slack, false));
  fit.K = std::max(fit.K_lower, fit.K_upper);
  fit.K_gaussian = std::max(smallest_lattice_K(all(lower_slack, true)), smallest_lattice_K(all(upper_slack, true)));

  const bool lower_binds = fit.K_lower >= fit.K_upper;
  double tightest = std::numeric_limits<double>::infinity();
  for (const auto& q : pts) {
    const double s = lower_binds ? lower_slack(q, fit.K, dim, false) : upper_slack(q, fit.K, dim, false);
    if (s < tightest) {
      tightest = s;
      fit.witness = AronsonWitness{q.t, q.x, lower_binds ? "lower" : "upper"};
    }
  }
  return fit;
}

// Kernel ratio --------------------------------------------------------------------

double constant_coefficient_ratio(double tau, int dim) { return std::pow(tau / (tau + 1.0), 0.5 * dim); }

Prop61Report check_prop61(const FundamentalSolution& kernels, double tau, double sigma, const RatioWindow& window) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidArgument("sigma must lie in (0, 1)");
  const GridFunction& p0 = kernels.at(tau);
  const GridFunction& p1 = kernels.at(tau + 1.0);
  const Grid& g = p0.grid();

  Prop61Report rep;
  rep.tau = tau;
  rep.sigma = sigma;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p0.size(); ++k) {
    const Point x = g.point(k);
    const double r = x.norm();
    if (r > window.radius + 1e-12 || !(p0[k] >= window.floor) || !(p1[k] >= window.floor)) continue;
    const double ratio = p1[k] / p0[k];
    rep.samples.push_back({g.dim() == 1 ? x.x : r, ratio});
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.argmin = r;
    }
  }
  if (rep.samples.empty()) throw InsufficientData("ratio window is empty after floor filtering");
  rep.pass = rep.min_ratio >= sigma;
  return rep;
}

Prop61Report check_prop61(const CoefficientField& coefficient, double tau, double sigma, const RatioWindow& window,
                          const KernelGridSpec& spec) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  const Grid grid = Grid::symmetric(spec.dim, spec.half_width, spec.h);
  const double ts[] = {tau, tau + 1.0};
  const auto kernels = fundamental_solution(coefficient, ts, Point{}, grid);
  return check_prop61(kernels, tau, sigma, window);
}

void write_ratio_csv(std::ostream& os, const Prop61Report& report) {
  csv::header(os, {"tau", "sigma", "x", "ratio"});
  for (const auto& s : report.samples) csv::row(os, {report.tau, report.sigma, s.x, s.ratio});
}

AmplitudeSweep sweep_gradient_amplitude(std::span<const double> amplitudes, double scale, double tau, double sigma,
                                        const RatioWindow& window, const KernelGridSpec& grid) {
  AmplitudeSweep sweep;
  sweep.amplitudes.assign(amplitudes.begin(), amplitudes.end());
  for (double amp : amplitudes) {
    auto rep = check_prop61(CoefficientField::sinusoidal(1.0, amp, scale), tau, sigma, window, grid);
    if (rep.pass) sweep.largest_passing = std::max(sweep.largest_passing, amp);
    sweep.reports.push_back(std::move(rep));
  }
  return sweep;
}

}  // namespace kpplab
