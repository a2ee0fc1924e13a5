#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kpplab/grid.hpp"
#include "kpplab/model.hpp"
#include "kpplab/solver.hpp"

namespace kpplab {

// Closed forms ------------------------------------------------------------

/// exp(-|x|^2 / (4 D t)) / (4 pi D t)^(dim/2).
double gaussian_kernel(double diffusivity, double t, Point x, int dim);

/// Half-line problem v_t = a v_xx + rate v.
struct HalfLineParams {
  double diffusivity = 1.0;
  double rate = 1.0;

  void check() const;
};

/// Dirichlet Green function by reflection:
/// e^{rate t} / sqrt(4 pi a t) [exp(-(x-y)^2/(4at)) - exp(-(x+y)^2/(4at))], x, y >= 0.
double half_line_green(const HalfLineParams& pp, double t, double x, double y);

/// Time derivative of half_line_green in closed form.
double half_line_green_dt(const HalfLineParams& pp, double t, double x, double y);

/// s e^{-s}; maximal at s = 1.
double phi_profile(double s);

/// Time after which G_t > 0 for x >= sqrt(8 a t): 1/(2 rate) + e/((e - 1) rate).
double t0_threshold(double rate);
inline double t0_threshold(const HalfLineParams& pp) { return t0_threshold(pp.rate); }

/// Lower edge sqrt(8 a t) of the region where G_t is positive.
double positivity_edge(double diffusivity, double t);

/// Trapezoid quadrature w(t, x) = int_0^X G(t, x, y) v0(y) dy at every node of v0's grid.
/// v0 lives on an interval grid starting at 0. Appends a warning when v0 reaches the far edge.
GridFunction halfline_quadrature(const HalfLineParams& pp, const GridFunction& v0, double t,
                                 std::vector<std::string>* warnings = nullptr);

// Sign scan of G_t ----------------------------------------------------------

struct GreenScanSpec {
  std::vector<double> diffusivities{0.5, 1.0, 2.0};
  std::vector<double> rates{1.0};
  std::size_t n_t = 20;      // points of [t0, t_span * t0]
  double t_span = 5.0;
  std::size_t n_x = 50;      // points of [sqrt(8at), sqrt(8at) + x_width]
  double x_width = 10.0;
  std::size_t n_y = 100;     // points of (0, y_max]
  double y_max = 20.0;
};

struct GreenScanRow {
  double a, rate, t, x, y, g, g_t;
};

struct GreenScanReport {
  std::size_t points = 0;
  std::size_t violations = 0;
  GreenScanRow worst{};  // row with the smallest G_t / G ratio
};

/// Evaluates G_t over the guaranteed-positive region; `sink` (optional) receives every row.
GreenScanReport scan_green_dt(const GreenScanSpec& spec, const std::function<void(const GreenScanRow&)>& sink = {});

/// CSV header `a,lambda,t,x,y,G,G_t` and row writer.
void write_green_scan_header(std::ostream& os);
void write_green_scan_row(std::ostream& os, const GreenScanRow& row);

// Aronson sandwich ------------------------------------------------------------

struct AronsonWindow {
  std::vector<double> times;
  double radius = 10.0;  // |x - y| <= radius
  double floor = 1e-12;
};

struct AronsonWitness {
  double t = 0.0;
  Point x;
  std::string bound;  // "lower" or "upper"
};

/// Smallest K (to 1e-3) with exp(-K d^2/t) / (K t^{N/2}) <= p <= K exp(-d^2/(K t)) / t^{N/2}.
struct AronsonFit {
  double K = 1.0;           // literal form
  double K_lower = 1.0;
  double K_upper = 1.0;
  double K_gaussian = 1.0;  // same sandwich written around exp(-d^2/(4t)) / (4 pi t)^{N/2}
  AronsonWitness witness;
  AronsonWindow window;
  std::size_t points = 0;
};

/// Throws InsufficientData when no kernel value on the window clears the floor,
/// NumericalError when no finite K certifies the window.
AronsonFit fit_aronson_K(const FundamentalSolution& kernels, const AronsonWindow& window);

// Kernel ratio p(tau + 1) / p(tau) ---------------------------------------------

struct RatioWindow {
  double radius = 10.0;  // |x| <= radius
  double floor = 1e-12;
};

struct KernelGridSpec {
  double half_width = 40.0;
  double h = 0.05;
  int dim = 1;
};

struct RatioSample {
  double x;
  double ratio;
};

struct Prop61Report {
  double tau = 0.0;
  double sigma = 0.0;
  double min_ratio = 0.0;
  double argmin = 0.0;  // |x| at the minimum
  bool pass = false;
  std::vector<RatioSample> samples;
};

/// (tau / (tau + 1))^{dim/2}: the ratio at the origin for constant coefficients.
double constant_coefficient_ratio(double tau, int dim);

/// Minimum over the window of p(tau + 1, x; 0) / p(tau, x; 0), pass = (min_ratio >= sigma).
Prop61Report check_prop61(const CoefficientField& coefficient, double tau, double sigma, const RatioWindow& window,
                          const KernelGridSpec& grid = {});
/// Same, from precomputed kernels containing tau and tau + 1.
Prop61Report check_prop61(const FundamentalSolution& kernels, double tau, double sigma, const RatioWindow& window);

void write_ratio_csv(std::ostream& os, const Prop61Report& report);

struct AmplitudeSweep {
  std::vector<double> amplitudes;
  std::vector<Prop61Report> reports;
  /// Largest amplitude in the list whose report passes, or a negative value when none does.
  double largest_passing = -1.0;
};

/// check_prop61 for a(x) = 1 + A sin(x / scale) over the amplitude list.
AmplitudeSweep sweep_gradient_amplitude(std::span<const double> amplitudes, double scale, double tau, double sigma,
                                        const RatioWindow& window, const KernelGridSpec& grid = {});

}  // namespace kpplab
