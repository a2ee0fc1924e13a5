#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kpplab/grid.hpp"

namespace kpplab {

/// C^2 quintic smoothstep: 0 for x <= -radius, 1 for x >= radius.
double smoothstep_weight(double x, double radius);

/// Scalar diffusivity field a(x), used as A(x) = a(x) I.
class CoefficientField {
 public:
  enum class Kind { constant, sinusoidal, function, piecewise };

  /// Values of a piecewise field outside its transition zone.
  struct FarField {
    double minus = 1.0;
    double plus = 1.0;
    double radius = 0.0;
  };

  static CoefficientField constant(double diffusivity);
  /// a(x) = base + amplitude * sin(x / scale), depending on the first coordinate only.
  static CoefficientField sinusoidal(double base, double amplitude, double scale);
  /// User-supplied field. `constant_outside` marks fields known to be constant for |x| >= radius.
  static CoefficientField function(std::function<double(Point)> a, std::string label,
                                   std::optional<FarField> constant_outside = std::nullopt);
  /// a^- for x <= -radius, a^+ for x >= radius, smoothstep blend in between.
  static CoefficientField piecewise(double minus, double plus, double radius);

  double operator()(Point p) const { return eval_(p); }

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  /// Parameters the field was built from (constant: {D}; sinusoidal: {base, amplitude, scale};
  /// piecewise: {minus, plus, radius}).
  const std::vector<double>& parameters() const { return params_; }
  /// Set when the field is exactly constant on each side outside a bounded interval.
  std::optional<FarField> far_field() const { return far_field_; }
  /// True when |grad a| vanishes at infinity by construction.
  bool gradient_vanishes_at_infinity() const;

 private:
  CoefficientField() = default;

  Kind kind_ = Kind::constant;
  std::string label_;
  std::vector<double> params_;
  std::optional<FarField> far_field_;
  std::function<double(Point)> eval_;
};

/// Claim that f(x, u) = rate^± u for u in [0, theta] and ±x >= radius.
struct LinearNearZero {
  double rate_minus = 1.0;
  double rate_plus = 1.0;
  double theta = 0.5;
};

/// Growth profile g(u) for separable reactions r(x) g(u).
enum class GrowthProfile { logistic, weak_allee };

/// Reaction term f(x, u).
class Reaction {
 public:
  enum class Kind { none, logistic, separable, piecewise };

  /// f = 0 (pure diffusion).
  static Reaction none();
  /// f = rate u (1 - u).
  static Reaction logistic(double rate);
  /// f = r(x) g(u) with r(x) = base + amplitude sin(x / scale).
  static Reaction separable(double base, double amplitude, double scale, GrowthProfile g);
  /// f = r(x) g(u) for arbitrary user functions.
  static Reaction separable(std::function<double(Point)> r, std::function<double(double)> g,
                            std::string label);
  /// Tent-shaped piecewise KPP: f^±(u) = rate^± min(u, theta (1 - u) / (1 - theta)),
  /// blended by w(x) f^+ + (1 - w(x)) f^- with the smoothstep on [-radius, radius].
  static Reaction piecewise_kpp(double rate_minus, double rate_plus, double theta, double radius);
  /// Generic piecewise reaction with the same blend and an optional linear-near-zero claim.
  static Reaction piecewise(std::function<double(double)> f_minus, std::function<double(double)> f_plus,
                            double radius, std::optional<LinearNearZero> claim, std::string label);

  double operator()(Point p, double u) const;

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const std::vector<double>& parameters() const { return params_; }
  /// Homogeneous logistic rate, when kind() == logistic.
  std::optional<double> logistic_rate() const;
  std::optional<LinearNearZero> linear_near_zero() const { return linear_claim_; }
  /// Transition radius of piecewise reactions (0 otherwise).
  double radius() const { return radius_; }
  /// Start of the C^1 window near u = 1.
  double c1_window_start() const { return s1_; }
  bool oscillation_vanishes_at_infinity() const { return osc_ok_; }

 private:
  Reaction() = default;

  Kind kind_ = Kind::none;
  std::string label_;
  std::vector<double> params_;
  double radius_ = 0.0;
  double s1_ = 0.0;
  bool osc_ok_ = true;
  std::optional<LinearNearZero> linear_claim_;
  std::function<double(Point)> r_;
  std::function<double(double)> g_minus_;
  std::function<double(double)> g_plus_;
};

/// Initial datum u0, clipped to [0, 1].
class InitialCondition {
 public:
  enum class Kind { gaussian, exponential, bump, constant };
  enum class DecayClass { gaussian, exponential, none };

  /// amplitude * exp(-rate |x|^2)
  static InitialCondition gaussian(double amplitude, double rate);
  /// gamma * exp(-rate |x|), capped at 1; `delta` >= gamma is the upper decay constant.
  static InitialCondition exponential(double gamma, double rate, std::optional<double> delta = std::nullopt);
  /// `height` on |x| <= radius, exactly 0 outside.
  static InitialCondition bump(double radius, double height);
  /// Domain-filling constant (test helper; carries no decay class).
  static InitialCondition constant(double value);

  double operator()(Point p) const;

  Kind kind() const { return kind_; }
  DecayClass decay_class() const;
  const std::vector<double>& parameters() const { return params_; }

 private:
  InitialCondition() = default;

  Kind kind_ = Kind::bump;
  std::vector<double> params_;
};

/// Full description of u_t = div(a(x) grad u) + f(x, u) on a truncated box.
struct Problem {
  int dimension = 1;
  double half_width = 50.0;
  CoefficientField coefficient = CoefficientField::constant(1.0);
  Reaction reaction = Reaction::logistic(1.0);
  InitialCondition initial = InitialCondition::bump(1.0, 1.0);

  /// Throws InvalidArgument on violated structural invariants.
  void check() const;
};

struct Witness {
  Point x;
  double u = 0.0;
};

struct Verdict {
  bool pass = true;
  std::string detail;
  std::optional<Witness> witness;
};

/// Sampled constants and per-hypothesis verdicts for a Problem.
struct HypothesisReport {
  double nu = 1.0;         // ellipticity: nu^-1 <= a <= nu
  double lipschitz = 0.0;  // f(x, s) <= lipschitz * s
  double mu = 0.0;         // f(x, s) >= mu * s on [0, s0]
  double s0 = 0.1;
  double s1 = 0.0;
  std::map<std::string, Verdict> verdicts;
  std::vector<std::string> warnings;

  bool all_pass() const;
};

struct ValidationOptions {
  double s0 = 0.1;
  /// A KPP lower bound mu below this is treated as absent.
  double rate_floor = 1e-6;
  double zero_tolerance = 1e-12;
};

/// Samples the structural hypotheses on n_samples points per axis in x and in u.
/// Throws InvalidArgument when f(x, 0) or f(x, 1) departs from 0 beyond tolerance.
HypothesisReport validate_problem(const Problem& p, std::size_t n_samples, const ValidationOptions& opts = {});

/// Samples u0 on the grid. Throws InvalidArgument for an all-zero result.
GridFunction make_initial(const InitialCondition& spec, const Grid& grid);

/// Named reference problems: "homogeneous-kpp", "heterogeneous-kpp", "piecewise-kpp".
Problem builtin_problem(const std::string& name);
std::vector<std::string> builtin_problem_names();

}  // namespace kpplab
