#include "kpplab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "kpplab/error.hpp"

namespace kpplab {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(fmt::format("{} must be positive and finite, got {}", name, v));
}

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw InvalidArgument(fmt::format("{} must lie in (0, 1), got {}", name, v));
}

double tent(double rate, double theta, double u) { return rate * std::min(u, theta * (1.0 - u) / (1.0 - theta)); }

double growth(GrowthProfile g, double u) {
  switch (g) {
    case GrowthProfile::logistic:
      return u * (1.0 - u);
    case GrowthProfile::weak_allee:
      return u * u * (1.0 - u);
  }
  return 0.0;
}

const char* growth_name(GrowthProfile g) { return g == GrowthProfile::logistic ? "logistic" : "weak_allee"; }

}  // namespace

double smoothstep_weight(double x, double radius) {
  if (x <= -radius) return 0.0;
  if (x >= radius) return 1.0;
  const double s = (x + radius) / (2.0 * radius);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

// CoefficientField ------------------------------------------------------------

CoefficientField CoefficientField::constant(double diffusivity) {
  require_positive(diffusivity, "diffusivity");
  CoefficientField c;
  c.kind_ = Kind::constant;
  c.label_ = fmt::format("constant({})", diffusivity);
  c.params_ = {diffusivity};
  c.far_field_ = FarField{diffusivity, diffusivity, 0.0};
  c.eval_ = [diffusivity](Point) { return diffusivity; };
  return c;
}

CoefficientField CoefficientField::sinusoidal(double base, double amplitude, double scale) {
  require_positive(base, "base diffusivity");
  require_positive(scale, "sinusoid scale");
  if (std::abs(amplitude) >= base) {
    throw InvalidArgument(fmt::format("|amplitude| {} must be below the base {} for ellipticity", amplitude, base));
  }
  CoefficientField c;
  c.kind_ = Kind::sinusoidal;
  c.label_ = fmt::format("{} + {} sin(x/{})", base, amplitude, scale);
  c.params_ = {base, amplitude, scale};
  if (amplitude == 0.0) c.far_field_ = FarField{base, base, 0.0};
  c.eval_ = [base, amplitude, scale](Point p) { return base + amplitude * std::sin(p.x / scale); };
  return c;
}

CoefficientField CoefficientField::function(std::function<double(Point)> a, std::string label,
                                            std::optional<FarField> constant_outside) {
  if (!a) throw InvalidArgument("coefficient function is empty");
  CoefficientField c;
  c.kind_ = Kind::function;
  c.label_ = std::move(label);
  c.far_field_ = constant_outside;
  c.eval_ = std::move(a);
  return c;
}

CoefficientField CoefficientField::piecewise(double minus, double plus, double radius) {
  require_positive(minus, "a-");
  require_positive(plus, "a+");
  require_positive(radius, "transition radius");
  CoefficientField c;
  c.kind_ = Kind::piecewise;
  c.label_ = fmt::format("piecewise({}, {}, R={})", minus, plus, radius);
  c.params_ = {minus, plus, radius};
  c.far_field_ = FarField{minus, plus, radius};
  c.eval_ = [minus, plus, radius](Point p) {
    const double w = smoothstep_weight(p.x, radius);
    return (1.0 - w) * minus + w * plus;
  };
  return c;
}

bool CoefficientField::gradient_vanishes_at_infinity() const {
  if (far_field_) return true;
  return kind_ == Kind::sinusoidal && params_[1] == 0.0;
}

// Reaction --------------------------------------------------------------------

Reaction Reaction::none() {
  Reaction r;
  r.kind_ = Kind::none;
  r.label_ = "none";
  r.s1_ = 0.5;
  return r;
}

Reaction Reaction::logistic(double rate) {
  require_positive(rate, "logistic rate");
  Reaction r;
  r.kind_ = Kind::logistic;
  r.label_ = fmt::format("logistic({})", rate);
  r.params_ = {rate};
  r.s1_ = 0.5;
  return r;
}

Reaction Reaction::separable(double base, double amplitude, double scale, GrowthProfile g) {
  require_positive(base, "rate base");
  require_positive(scale, "rate scale");
  if (std::abs(amplitude) >= base) throw InvalidArgument("rate amplitude must be below the base to keep r positive");
  Reaction r;
  r.kind_ = Kind::separable;
  r.label_ = fmt::format("({} + {} sin(x/{})) * {}(u)", base, amplitude, scale, growth_name(g));
  r.params_ = {base, amplitude, scale, static_cast<double>(g)};
  r.s1_ = 0.5;
  r.osc_ok_ = amplitude == 0.0;
  r.r_ = [base, amplitude, scale](Point p) { return base + amplitude * std::sin(p.x / scale); };
  r.g_plus_ = [g](double u) { return growth(g, u); };
  return r;
}

Reaction Reaction::separable(std::function<double(Point)> rfun, std::function<double(double)> g, std::string label) {
  if (!rfun || !g) throw InvalidArgument("separable reaction needs both r and g");
  Reaction r;
  r.kind_ = Kind::separable;
  r.label_ = std::move(label);
  r.s1_ = 0.5;
  r.osc_ok_ = false;
  r.r_ = std::move(rfun);
  r.g_plus_ = std::move(g);
  return r;
}

Reaction Reaction::piecewise_kpp(double rate_minus, double rate_plus, double theta, double radius) {
  require_positive(rate_minus, "rate-");
  require_positive(rate_plus, "rate+");
  require_open_unit(theta, "theta");
  require_positive(radius, "transition radius");
  Reaction r;
  r.kind_ = Kind::piecewise;
  r.label_ = fmt::format("piecewise_kpp({}, {}, theta={}, R={})", rate_minus, rate_plus, theta, radius);
  r.params_ = {rate_minus, rate_plus, theta, radius};
  r.radius_ = radius;
  r.s1_ = 0.5 * (1.0 + theta);
  r.linear_claim_ = LinearNearZero{rate_minus, rate_plus, theta};
  r.g_minus_ = [rate_minus, theta](double u) { return tent(rate_minus, theta, u); };
  r.g_plus_ = [rate_plus, theta](double u) { return tent(rate_plus, theta, u); };
  return r;
}

Reaction Reaction::piecewise(std::function<double(double)> f_minus, std::function<double(double)> f_plus,
                             double radius, std::optional<LinearNearZero> claim, std::string label) {
  if (!f_minus || !f_plus) throw InvalidArgument("piecewise reaction needs both f- and f+");
  require_positive(radius, "transition radius");
  Reaction r;
  r.kind_ = Kind::piecewise;
  r.label_ = std::move(label);
  r.params_ = {radius};
  r.radius_ = radius;
  r.s1_ = 0.5;
  r.linear_claim_ = claim;
  r.g_minus_ = std::move(f_minus);
  r.g_plus_ = std::move(f_plus);
  return r;
}

double Reaction::operator()(Point p, double u) const {
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::logistic:
      return params_[0] * u * (1.0 - u);
    case Kind::separable:
      return r_(p) * g_plus_(u);
    case Kind::piecewise: {
      const double w = smoothstep_weight(p.x, radius_);
      if (w == 0.0) return g_minus_(u);
      if (w == 1.0) return g_plus_(u);
      return w * g_plus_(u) + (1.0 - w) * g_minus_(u);
    }
  }
  return 0.0;
}

std::optional<double> Reaction::logistic_rate() const {
  if (kind_ != Kind::logistic) return std::nullopt;
  return params_[0];
}

// InitialCondition --------------------------------------------------------------

InitialCondition InitialCondition::gaussian(double amplitude, double rate) {
  require_positive(amplitude, "gaussian amplitude");
  require_positive(rate, "gaussian rate");
  InitialCondition ic;
  ic.kind_ = Kind::gaussian;
  ic.params_ = {amplitude, rate};
  return ic;
}

InitialCondition InitialCondition::exponential(double gamma, double rate, std::optional<double> delta) {
  require_positive(gamma, "gamma");
  require_positive(rate, "exponential rate");
  const double d = delta.value_or(gamma);
  if (d < gamma) throw InvalidArgument(fmt::format("delta {} must be >= gamma {}", d, gamma));
  InitialCondition ic;
  ic.kind_ = Kind::exponential;
  ic.params_ = {gamma, rate, d};
  return ic;
}

InitialCondition InitialCondition::bump(double radius, double height) {
  require_positive(radius, "bump radius");
  if (!(height > 0.0 && height <= 1.0)) throw InvalidArgument(fmt::format("bump height must lie in (0, 1], got {}", height));
  InitialCondition ic;
  ic.kind_ = Kind::bump;
  ic.params_ = {radius, height};
  return ic;
}

InitialCondition InitialCondition::constant(double value) {
  if (!(value > 0.0 && value <= 1.0)) throw InvalidArgument(fmt::format("constant initial value must lie in (0, 1], got {}", value));
  InitialCondition ic;
  ic.kind_ = Kind::constant;
  ic.params_ = {value};
  return ic;
}

double InitialCondition::operator()(Point p) const {
  double v = 0.0;
  switch (kind_) {
    case Kind::gaussian:
      v = params_[0] * std::exp(-params_[1] * p.norm_squared());
      break;
    case Kind::exponential:
      v = params_[0] * std::exp(-params_[1] * p.norm());
      break;
    case Kind::bump:
      v = p.norm() <= params_[0] ? params_[1] : 0.0;
      break;
    case Kind::constant:
      v = params_[0];
      break;
  }
  return std::clamp(v, 0.0, 1.0);
}

InitialCondition::DecayClass InitialCondition::decay_class() const {
  switch (kind_) {
    case Kind::gaussian:
    case Kind::bump:
      return DecayClass::gaussian;
    case Kind::exponential:
      return DecayClass::exponential;
    case Kind::constant:
      return DecayClass::none;
  }
  return DecayClass::none;
}

// Problem -------------------------------------------------------------------

void Problem::check() const {
  if (dimension != 1 && dimension != 2) throw InvalidArgument(fmt::format("dimension must be 1 or 2, got {}", dimension));
  require_positive(half_width, "half-width");
  if (auto ff = coefficient.far_field(); ff && coefficient.kind() == CoefficientField::Kind::piecewise &&
                                         !(half_width > ff->radius)) {
    throw InvalidArgument(fmt::format("half-width {} must exceed the coefficient transition radius {}", half_width, ff->radius));
  }
  if (reaction.kind() == Reaction::Kind::piecewise && !(half_width > reaction.radius())) {
    throw InvalidArgument(fmt::format("half-width {} must exceed the reaction transition radius {}", half_width, reaction.radius()));
  }
}

bool HypothesisReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second.pass; });
}

// Validation -------------------------------------------------------------------

namespace {

std::vector<Point> sample_points(const Problem& p, std::size_t n) {
  std::vector<double> xs;
  xs.reserve(n + 3);
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(-p.half_width + 2.0 * p.half_width * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  xs.push_back(0.0);
  if (double r = p.reaction.radius(); r > 0.0) {
    xs.push_back(-r);
    xs.push_back(r);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<Point> pts;
  if (p.dimension == 1) {
    for (double x : xs) pts.push_back({x, 0.0});
  } else {
    for (double y : xs)
      for (double x : xs) pts.push_back({x, y});
  }
  return pts;
}

std::vector<double> sample_levels(std::size_t n, double s0) {
  std::vector<double> us;
  for (std::size_t i = 0; i < n; ++i) us.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
  for (double s : {1e-9, 1e-6, 1e-3, s0}) us.push_back(s);
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());
  return us;
}

}  // namespace

HypothesisReport validate_problem(const Problem& p, std::size_t n_samples, const ValidationOptions& opts) {
  if (n_samples < 16) throw InvalidArgument(fmt::format("need at least 16 samples per axis, got {}", n_samples));
  require_open_unit(opts.s0, "s0");
  p.check();

  const auto points = sample_points(p, n_samples);
  const auto levels = sample_levels(n_samples, opts.s0);

  HypothesisReport rep;
  rep.s0 = opts.s0;
  rep.s1 = p.reaction.c1_window_start();

  // Ellipticity.
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    Point at_lo;
    for (const auto& x : points) {
      const double a = p.coefficient(x);
      if (a < lo) {
        lo = a;
        at_lo = x;
      }
      hi = std::max(hi, a);
    }
    Verdict v;
    if (!(lo > 0.0) || !std::isfinite(hi)) {
      v.pass = false;
      v.detail = fmt::format("diffusivity {} is not positive and finite", lo);
      v.witness = Witness{at_lo, 0.0};
      rep.nu = std::numeric_limits<double>::infinity();
    } else {
      rep.nu = std::max({1.0, hi, 1.0 / lo});
      v.detail = fmt::format("{} <= a <= {}", lo, hi);
    }
    rep.verdicts["ellipticity"] = v;
  }

  // Zeros at 0 and 1.
  for (const auto& x : points) {
    const double f0 = p.reaction(x, 0.0);
    const double f1 = p.reaction(x, 1.0);
    if (std::abs(f0) > opts.zero_tolerance || std::abs(f1) > opts.zero_tolerance) {
      throw InvalidArgument(fmt::format("malformed reaction: f(x, 0) = {} and f(x, 1) = {} at x = ({}, {})", f0, f1, x.x, x.y));
    }
  }
  rep.verdicts["reaction_zeros"] = Verdict{true, "f(x, 0) = f(x, 1) = 0 on all samples", std::nullopt};

  // Lipschitz bound f(x, s) <= L s and KPP lower bound f(x, s) >= mu s on [0, s0].
  {
    double lip = 0.0;
    double mu = std::numeric_limits<double>::infinity();
    Witness mu_at;
    for (const auto& x : points) {
      for (double s : levels) {
        if (s <= 0.0) continue;
        const double ratio = p.reaction(x, s) / s;
        lip = std::max(lip, ratio);
        if (s <= opts.s0 && ratio < mu) {
          mu = ratio;
          mu_at = Witness{x, s};
        }
      }
    }
    rep.lipschitz = lip;
    rep.mu = mu;
    rep.verdicts["lipschitz"] = Verdict{std::isfinite(lip), fmt::format("f(x, s) <= {} s", lip), std::nullopt};
    Verdict v;
    v.pass = mu >= opts.rate_floor;
    if (v.pass) {
      v.detail = fmt::format("f(x, s) >= {} s on [0, {}]", mu, opts.s0);
    } else {
      v.detail = fmt::format("f(x, s)/s drops to {} near s = 0; no positive lower rate", mu);
      v.witness = mu_at;
    }
    rep.verdicts["kpp_lower_bound"] = v;
  }

  // u -> f(x, 1 - u)/u non-increasing on (0, 1].
  {
    Verdict v{true, "f(x, 1 - u)/u non-increasing on all samples", std::nullopt};
    for (const auto& x : points) {
      double prev = std::numeric_limits<double>::infinity();
      double prev_u = 0.0;
      for (double u : levels) {
        if (u <= 0.0) continue;
        const double ratio = p.reaction(x, 1.0 - u) / u;
        // 1 - u carries an absolute rounding error of eps, i.e. eps / u relative to u.
        const double slack = 1e-12 + 4.0 * std::numeric_limits<double>::epsilon() / std::min(u, prev_u > 0.0 ? prev_u : u);
        if (ratio > prev + slack * std::max(1.0, std::abs(prev))) {
          v.pass = false;
          v.detail = fmt::format("f(x, 1-u)/u increases from {} to {} at u = {}", prev, ratio, u);
          v.witness = Witness{x, u};
          break;
        }
        prev = ratio;
        prev_u = u;
      }
      if (!v.pass) break;
    }
    rep.verdicts["kpp_ratio"] = v;
  }

  // Initial datum.
  {
    Verdict v{true, "", std::nullopt};
    double peak = 0.0;
    for (const auto& x : points) peak = std::max(peak, p.initial(x));
    if (peak <= 0.0) {
      v.pass = false;
      v.detail = "initial datum vanishes on every sample";
    } else if (p.initial.decay_class() == InitialCondition::DecayClass::none) {
      v.pass = false;
      v.detail = "initial datum has neither Gaussian nor exponential decay";
    } else {
      v.detail = p.initial.decay_class() == InitialCondition::DecayClass::gaussian ? "Gaussian decay class"
                                                                                  : "exponential decay class";
    }
    rep.verdicts["initial_data"] = v;
  }

  if (!p.coefficient.gradient_vanishes_at_infinity()) {
    rep.warnings.push_back(fmt::format("coefficient '{}': decay of |grad a| at infinity not established", p.coefficient.label()));
  }
  if (!p.reaction.oscillation_vanishes_at_infinity()) {
    rep.warnings.push_back(fmt::format("reaction '{}': vanishing oscillation of f_u(., 0) at infinity not established", p.reaction.label()));
  }
  return rep;
}

GridFunction make_initial(const InitialCondition& spec, const Grid& grid) {
  GridFunction u(grid);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = spec(grid.point(k));
  if (u.max() <= 0.0) throw InvalidArgument("initial datum is identically zero on the grid");
  return u;
}

Problem builtin_problem(const std::string& name) {
  Problem p;
  if (name == "homogeneous-kpp") {
    p.half_width = 200.0;
    return p;
  }
  if (name == "heterogeneous-kpp") {
    p.half_width = 200.0;
    p.coefficient = CoefficientField::piecewise(1.0, 2.0, 10.0);
    p.reaction = Reaction::piecewise([](double u) { return 0.5 * u * (1.0 - u); },
                                     [](double u) { return u * (1.0 - u); }, 10.0, std::nullopt,
                                     "logistic 0.5 | logistic 1, R=10");
    return p;
  }
  if (name == "piecewise-kpp") {
    p.half_width = 150.0;
    p.reaction = Reaction::piecewise_kpp(0.5, 1.0, 0.3, 10.0);
    return p;
  }
  throw InvalidArgument(fmt::format("unknown builtin problem '{}'", name));
}

std::vector<std::string> builtin_problem_names() { return {"homogeneous-kpp", "heterogeneous-kpp", "piecewise-kpp"}; }

}  // namespace kpplab
