#include "kpplab_app/config.hpp"

#include <cstdlib>
#include <initializer_list>
#include <set>

#include <fmt/format.h>

namespace kpplab::app {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Map reader that remembers which keys were consumed so the rest can be rejected.
class Block {
 public:
  Block(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw SchemaError(path_.empty() ? "<root>" : path_, "expected a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  std::optional<double> number(const std::string& key) {
    auto n = take(key);
    if (!n) return std::nullopt;
    return as_number(*n, join(path_, key));
  }

  double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  double required(const std::string& key) {
    auto v = number(key);
    if (!v) throw SchemaError(join(path_, key), "required key is missing");
    return *v;
  }

  /// Required numbers read in document order, so the first missing key is reported.
  std::vector<double> required(std::initializer_list<const char*> keys) {
    std::vector<double> out;
    for (const char* k : keys) out.push_back(required(k));
    return out;
  }

  std::optional<std::string> text(const std::string& key) {
    auto n = take(key);
    if (!n) return std::nullopt;
    if (!n->IsScalar()) throw SchemaError(join(path_, key), "expected a scalar");
    return n->as<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    auto n = take(key);
    if (!n) return std::nullopt;
    const std::string p = join(path_, key);
    if (!n->IsSequence()) throw SchemaError(p, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n->size(); ++i) out.push_back(as_number((*n)[i], p + "." + std::to_string(i)));
    return out;
  }

  std::optional<YAML::Node> child(const std::string& key) { return take(key); }

  std::string path(const std::string& key) const { return join(path_, key); }

  /// Rejects every key that was not consumed.
  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw SchemaError(join(path_, key), "unknown key");
    }
  }

  static double as_number(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw SchemaError(path, "expected a number");
    const std::string s = n.Scalar();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw SchemaError(path, fmt::format("'{}' is not a number", s));
    return v;
  }

 private:
  std::optional<YAML::Node> take(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return node_[key];
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto guarded(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const InvalidArgument& e) {
    throw SchemaError(path, e.what());
  }
}

CoefficientField parse_coefficient(const YAML::Node& node, const std::string& path) {
  Block b(node, path);
  const std::string type = b.text("type").value_or("constant");
  CoefficientField c = guarded(path, [&] {
    if (type == "constant") return CoefficientField::constant(b.required("value"));
    if (type == "sinusoidal") {
      const auto v = b.required({"base", "amplitude", "scale"});
      return CoefficientField::sinusoidal(v[0], v[1], v[2]);
    }
    if (type == "piecewise") {
      const auto v = b.required({"minus", "plus", "radius"});
      return CoefficientField::piecewise(v[0], v[1], v[2]);
    }
    throw SchemaError(b.path("type"), fmt::format("unknown coefficient type '{}'", type));
  });
  b.finish();
  return c;
}

Reaction parse_reaction(const YAML::Node& node, const std::string& path) {
  Block b(node, path);
  const std::string type = b.text("type").value_or("logistic");
  Reaction r = guarded(path, [&] {
    if (type == "none") return Reaction::none();
    if (type == "logistic") return Reaction::logistic(b.number_or("rate", 1.0));
    if (type == "separable") {
      const std::string growth = b.text("growth").value_or("logistic");
      GrowthProfile g = GrowthProfile::logistic;
      if (growth == "weak_allee") {
        g = GrowthProfile::weak_allee;
      } else if (growth != "logistic") {
        throw SchemaError(b.path("growth"), fmt::format("unknown growth profile '{}'", growth));
      }
      const auto v = b.required({"base", "amplitude", "scale"});
      return Reaction::separable(v[0], v[1], v[2], g);
    }
    if (type == "piecewise_kpp") {
      const auto v = b.required({"rate_minus", "rate_plus", "theta", "radius"});
      return Reaction::piecewise_kpp(v[0], v[1], v[2], v[3]);
    }
    throw SchemaError(b.path("type"), fmt::format("unknown reaction type '{}'", type));
  });
  b.finish();
  return r;
}

InitialCondition parse_initial(const YAML::Node& node, const std::string& path) {
  Block b(node, path);
  const std::string type = b.text("type").value_or("bump");
  InitialCondition ic = guarded(path, [&] {
    if (type == "bump") {
      const double radius = b.number_or("radius", 1.0);
      return InitialCondition::bump(radius, b.number_or("height", 1.0));
    }
    if (type == "gaussian") {
      const auto v = b.required({"amplitude", "rate"});
      return InitialCondition::gaussian(v[0], v[1]);
    }
    if (type == "exponential") {
      const auto v = b.required({"gamma", "rate"});
      return InitialCondition::exponential(v[0], v[1], b.number("delta"));
    }
    if (type == "constant") return InitialCondition::constant(b.required("value"));
    throw SchemaError(b.path("type"), fmt::format("unknown initial condition type '{}'", type));
  });
  b.finish();
  return ic;
}

Problem parse_problem(const YAML::Node& node) {
  Block b(node, "problem");
  Problem p;
  if (auto name = b.text("builtin")) {
    p = guarded(b.path("builtin"), [&] { return builtin_problem(*name); });
  }
  if (auto d = b.number("dimension")) {
    if (*d != 1.0 && *d != 2.0) throw SchemaError(b.path("dimension"), "dimension must be 1 or 2");
    p.dimension = static_cast<int>(*d);
  }
  if (auto L = b.number("half_width")) p.half_width = *L;
  if (auto n = b.child("coefficient")) p.coefficient = parse_coefficient(*n, b.path("coefficient"));
  if (auto n = b.child("reaction")) p.reaction = parse_reaction(*n, b.path("reaction"));
  if (auto n = b.child("initial")) p.initial = parse_initial(*n, b.path("initial"));
  b.finish();
  guarded("problem", [&] {
    p.check();
    return 0;
  });
  return p;
}

SolverConfig parse_solver(const YAML::Node& node) {
  Block b(node, "solver");
  SolverConfig s;
  s.h = b.number_or("h", s.h);
  s.dt = b.number("dt");
  if (auto scheme = b.text("scheme")) {
    if (*scheme == "explicit") {
      s.scheme = Scheme::explicit_euler;
    } else if (*scheme == "imex") {
      s.scheme = Scheme::imex;
    } else {
      throw SchemaError(b.path("scheme"), fmt::format("unknown scheme '{}' (expected explicit or imex)", *scheme));
    }
  }
  s.t_final = b.number_or("t_final", 10.0);
  s.boundary_leak_tolerance = b.number_or("boundary_leak_tolerance", s.boundary_leak_tolerance);
  s.boundary_leak_abort = b.number_or("boundary_leak_abort", s.boundary_leak_abort);
  const auto every = b.number("snapshot_every");
  const auto times = b.numbers("snapshot_times");
  b.finish();

  if (!(s.h > 0.0)) throw SchemaError("solver.h", "must be positive");
  if (s.dt && !(*s.dt > 0.0)) throw SchemaError("solver.dt", "must be positive");
  if (!(s.t_final > 0.0)) throw SchemaError("solver.t_final", "must be positive");
  if (every && times) throw SchemaError("solver.snapshot_times", "conflicts with solver.snapshot_every");
  if (times) {
    s.snapshot_times = *times;
  } else {
    const double step = every.value_or(0.5);
    if (!(step > 0.0)) throw SchemaError("solver.snapshot_every", "must be positive");
    s.snapshot_times = uniform_times(0.0, s.t_final, step);
  }
  for (std::size_t i = 0; i < s.snapshot_times.size(); ++i) {
    const double t = s.snapshot_times[i];
    if (t < 0.0 || t > s.t_final + 1e-12 || (i > 0 && !(t > s.snapshot_times[i - 1]))) {
      throw SchemaError("solver.snapshot_times", "times must increase strictly within [0, t_final]");
    }
  }
  return s;
}

AnalysisConfig parse_analysis(const YAML::Node& node) {
  Block b(node, "analysis");
  AnalysisConfig a;
  if (auto v = b.numbers("eps_list")) a.eps_list = *v;
  if (auto v = b.numbers("levels")) a.levels = *v;
  if (auto v = b.numbers("speed_window")) {
    if (v->size() != 2 || !((*v)[0] < (*v)[1])) throw SchemaError("analysis.speed_window", "expected [begin, end] with begin < end");
    a.speed_begin = (*v)[0];
    a.speed_end = (*v)[1];
  }
  a.tau_floor = b.number_or("tau_floor", a.tau_floor);
  b.finish();
  for (double e : a.eps_list) {
    if (!(e > 0.0 && e <= 1.0)) throw SchemaError("analysis.eps_list", fmt::format("eps = {} is outside (0, 1]", e));
  }
  for (double l : a.levels) {
    if (!(l > 0.0 && l < 1.0)) throw SchemaError("analysis.levels", fmt::format("level {} is outside (0, 1)", l));
  }
  return a;
}

TumorConfig parse_tumor(const YAML::Node& node) {
  Block b(node, "tumor");
  TumorConfig t;
  t.schedule.sigma_img = b.number_or("sigma", t.schedule.sigma_img);
  t.comb = b.number_or("comb", t.comb);
  t.grazing_slope = b.number_or("grazing_slope", t.grazing_slope);
  const auto t0 = b.number("t0");
  const auto beta = b.number("beta");
  const auto events = b.child("events");
  if ((t0 || beta) && events) throw SchemaError("tumor.events", "conflicts with the single-event keys t0/beta");
  if (t0 || beta) {
    if (!t0) throw SchemaError("tumor.t0", "required with tumor.beta");
    if (!beta) throw SchemaError("tumor.beta", "required with tumor.t0");
    t.schedule.events.push_back({*t0, *beta});
  } else if (events) {
    if (!events->IsSequence()) throw SchemaError("tumor.events", "expected a list of {t, beta}");
    for (std::size_t i = 0; i < events->size(); ++i) {
      Block e((*events)[i], "tumor.events." + std::to_string(i));
      const auto v = e.required({"t", "beta"});
      TreatmentEvent ev{v[0], v[1]};
      e.finish();
      t.schedule.events.push_back(ev);
    }
  }
  b.finish();
  if (!(t.comb > 0.0)) throw SchemaError("tumor.comb", "must be positive");
  guarded("tumor", [&] {
    t.schedule.check();
    return 0;
  });
  return t;
}

}  // namespace

RunConfig parse_config(const YAML::Node& root) {
  Block b(root, "");
  RunConfig cfg;
  const auto problem = b.child("problem");
  const auto solver = b.child("solver");
  const auto analysis = b.child("analysis");
  const auto tumor = b.child("tumor");
  cfg.output = b.text("output");
  b.finish();

  cfg.problem = parse_problem(problem.value_or(YAML::Node()));
  cfg.solver = parse_solver(solver.value_or(YAML::Node()));
  cfg.analysis = parse_analysis(analysis.value_or(YAML::Node()));
  if (tumor) {
    cfg.tumor = parse_tumor(*tumor);
    for (const auto& e : cfg.tumor->schedule.events) {
      if (!(e.t < cfg.solver.t_final)) {
        throw SchemaError("tumor.events", fmt::format("event at t = {} is not before t_final = {}", e.t, cfg.solver.t_final));
      }
    }
  }
  return cfg;
}

YAML::Node load_config_file(const std::string& path) {
  try {
    return YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw SchemaError("<file>", fmt::format("cannot read '{}'", path));
  } catch (const YAML::Exception& e) {
    throw SchemaError("<file>", fmt::format("malformed YAML in '{}': {}", path, e.what()));
  }
}

RunConfig load_config(const std::string& path) { return parse_config(load_config_file(path)); }

void set_numeric(YAML::Node& root, const std::string& dotted, double value) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    parts.push_back(dotted.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (const auto& p : parts) {
    if (p.empty()) throw SchemaError(dotted, "malformed axis key");
  }

  // yaml-cpp nodes are handles; walk with fresh handles to avoid rebinding `root`.
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node cur = chain.back();
    const bool index = parts[i].find_first_not_of("0123456789") == std::string::npos;
    if (cur.IsSequence() && index) {
      const auto k = std::stoul(parts[i]);
      if (k >= cur.size()) throw SchemaError(dotted, "sequence index out of range");
      chain.push_back(cur[k]);
    } else if (cur.IsMap() || cur.IsNull()) {
      if (cur[parts[i]] && !cur[parts[i]].IsMap() && !cur[parts[i]].IsSequence()) {
        throw SchemaError(dotted, fmt::format("'{}' is not a block", parts[i]));
      }
      chain.push_back(cur[parts[i]]);
    } else {
      throw SchemaError(dotted, "path crosses a scalar");
    }
  }
  YAML::Node parent = chain.back();
  const std::string& leaf = parts.back();
  if (parent.IsSequence()) {
    const bool index = leaf.find_first_not_of("0123456789") == std::string::npos;
    if (!index) throw SchemaError(dotted, "sequence elements are addressed by index");
    const auto k = std::stoul(leaf);
    if (k >= parent.size()) throw SchemaError(dotted, "sequence index out of range");
    YAML::Node current = parent[k];
    if (!current.IsScalar()) throw SchemaError(dotted, "axis must name a numeric key");
    Block::as_number(current, dotted);
    current = fmt::format("{:.17g}", value);
    return;
  }
  if (parent[leaf]) {
    const YAML::Node current = parent[leaf];
    if (!current.IsScalar()) throw SchemaError(dotted, "axis must name a numeric key");
    Block::as_number(current, dotted);
  }
  parent[leaf] = fmt::format("{:.17g}", value);
}

}  // namespace kpplab::app
