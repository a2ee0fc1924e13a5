#include <doctest.h>

#include <cmath>
#include <string>

#include "kpplab_app/commands.hpp"
#include "kpplab_app/config.hpp"

using namespace kpplab;
using namespace kpplab::app;

namespace {

std::string schema_key(const std::string& yaml) {
  try {
    parse_config(YAML::Load(yaml));
  } catch (const SchemaError& e) {
    return e.key();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("defaults and a full document") {
  const auto empty = parse_config(YAML::Load("{}"));
  CHECK(empty.solver.t_final == 10.0);
  CHECK(empty.solver.snapshot_times.size() == 21);
  CHECK(empty.analysis.eps_list == std::vector<double>{0.1});
  CHECK_FALSE(empty.tumor);

  const auto cfg = parse_config(YAML::Load(R"(
problem:
  half_width: 40
  coefficient: {type: sinusoidal, base: 1, amplitude: 0.5, scale: 5}
  reaction: {type: piecewise_kpp, rate_minus: 0.5, rate_plus: 1, theta: 0.3, radius: 10}
  initial: {type: gaussian, amplitude: 0.8, rate: 0.2}
solver: {h: 0.2, t_final: 6, snapshot_every: 1, scheme: imex}
analysis: {eps_list: [0.1, 0.5], levels: [0.3], speed_window: [2, 6], tau_floor: 2}
tumor: {sigma: 0.4, t0: 3, beta: 0.6}
output: runs/a
)"));
  CHECK(cfg.problem.half_width == 40.0);
  CHECK(cfg.problem.coefficient.kind() == CoefficientField::Kind::sinusoidal);
  CHECK(cfg.problem.reaction.kind() == Reaction::Kind::piecewise);
  CHECK(cfg.solver.scheme == Scheme::imex);
  CHECK(cfg.solver.snapshot_times.size() == 7);
  CHECK(*cfg.analysis.speed_begin == 2.0);
  REQUIRE(cfg.tumor);
  CHECK(cfg.tumor->schedule.events.size() == 1);
  CHECK(cfg.tumor->schedule.sigma_img == 0.4);
  CHECK(*cfg.output == "runs/a");
}

TEST_CASE("unknown keys are rejected with their dotted path") {
  CHECK(schema_key("problem: {reation: {type: none}}") == "problem.reation");
  CHECK(schema_key("solvr: {}") == "solvr");
  CHECK(schema_key("problem: {coefficient: {type: constant, value: 1, extra: 2}}") == "problem.coefficient.extra");
  CHECK(schema_key("tumor: {events: [{t: 1, beta: 0.5, b: 1}]}") == "tumor.events.0.b");
}

TEST_CASE("type and range errors") {
  CHECK(schema_key("solver: {h: fine}") == "solver.h");
  CHECK(schema_key("solver: {h: -1}") == "solver.h");
  CHECK(schema_key("solver: {scheme: rk4}") == "solver.scheme");
  CHECK(schema_key("solver: {snapshot_every: 1, snapshot_times: [1]}") == "solver.snapshot_times");
  CHECK(schema_key("problem: {dimension: 3}") == "problem.dimension");
  CHECK(schema_key("problem: {builtin: nope}") == "problem.builtin");
  CHECK(schema_key("problem: {coefficient: {type: sinusoidal, base: 1}}") == "problem.coefficient.amplitude");
  CHECK(schema_key("problem: {coefficient: {type: constant, value: -1}}") == "problem.coefficient");
  CHECK(schema_key("analysis: {eps_list: [0]}") == "analysis.eps_list");
  CHECK(schema_key("analysis: {speed_window: [5, 1]}") == "analysis.speed_window");
  CHECK(schema_key("tumor: {t0: 3}") == "tumor.beta");
  CHECK(schema_key("tumor: {t0: 30, beta: 0.5}") == "tumor.events");
  CHECK(schema_key("tumor: {t0: 3, beta: 1.5}") == "tumor");
  CHECK(schema_key("[1, 2]") == "<root>");
}

TEST_CASE("set_numeric edits scalars along dotted paths") {
  YAML::Node root = YAML::Load("problem: {coefficient: {type: constant, value: 1}}\nanalysis: {eps_list: [0.1, 0.2]}");
  set_numeric(root, "problem.coefficient.value", 2.5);
  set_numeric(root, "analysis.eps_list.1", 0.3);
  set_numeric(root, "solver.h", 0.25);
  const auto cfg = parse_config(root);
  CHECK(cfg.problem.coefficient(Point{}) == 2.5);
  CHECK(cfg.analysis.eps_list[1] == 0.3);
  CHECK(cfg.solver.h == 0.25);
  CHECK_THROWS_AS(set_numeric(root, "problem.coefficient.type", 1.0), SchemaError);
}

TEST_CASE("sweep axis parsing") {
  const auto ax = parse_axis("tumor.beta=0.3,0.5,0.8");
  CHECK(ax.key == "tumor.beta");
  CHECK(ax.values == std::vector<double>{0.3, 0.5, 0.8});
  CHECK(parse_axis("solver.h=1e-1").values == std::vector<double>{0.1});
  CHECK_THROWS_AS(parse_axis("solver.h"), SchemaError);
  CHECK_THROWS_AS(parse_axis("=1"), SchemaError);
  CHECK_THROWS_AS(parse_axis("solver.h=fine"), SchemaError);
  CHECK_THROWS_AS(parse_axis("solver.h=1,,2"), SchemaError);
}
