#include "kpplab_app/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "kpplab_app/suites.hpp"

namespace kpplab::app {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(fmt::format("cannot write {}", path.string()));
  return os;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const SchemaError& e) {
    err << "error: invalid configuration: " << e.what() << "\n";
    return kSchema;
  } catch (const InvalidArgument& e) {
    err << "error: invalid argument: " << e.what() << "\n";
    return kSchema;
  } catch (const NumericalError& e) {
    err << "error: numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  }
}

fs::path resolve_output(const std::optional<std::string>& cli, const RunConfig& cfg) {
  if (cli) return *cli;
  if (cfg.output) return *cfg.output;
  throw SchemaError("output", "no output directory (use --out or the output key)");
}

void write_hypotheses(std::ostream& os, const HypothesisReport& rep) {
  os << "# hypotheses\n";
  os << "nu: " << csv::number(rep.nu) << "\n";
  os << "lipschitz: " << csv::number(rep.lipschitz) << "\n";
  os << "mu: " << csv::number(rep.mu) << "\n";
  for (const auto& [name, v] : rep.verdicts) {
    os << name << ": " << (v.pass ? "pass" : "fail");
    if (!v.detail.empty()) os << " (" << v.detail << ")";
    os << "\n";
  }
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
}

}  // namespace

RunSummary execute_run(const RunConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  RunSummary summary;
  summary.speed = std::nan("");

  const Trajectory traj = solve(cfg.problem, cfg.solver);
  {
    auto os = open_output(out / "trajectory.csv");
    write_trajectory_csv(os, traj);
  }
  const auto cert = theorem1_report(traj, cfg.analysis.eps_list);
  summary.T_eps = cert.eps.empty() ? std::nan("") : cert.eps.front().T_eps;
  summary.tail_inf_rhs = cert.tail_inf_abs;

  const double t_end = cfg.analysis.speed_end.value_or(cfg.solver.t_final);
  const double t_begin = cfg.analysis.speed_begin.value_or(0.5 * t_end);
  std::vector<std::pair<double, std::string>> speeds;
  for (std::size_t i = 0; i < cfg.analysis.levels.size(); ++i) {
    const double level = cfg.analysis.levels[i];
    try {
      const SpeedFit fit = spreading_speed(traj, level, t_begin, t_end);
      if (i == 0) {
        summary.speed = fit.speed;
        auto os = open_output(out / "level.csv");
        write_level_csv(os, fit);
      }
      speeds.emplace_back(level, csv::number(fit.speed));
    } catch (const InsufficientData& e) {
      speeds.emplace_back(level, fmt::format("unavailable ({})", e.what()));
    }
  }

  {
    auto os = open_output(out / "certificate.txt");
    write_hypotheses(os, validate_problem(cfg.problem, 64));
    os << "# run\n";
    os << "dimension: " << cfg.problem.dimension << "\n";
    os << "dt: " << csv::number(traj.dt) << "\n";
    os << "max_boundary_value: " << csv::number(traj.max_boundary_value) << "\n";
    for (const auto& w : traj.warnings) os << "warning: " << w << "\n";
    os << "# spreading speed over [" << csv::number(t_begin) << ", " << csv::number(t_end) << "]\n";
    for (const auto& [level, text] : speeds) os << "level " << csv::number(level) << ": " << text << "\n";
    write_certificate(os, cert);
    try {
      const auto gm = theorem2_report(traj);
      os << "# global monotonicity\n";
      os << "tau_global: " << csv::number(gm.tau_global) << "\n";
      os << "T0: " << csv::number(gm.T0) << "\n";
    } catch (const HypothesisMismatch& e) {
      os << "# global monotonicity\nnot applicable: " << e.what() << "\n";
    }
  }
  {
    auto os = open_output(out / "inf_rhs.csv");
    write_inf_rhs_csv(os, cert);
  }
  {
    auto os = open_output(out / "t_eps.csv");
    write_t_eps_csv(os, cert);
  }

  if (cfg.tumor) {
    ProtocolConfig pc;
    pc.solver = cfg.solver;
    pc.comb = cfg.tumor->comb;
    pc.grazing_slope = cfg.tumor->grazing_slope;
    const auto res = run_protocol(cfg.problem, cfg.tumor->schedule, pc);
    auto os = open_output(out / "protocol.csv");
    write_protocol_csv(os, res);
    if (!res.events.empty()) {
      const auto& ev = res.events.front();
      summary.tumor = TumorSweepRow{ev.beta, cfg.tumor->schedule.sigma_img, ev.t, ev.dS_sign, ev.dmass_sign,
                                    ev.boundary_rhs_min};
    }
  }
  return summary;
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw SchemaError(spec, "axis must read key=v1,v2,...");
  SweepAxis axis;
  axis.key = spec.substr(0, eq);
  const std::string list = spec.substr(eq + 1);
  std::size_t start = 0;
  while (true) {
    const auto comma = list.find(',', start);
    const std::string item = list.substr(start, comma - start);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v)) {
      throw SchemaError(axis.key, fmt::format("axis value '{}' is not numeric", item));
    }
    axis.values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return axis;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_config(config_path);
    const fs::path dir = resolve_output(out, cfg);
    const RunSummary s = execute_run(cfg, dir);
    log << fmt::format("wrote {} (speed {}, T_eps {}, |inf rhs| at end {})\n", dir.string(), csv::number(s.speed),
                       csv::number(s.T_eps), csv::number(s.tail_inf_rhs));
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const std::string& suite, const std::optional<std::string>& out, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const auto ids = suite_criteria(suite);
    VerificationContext ctx(out ? std::optional<fs::path>(*out) : std::nullopt);
    bool all = true;
    for (int id : ids) {
      const auto r = run_criterion(id, ctx);
      log << format_result(r) << "\n" << std::flush;
      all = all && r.pass;
    }
    return static_cast<int>(all ? kOk : kFailed);
  });
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& axes_spec,
              const std::optional<std::string>& out, unsigned workers, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const YAML::Node base = load_config_file(config_path);
    const RunConfig base_cfg = parse_config(base);
    const fs::path dir = resolve_output(out, base_cfg);

    std::vector<SweepAxis> axes;
    for (const auto& s : axes_spec) axes.push_back(parse_axis(s));

    // Cross product, first axis slowest; every variant is validated before any compute.
    std::vector<std::vector<double>> combos{{}};
    for (const auto& axis : axes) {
      std::vector<std::vector<double>> next;
      for (const auto& c : combos) {
        for (double v : axis.values) {
          auto e = c;
          e.push_back(v);
          next.push_back(std::move(e));
        }
      }
      combos = std::move(next);
    }
    std::vector<RunConfig> configs;
    for (const auto& c : combos) {
      YAML::Node node = YAML::Clone(base);
      for (std::size_t i = 0; i < axes.size(); ++i) set_numeric(node, axes[i].key, c[i]);
      configs.push_back(parse_config(node));
    }

    std::vector<RunSummary> rows(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        try {
          rows[i] = execute_run(configs[i], dir / fmt::format("run_{}", i));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(configs.size()));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    std::vector<std::string> header;
    for (const auto& a : axes) header.push_back(a.key);
    for (const char* c : {"speed", "T_eps", "tail_inf_rhs"}) header.emplace_back(c);
    auto os = open_output(dir / "sweep.csv");
    csv::header(os, header);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<double> values = combos[i];
      values.insert(values.end(), {rows[i].speed, rows[i].T_eps, rows[i].tail_inf_rhs});
      csv::row(os, values);
    }
    if (base_cfg.tumor) {
      std::vector<TumorSweepRow> tumor_rows;
      for (const auto& r : rows) {
        if (r.tumor) tumor_rows.push_back(*r.tumor);
      }
      auto ts = open_output(dir / "tumor_sweep.csv");
      write_tumor_sweep_csv(ts, tumor_rows);
    }
    log << fmt::format("wrote {} runs to {}\n", rows.size(), dir.string());
    return static_cast<int>(kOk);
  });
}

}  // namespace kpplab::app
