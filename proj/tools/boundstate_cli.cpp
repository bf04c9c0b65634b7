// boundstate: command-line front end.
//
//   boundstate solve    --n 3 --p 3 --alpha 5
//   boundstate classify --alpha 14.1
//   boundstate ladder   --k 0..2 --tol 1e-8
//   boundstate sweep    --alpha-range 0.1:20 --count 200
//   boundstate verify   --preset core
//   boundstate export   --alpha 5
//
// Exit codes: 0 ok, 1 usage/parameter, 2 integrator failure, 3 I/O, 4 check failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boundstate/boundstate.hpp"

namespace bs = boundstate;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIntegrator = 2, kIo = 3, kCheck = 4 };

struct Flags {
  std::map<std::string, std::string> values;
  std::string config_path;
};

void add_common(CLI::App* sub, Flags& fl) {
  static const std::vector<std::pair<std::string, std::string>> keys{
      {"n", "space dimension"},
      {"p", "exponent, 1 < p < (n+2)/(n-2)"},
      {"alpha", "initial amplitude u(0)"},
      {"alpha-range", "amplitude range lo:hi"},
      {"count", "number of sweep points"},
      {"k", "node count or range lo..hi"},
      {"tol", "relative bracket tolerance"},
      {"rmax", "truncation radius"},
      {"abs-tol", "integrator absolute tolerance"},
      {"rel-tol", "integrator relative tolerance"},
      {"out", "output directory"},
      {"format", "json or csv"},
      {"preset", "verification preset: core or residual"},
      {"checks", "comma-separated check ids"}};
  for (const auto& [key, help] : keys) {
    sub->add_option_function<std::string>(
        "--" + key, [&fl, k = key](const std::string& v) { fl.values[k] = v; }, help);
  }
  sub->add_option("--config", fl.config_path, "flat key = value config file");
}

bs::RunConfig resolve(const std::string& command, const Flags& fl) {
  bs::RunConfig cfg;
  cfg.command = command;
  cfg.out_dir = bs::default_out_dir();
  if (!fl.config_path.empty()) {
    for (const auto& [k, v] : bs::read_config_file(fl.config_path)) bs::apply_setting(cfg, k, v);
  }
  for (const auto& [k, v] : fl.values) bs::apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

double require_alpha(const bs::RunConfig& cfg) {
  if (!cfg.alpha) throw bs::ParameterError(cfg.command + " needs --alpha");
  return *cfg.alpha;
}

fs::path out_path(const bs::RunConfig& cfg, const std::string& name) { return fs::path(cfg.out_dir) / name; }

int cmd_solve(const bs::RunConfig& cfg) {
  const bs::Trajectory t = bs::integrate({cfg.field, require_alpha(cfg), cfg.controls}, bs::StopPolicy::verification());
  if (t.termination().failed()) {
    std::cerr << "integration failed: " << bs::to_string(t.termination().tag) << " " << t.termination().detail << "\n";
    return kIntegrator;
  }
  const bs::PhasePortrait pp = bs::detect_events(t);
  bs::write_file(out_path(cfg, "trajectory.csv"), bs::trajectory_csv(t, cfg));
  bs::write_file(out_path(cfg, "portrait.json"), bs::portrait_document(pp, t, cfg).dump(2) + "\n");
  std::cout << "alpha=" << bs::format_real(t.alpha()) << " zeros=" << pp.node_count()
            << " phase_kind=" << bs::to_string(pp.phase_kind) << " samples=" << t.samples().size() << "\n";
  return kOk;
}

int cmd_classify(const bs::RunConfig& cfg) {
  const double alpha = require_alpha(cfg);
  const bs::SolutionClass c = bs::classify({cfg.field, alpha, cfg.controls});
  bs::Json j = bs::to_json(c);
  j["alpha"] = alpha;
  if (cfg.format == "csv") {
    bs::write_file(out_path(cfg, "classify.csv"),
                   bs::config_comment(cfg) + "alpha,class_tag,node_count,oscillation_center\n" + bs::format_real(alpha) +
                       "," + bs::to_string(c.tag) + "," + std::to_string(c.node_count) + "," +
                       std::to_string(c.oscillation_center) + "\n");
  } else {
    bs::Json doc{{"schema", bs::kSchema}, {"result", j}, {"config", bs::config_json(cfg)}};
    bs::write_file(out_path(cfg, "classify.json"), doc.dump(2) + "\n");
  }
  std::cout << bs::to_string(c.tag) << "(" << c.node_count << ")\n";
  if (c.tag == bs::ClassTag::Indeterminate) {
    std::cerr << "indeterminate: " << c.witness.cause << "\n";
    return kIntegrator;
  }
  return kOk;
}

int cmd_ladder(const bs::RunConfig& cfg) {
  std::vector<int> ks;
  for (int k = cfg.k_lo; k <= cfg.k_hi; ++k) ks.push_back(k);
  const bs::AlphaLadder lad = bs::build_ladder(cfg.field, ks, cfg.tol, cfg.controls);
  if (cfg.format == "csv") {
    bs::write_file(out_path(cfg, "ladder.csv"), bs::ladder_csv(lad, cfg));
  } else {
    bs::write_file(out_path(cfg, "ladder.json"), bs::ladder_document(lad, cfg).dump(2) + "\n");
  }
  int failed = 0;
  for (const auto& e : lad.entries) {
    if (e.ok()) {
      std::cout << "k=" << e.k << " [" << bs::format_real(e.alpha_lo) << ", " << bs::format_real(e.alpha_hi) << "]\n";
    } else {
      ++failed;
      std::cerr << "k=" << e.k << " " << e.status << "\n";
    }
  }
  return failed == static_cast<int>(lad.entries.size()) ? kIntegrator : kOk;
}

int cmd_sweep(const bs::RunConfig& cfg) {
  std::pair<double, double> range;
  if (cfg.alpha_range) {
    range = *cfg.alpha_range;
  } else if (cfg.alpha) {
    range = {*cfg.alpha, *cfg.alpha};
  } else {
    throw bs::ParameterError("sweep needs --alpha-range or --alpha");
  }
  const int count = cfg.alpha_range ? cfg.count : 1;
  const bs::SweepResult res = bs::run_sweep(cfg.field, bs::alpha_grid(range.first, range.second, count), cfg.controls);
  if (cfg.format == "csv") {
    bs::write_file(out_path(cfg, "sweep.csv"), bs::sweep_csv(res, cfg));
  } else {
    bs::write_file(out_path(cfg, "sweep.json"), bs::sweep_document(res, cfg).dump(2) + "\n");
  }
  std::cout << res.rows.size() << " rows, " << res.indeterminate << " indeterminate\n";
  if (res.indeterminate > 0) std::cerr << "warning: " << res.indeterminate << " indeterminate rows\n";
  if (!res.monotone()) {
    std::cerr << "node count decreases at " << res.monotonicity_breaks.size() << " grid point(s)\n";
    return kCheck;
  }
  return kOk;
}

int cmd_verify(const bs::RunConfig& cfg, bool checks_given) {
  bs::VerificationPlan plan = bs::preset_plan(cfg.preset, cfg.field, cfg.controls);
  if (checks_given) plan.checks = cfg.checks;
  const bs::VerificationReport rep = bs::run_checks(plan);
  if (cfg.format == "csv") {
    bs::write_file(out_path(cfg, "report.csv"), bs::report_csv(rep, cfg));
  } else {
    bs::write_file(out_path(cfg, "report.json"), bs::report_document(rep, cfg).dump(2) + "\n");
  }
  const std::string table = bs::report_table(rep);
  bs::write_file(out_path(cfg, "report.txt"), table);
  std::cout << table;
  return rep.all_passed() ? kOk : kCheck;
}

int cmd_export(const bs::RunConfig& cfg) {
  const bs::Trajectory t = bs::integrate({cfg.field, require_alpha(cfg), cfg.controls}, bs::StopPolicy::verification());
  if (t.termination().failed()) {
    std::cerr << "integration failed: " << bs::to_string(t.termination().tag) << "\n";
    return kIntegrator;
  }
  bs::write_file(out_path(cfg, "aux_trace.csv"), bs::aux_trace_csv(t, cfg));
  std::cout << t.samples().size() << " samples\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial solutions of  Δu - u + |u|^{p-1} u = 0"};
  app.require_subcommand(1);
  Flags fl;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "integrate one shot; write trajectory CSV and portrait JSON"},
      {"classify", "classify one initial amplitude"},
      {"ladder", "bracket the amplitudes alpha_k of bound states with k zeros"},
      {"sweep", "classify a grid of amplitudes"},
      {"verify", "run the verification suite"},
      {"export", "write every functional along one shot as CSV"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), fl);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const bs::RunConfig cfg = resolve(command, fl);
    if (command == "solve") return cmd_solve(cfg);
    if (command == "classify") return cmd_classify(cfg);
    if (command == "ladder") return cmd_ladder(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    if (command == "verify") return cmd_verify(cfg, fl.values.count("checks") > 0);
    return cmd_export(cfg);
  } catch (const bs::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const bs::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const bs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIntegrator;
  }
}
