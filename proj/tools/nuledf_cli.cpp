// Command-line front end: run one policy over a task set, sweep both
// policies into a comparison report, generate task-set files, or replay the
// bundled reference scenario with its golden checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nuledf/nuledf.hpp"

namespace {

using namespace nuledf;

std::map<int, int> load_pinning(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pin file " + path);
  std::map<int, int> pinned;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || lineno == 1) {
      if (lineno == 1 && line != "task_id,core") {
        throw std::runtime_error("pin file line 1: expected header 'task_id,core'");
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("pin file line " + std::to_string(lineno) + ": expected task_id,core");
    }
    pinned[std::stoi(line.substr(0, comma))] = std::stoi(line.substr(comma + 1));
  }
  return pinned;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out << text;
}

std::string policy_name(PolicyId p) { return p == PolicyId::Edf ? "edf" : "nuledf"; }

std::string summary_table(const SimResult& r, const TaskSet& ts) {
  std::ostringstream out;
  out << "policy: " << policy_name(r.policy) << "\n";
  out << "tasks: " << ts.size() << "  cores: " << r.cores << "\n";
  out << "scheduled: " << r.scheduled_count << "  missed: " << r.missed_count << "\n";
  std::map<std::string, int> reasons;
  for (const Event& e : r.trace) {
    if (e.kind == EventKind::Miss) reasons[miss_reason_name(*e.miss_reason)]++;
  }
  if (!reasons.empty()) {
    out << "miss reasons:";
    for (const auto& [name, count] : reasons) out << ' ' << name << '=' << count;
    out << "\n";
  }
  out << "utilisation scale u1: " << display_round2(r.u1_used) << "\n";
  out << "per-core utilisation:";
  for (double u : r.per_core_util) out << ' ' << display_round2(u);
  out << "\naverage utilisation: " << display_round2(r.avg_util) << "\n";
  return out.str();
}

int cmd_run(const std::string& policy_str, const std::string& taskset_path, int cores,
            const std::string& pin_path, const std::string& format, const std::string& out_path,
            Tick max_time, bool exact_euler, std::optional<double> frozen_u1) {
  const TaskSet ts = taskset_path.empty() ? reference_taskset() : load_taskset(taskset_path);
  Platform pf;
  pf.cores = cores;
  if (!pin_path.empty()) pf.pinned = load_pinning(pin_path);

  const auto violations = validate(ts, pf);
  if (!violations.empty()) {
    for (const Violation& v : violations) std::cerr << "invalid input: " << v.message << "\n";
    return 1;
  }

  SimConfig cfg;
  cfg.max_time = max_time;
  cfg.exact_euler = exact_euler;
  cfg.frozen_u1 = frozen_u1;
  const PolicyId policy = policy_str == "edf" ? PolicyId::Edf : PolicyId::NulEdf;
  const SimResult result = run(policy, ts, pf, cfg);

  if (format == "events") {
    write_output(export_trace(result, TraceFormat::Events), out_path);
  } else if (format == "gantt") {
    write_output(export_trace(result, TraceFormat::Gantt), out_path);
  } else {
    write_output(summary_table(result, ts), out_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multicore EDF / non-uniform-laxity-EDF scheduling simulator"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "simulate one policy over a task set");
  std::string policy = "nuledf", taskset_path, pin_path, format = "table", out_path;
  int cores = 4;
  Tick max_time = 0;
  bool exact_euler = false;
  double frozen_u1_value = 0.0;
  run_cmd->add_option("--policy", policy, "scheduling policy")
      ->check(CLI::IsMember({"edf", "nuledf"}));
  run_cmd->add_option("--taskset", taskset_path, "task-set csv (default: bundled reference set)");
  run_cmd->add_option("--cores", cores, "number of cores")->check(CLI::PositiveNumber);
  run_cmd->add_option("--pin", pin_path, "task pinning csv (task_id,core)");
  run_cmd->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"table", "events", "gantt"}));
  run_cmd->add_option("--out", out_path, "write output to a file instead of stdout");
  run_cmd->add_option("--max-time", max_time, "simulation horizon (0 = derive from deadlines)");
  run_cmd->add_flag("--exact-euler", exact_euler, "use full-precision e in the schedulability bound");
  auto* frozen_opt =
      run_cmd->add_option("--frozen-u1", frozen_u1_value, "pin the modification factor");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a seeded task-set file");
  GenParams gen_params;
  std::string gen_out, params_path;
  gen_cmd->add_option("--params", params_path, "json file with generation parameters");
  auto* opt_tasks = gen_cmd->add_option("--tasks", gen_params.n, "task count");
  auto* opt_seed = gen_cmd->add_option("--seed", gen_params.seed, "generator seed");
  auto* opt_span = gen_cmd->add_option("--span", gen_params.arrival_span, "arrival span in ticks");
  auto* opt_emin = gen_cmd->add_option("--exec-min", gen_params.exec_min, "");
  auto* opt_emax = gen_cmd->add_option("--exec-max", gen_params.exec_max, "");
  auto* opt_smin = gen_cmd->add_option("--slack-min", gen_params.slack_min, "");
  auto* opt_smax = gen_cmd->add_option("--slack-max", gen_params.slack_max, "");
  auto* opt_qmin = gen_cmd->add_option("--quant-frac-min", gen_params.quant_fraction_min, "");
  auto* opt_qmax = gen_cmd->add_option("--quant-frac-max", gen_params.quant_fraction_max, "");
  auto* opt_cmin = gen_cmd->add_option("--ctot-min", gen_params.ctot_min, "");
  auto* opt_cmax = gen_cmd->add_option("--ctot-max", gen_params.ctot_max, "");
  gen_cmd->add_option("--out", gen_out, "destination csv")->required();

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "sweep both policies and report");
  std::string axis = "tasks", cmp_out, cmp_params_path;
  std::vector<int> values;
  int cmp_cores = 100;
  int cmp_tasks = 5000;
  std::uint64_t cmp_seed = GenParams{}.seed;
  Tick cmp_span = GenParams{}.arrival_span;
  cmp_cmd->add_option("--axis", axis, "sweep axis")->check(CLI::IsMember({"tasks", "cores"}));
  cmp_cmd->add_option("--values", values, "sweep values (ascending)")->delimiter(',');
  cmp_cmd->add_option("--cores", cmp_cores, "core count for task sweeps");
  auto* opt_cmp_tasks = cmp_cmd->add_option("--tasks", cmp_tasks, "task count for core sweeps");
  auto* opt_cmp_seed = cmp_cmd->add_option("--seed", cmp_seed, "generator seed");
  auto* opt_cmp_span = cmp_cmd->add_option("--span", cmp_span, "arrival span in ticks");
  cmp_cmd->add_option("--params", cmp_params_path, "json file with generation parameters");
  cmp_cmd->add_option("--out", cmp_out, "write the csv report to a file");

  // example
  auto* ex_cmd = app.add_subcommand("example", "replay the bundled reference scenario");
  std::string ex_out;
  ex_cmd->add_option("--out", ex_out, "write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) {
      std::optional<double> frozen;
      if (frozen_opt->count() > 0) frozen = frozen_u1_value;
      return cmd_run(policy, taskset_path, cores, pin_path, format, out_path, max_time,
                     exact_euler, frozen);
    }

    if (gen_cmd->parsed()) {
      GenParams p = params_path.empty() ? GenParams{} : load_params(params_path);
      if (opt_tasks->count()) p.n = gen_params.n;
      if (opt_seed->count()) p.seed = gen_params.seed;
      if (opt_span->count()) p.arrival_span = gen_params.arrival_span;
      if (opt_emin->count()) p.exec_min = gen_params.exec_min;
      if (opt_emax->count()) p.exec_max = gen_params.exec_max;
      if (opt_smin->count()) p.slack_min = gen_params.slack_min;
      if (opt_smax->count()) p.slack_max = gen_params.slack_max;
      if (opt_qmin->count()) p.quant_fraction_min = gen_params.quant_fraction_min;
      if (opt_qmax->count()) p.quant_fraction_max = gen_params.quant_fraction_max;
      if (opt_cmin->count()) p.ctot_min = gen_params.ctot_min;
      if (opt_cmax->count()) p.ctot_max = gen_params.ctot_max;
      GenReport rep;
      const TaskSet ts = generate(p, &rep);
      save_taskset(ts, gen_out);
      write_gen_metadata(p, rep, gen_out + ".meta.json");
      std::cout << "wrote " << ts.size() << " tasks to " << gen_out << " (seed " << p.seed
                << ", clamped quanta " << rep.clamped_quant << ")\n";
      return 0;
    }

    if (cmp_cmd->parsed()) {
      SweepSpec sweep;
      sweep.axis = axis == "tasks" ? SweepAxis::Tasks : SweepAxis::Cores;
      if (!values.empty()) {
        sweep.values = values;
      } else if (sweep.axis == SweepAxis::Tasks) {
        sweep.values = {8, 15, 20, 30, 45, 60, 75, 80, 90, 100, 200, 500, 700, 900, 1000, 2000, 5000};
      } else {
        for (int c = 4; c <= 100; c += 8) sweep.values.push_back(c);
      }
      GenParams p = cmp_params_path.empty() ? GenParams{} : load_params(cmp_params_path);
      if (opt_cmp_seed->count()) p.seed = cmp_seed;
      if (opt_cmp_span->count()) p.arrival_span = cmp_span;
      if (sweep.axis == SweepAxis::Cores && (opt_cmp_tasks->count() > 0 || cmp_params_path.empty())) {
        p.n = cmp_tasks;
      }
      Platform pf;
      pf.cores = sweep.axis == SweepAxis::Tasks ? cmp_cores : 1;
      const auto rows = compare(sweep, p, pf, SimConfig{});
      write_output(comparison_csv(rows, sweep.axis), cmp_out);
      return 0;
    }

    if (ex_cmd->parsed()) {
      const ExampleReport rep = run_reference_example();
      write_output(rep.text, ex_out);
      if (!rep.ok) {
        for (const ExampleCheck& c : rep.checks) {
          if (!c.pass) {
            std::cerr << "golden mismatch: " << c.name << " expected " << c.expected << " got "
                      << c.actual << " (tolerance " << c.tolerance << ")\n";
          }
        }
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
