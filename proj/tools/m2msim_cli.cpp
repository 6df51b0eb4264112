// Command-line front end: single runs, parameter sweeps, trace export/import
// and fixture verification for the two-class uplink queue simulator.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "m2msim/config_json.hpp"
#include "m2msim/engine.hpp"
#include "m2msim/experiments.hpp"
#include "m2msim/fixtures.hpp"
#include "m2msim/oracle.hpp"
#include "m2msim/workload.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct PolicyFlags {
  std::string policy = "fcfs";
  double lt_ms = -1.0;
  bool drop = false;
  std::string priority_class = "pu";
  std::string edd_ed_due = "";  // "<ms>" or "unbounded"; empty = default (sigmoid midpoint)

  void attach(CLI::App* cmd) {
    cmd->add_option("--policy", policy, "Scheduling discipline")
        ->check(CLI::IsMember({"fcfs", "edd", "priority", "proposed"}));
    cmd->add_option("--lt", lt_ms, "Threshold in ms (proposed)");
    cmd->add_flag("--drop", drop, "Drop PU packets that miss their deadline (proposed)");
    cmd->add_option("--priority-class", priority_class, "Favored class for priority")
        ->check(CLI::IsMember({"pu", "ed"}));
    cmd->add_option("--edd-ed-due", edd_ed_due, "ED due-date offset in ms, or 'unbounded'");
  }

  m2msim::PolicySpec build(const m2msim::UtilityParams& utility) const {
    using namespace m2msim;
    PolicySpec spec;
    if (policy == "fcfs") {
      spec = PolicySpec::fcfs();
    } else if (policy == "edd") {
      EddDueOffset due;
      if (edd_ed_due == "unbounded") due = EddDueOffset::unbounded();
      else if (!edd_ed_due.empty()) due = EddDueOffset::explicit_ms(std::stod(edd_ed_due));
      spec = PolicySpec::edd(due);
    } else if (policy == "priority") {
      spec = PolicySpec::priority(priority_class == "ed" ? PriorityClass::ED_HIGH
                                                         : PriorityClass::PU_HIGH);
    } else {
      if (lt_ms <= 0.0)
        throw SimError(Errc::LT_OUT_OF_RANGE, "--policy proposed requires --lt > 0");
      spec = PolicySpec::proposed(ms_to_ticks(lt_ms), drop);
    }
    throw_if_invalid(validate_policy(spec, utility));
    return spec;
  }
};

// "start:stop:step" (inclusive stop, within rounding slack) or "v1,v2,..."
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0)
      throw m2msim::SimError(m2msim::Errc::PARSE_ERROR, "grid must be start:stop:step");
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) grid.push_back(start + step * i);
    return grid;
  }
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) grid.push_back(std::stod(cell));
  if (grid.empty()) throw m2msim::SimError(m2msim::Errc::PARSE_ERROR, "empty grid");
  return grid;
}

m2msim::SimConfig load_and_validate(const std::string& path, std::optional<std::uint64_t> seed,
                                    std::optional<int> reps) {
  m2msim::SimConfig cfg = m2msim::load_config(path);
  if (seed) cfg.seed = *seed;
  if (reps) cfg.replications = *reps;
  m2msim::throw_if_invalid(m2msim::validate_config(cfg));
  return cfg;
}

std::vector<m2msim::PolicySpec> comparison_policies() {
  using namespace m2msim;
  return {PolicySpec::fcfs(), PolicySpec::edd(), PolicySpec::priority(PriorityClass::PU_HIGH),
          PolicySpec::proposed(0, false), PolicySpec::proposed(0, true)};
}

int run_single(const m2msim::SimConfig& cfg, const PolicyFlags& flags) {
  using namespace m2msim;
  const PolicySpec policy = flags.build(cfg.utility);
  detail::RepAccumulator acc;
  for (int rep = 0; rep < cfg.replications; ++rep) {
    const Trace trace = build_trace(cfg, static_cast<std::uint64_t>(rep));
    const auto [outcome, frac] =
        detail::evaluate_with_drop_frac(trace, policy, cfg.service, cfg.utility);
    acc.add(outcome, frac);
  }
  const SweepRow row = acc.row(0.0, policy.label());
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "policy=%s reps=%d v_mean=%.9f v_stderr=%.9f u_pu=%.9f u_ed=%.9f drop_frac=%.9f\n",
                policy.label().c_str(), cfg.replications, row.v_mean, row.v_stderr, row.u_pu,
                row.u_ed, row.drop_frac);
  std::cout << buf;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-class single-server uplink queue simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string grid_text;
  std::string lt_grid_text;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> reps_override;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", config_path, "SimConfig JSON document")->required();
    cmd->add_option("--seed", seed_override, "Override the config seed");
    cmd->add_option("--reps", reps_override, "Override the replication count");
    auto* out = cmd->add_option("--out", out_path, "Output CSV path");
    if (needs_out) out->required();
  };

  auto* cmd_run = app.add_subcommand("run", "Evaluate one policy and print the utility outcome");
  PolicyFlags run_flags;
  add_common(cmd_run, false);
  run_flags.attach(cmd_run);

  auto* cmd_sweep_lt = app.add_subcommand("sweep-lt", "System utility as a function of lt");
  add_common(cmd_sweep_lt, true);
  cmd_sweep_lt->add_option("--grid", grid_text, "lt grid in ms (start:stop:step or list)")->required();
  bool sweep_lt_drop = false;
  cmd_sweep_lt->add_flag("--drop", sweep_lt_drop, "Sweep the dropping variant");

  auto* cmd_sweep_a = app.add_subcommand("sweep-a", "Policy comparison across the roll-off a");
  add_common(cmd_sweep_a, true);
  cmd_sweep_a->add_option("--grid", grid_text, "a grid (start:stop:step or list)")->required();
  cmd_sweep_a->add_option("--lt-grid", lt_grid_text, "Inner lt optimization grid (ms)");

  auto* cmd_sweep_n = app.add_subcommand("sweep-n", "Policy comparison across the sensor count");
  add_common(cmd_sweep_n, true);
  cmd_sweep_n->add_option("--grid", grid_text, "N grid (start:stop:step or list)")->required();
  cmd_sweep_n->add_option("--lt-grid", lt_grid_text, "Inner lt optimization grid (ms)");

  auto* cmd_sweep_ed = app.add_subcommand("sweep-ed-rate", "Policy comparison across the ED rate");
  add_common(cmd_sweep_ed, true);
  cmd_sweep_ed->add_option("--grid", grid_text, "Per-sensor ED rate grid (per ms)")->required();
  cmd_sweep_ed->add_option("--lt-grid", lt_grid_text, "Inner lt optimization grid (ms)");

  auto* cmd_trace = app.add_subcommand("trace", "Trace CSV export/import");
  cmd_trace->require_subcommand(1);
  auto* cmd_export = cmd_trace->add_subcommand("export", "Generate a trace and write it as CSV");
  std::uint64_t export_rep = 0;
  add_common(cmd_export, true);
  cmd_export->add_option("--rep", export_rep, "Replication index");
  auto* cmd_import = cmd_trace->add_subcommand("import", "Read a trace CSV and validate it");
  std::string import_path;
  cmd_import->add_option("--in", import_path, "Trace CSV path")->required();
  std::string reexport_path;
  cmd_import->add_option("--out", reexport_path, "Optional re-export path");

  auto* cmd_oracle = app.add_subcommand("oracle", "Verification oracles");
  cmd_oracle->require_subcommand(1);
  auto* cmd_verify = cmd_oracle->add_subcommand("verify", "Replay stored fixtures");
  std::string fixtures_dir;
  cmd_verify->add_option("--fixtures", fixtures_dir, "Fixture directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (cmd_run->parsed()) {
      return run_single(load_and_validate(config_path, seed_override, reps_override), run_flags);
    }

    if (cmd_sweep_lt->parsed()) {
      m2msim::SweepSpec spec;
      spec.base = load_and_validate(config_path, seed_override, reps_override);
      spec.axis = m2msim::SweepAxis::LT;
      spec.grid = parse_grid(grid_text);
      spec.replications = spec.base.replications;
      if (sweep_lt_drop) spec.policies = {m2msim::PolicySpec::proposed(0, true)};
      const m2msim::SweepResult result = m2msim::sweep_lt(spec);
      m2msim::emit_csv(result, out_path);
      char buf[128];
      std::snprintf(buf, sizeof(buf), "lut fingerprint=%016llx lt=%.9f v=%.9f\n",
                    static_cast<unsigned long long>(result.lut_entry->fingerprint),
                    result.lut_entry->lt_ms, result.lut_entry->v);
      std::cout << buf;
      return kExitOk;
    }

    const bool is_a = cmd_sweep_a->parsed();
    const bool is_n = cmd_sweep_n->parsed();
    const bool is_ed = cmd_sweep_ed->parsed();
    if (is_a || is_n || is_ed) {
      m2msim::SweepSpec spec;
      spec.base = load_and_validate(config_path, seed_override, reps_override);
      spec.grid = parse_grid(grid_text);
      spec.replications = spec.base.replications;
      spec.policies = comparison_policies();
      if (!lt_grid_text.empty()) spec.lt_opt_grid = parse_grid(lt_grid_text);
      m2msim::SweepResult result;
      if (is_a) result = m2msim::sweep_param_a(spec);
      else if (is_n) result = m2msim::sweep_n(spec);
      else result = m2msim::sweep_ed_rate(spec);
      m2msim::emit_csv(result, out_path);
      std::cout << "rows=" << result.rows.size() << "\n";
      return kExitOk;
    }

    if (cmd_export->parsed()) {
      const m2msim::SimConfig cfg = load_and_validate(config_path, seed_override, reps_override);
      const m2msim::Trace trace = m2msim::build_trace(cfg, export_rep);
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw m2msim::SimError(m2msim::Errc::IO_FAILURE, "cannot open " + out_path);
      m2msim::write_trace_csv(trace, out);
      std::cout << "pu=" << trace.pu_count() << " ed=" << trace.ed_count() << "\n";
      return kExitOk;
    }

    if (cmd_import->parsed()) {
      std::ifstream in(import_path);
      if (!in) throw m2msim::SimError(m2msim::Errc::IO_FAILURE, "cannot open " + import_path);
      const m2msim::Trace trace = m2msim::read_trace_csv(in);
      std::cout << "pu=" << trace.pu_count() << " ed=" << trace.ed_count() << "\n";
      if (!reexport_path.empty()) {
        std::ofstream out(reexport_path, std::ios::binary);
        if (!out) throw m2msim::SimError(m2msim::Errc::IO_FAILURE, "cannot open " + reexport_path);
        m2msim::write_trace_csv(trace, out);
      }
      return kExitOk;
    }

    if (cmd_verify->parsed()) {
      const auto fixtures = m2msim::load_fixture_dir(fixtures_dir);
      if (fixtures.empty())
        throw m2msim::SimError(m2msim::Errc::IO_FAILURE, "no fixtures in " + fixtures_dir);
      bool all_pass = true;
      for (const auto& f : fixtures) {
        const auto res = m2msim::run_fixture(f);
        if (res.pass) {
          std::cout << "ok " << f.name << "\n";
        } else {
          std::cout << "FAIL " << f.name << ": " << res.detail << "\n";
          all_pass = false;
        }
      }
      return all_pass ? kExitOk : 1;
    }
  } catch (const m2msim::SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == m2msim::Errc::IO_FAILURE ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
