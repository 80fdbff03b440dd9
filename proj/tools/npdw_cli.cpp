#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "npdw/asm_analyzer.hpp"
#include "npdw/compare.hpp"
#include "npdw/config.hpp"
#include "npdw/matching.hpp"
#include "npdw/metrics.hpp"
#include "npdw/trace_io.hpp"
#include "npdw/workload.hpp"

#ifndef NPDW_DATA_DIR
#define NPDW_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

npdw::RunConfig load_run_config(const std::string& path) {
  return path.empty() ? npdw::RunConfig{} : npdw::load_config(path);
}

int cmd_analyze(const std::string& file, bool json, const std::string& config_path) {
  using namespace npdw::analysis;
  AnalysisReport r;
  try {
    r = analyze(slurp(file), load_run_config(config_path).analyzer);
  } catch (const AsmError& e) {
    std::cerr << "error: " << file << ": " << e.what() << '\n';
    return 2;
  }
  if (json) {
    ordered_json j;
    j["file"] = file;
    for (std::size_t i = 0; i < kOpcodeCategoryCount; ++i)
      j["counts_by_category"][std::string(name(static_cast<OpcodeCategory>(i)))] = r.counts_by_category[i];
    for (std::size_t i = 0; i < kPowerCategoryCount; ++i)
      j["counts_by_power"][std::string(name(static_cast<PowerCategory>(i)))] = r.counts_by_power[i];
    j["avg_time_cost"] = r.avg_time_cost;
    j["avg_power_cost"] = r.avg_power_cost;
    j["p1"] = r.p1;
    j["p2"] = r.p2;
    j["diagnostics"] = {{"malformed_lines", r.diagnostics.malformed_lines},
                        {"unknown_mnemonics", r.diagnostics.unknown_mnemonics},
                        {"unknown_examples", r.diagnostics.unknown_examples}};
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << file << '\n';
  for (std::size_t i = 1; i < kOpcodeCategoryCount; ++i) {
    const auto c = static_cast<OpcodeCategory>(i);
    std::cout << "  " << name(c) << "  " << r.counts_by_category[i] << "  (" << describe(c) << ")\n";
  }
  std::cout << "  C0  " << r.count(OpcodeCategory::C0) << "  (uncategorized)\n";
  std::cout << "avg time cost   " << r.avg_time_cost << "  -> p1 = " << r.p1 << '\n';
  std::cout << "avg power cost  " << r.avg_power_cost << "  -> p2 = " << r.p2 << '\n';
  if (r.diagnostics.malformed_lines || r.diagnostics.unknown_mnemonics) {
    std::cout << "diagnostics: " << r.diagnostics.malformed_lines << " malformed line(s), "
              << r.diagnostics.unknown_mnemonics << " unknown mnemonic(s)";
    for (const auto& m : r.diagnostics.unknown_examples) std::cout << ' ' << m;
    std::cout << '\n';
  }
  return 0;
}

npdw::PreferenceLists read_preferences(const fs::path& path) {
  const auto j = nlohmann::json::parse(slurp(path));
  npdw::PreferenceLists p;
  std::map<std::uint64_t, std::vector<npdw::CoreId>> tp;
  std::map<std::uint32_t, std::vector<npdw::TaskId>> cp;
  for (const auto& [k, v] : j.at("task_preferences").items())
    for (auto c : v) tp[std::stoull(k)].push_back(npdw::CoreId{c.get<std::uint32_t>()});
  for (const auto& [k, v] : j.at("core_preferences").items())
    for (auto t : v) cp[static_cast<std::uint32_t>(std::stoul(k))].push_back(npdw::TaskId{t.get<std::uint64_t>()});
  for (auto& [u, l] : tp) {
    p.tasks.push_back(npdw::TaskId{u});
    p.task_prefs[npdw::TaskId{u}] = l;
  }
  for (auto& [v, l] : cp) {
    p.cores.push_back(npdw::CoreId{v});
    p.core_prefs[npdw::CoreId{v}] = l;
  }
  return p;
}

int cmd_match(bool demo, std::string file, bool json) {
  if (demo) file = (fs::path(NPDW_DATA_DIR) / "five_task_preferences.json").string();
  if (file.empty()) throw CLI::ValidationError("match", "give a preference file or --demo");
  const auto prefs = read_preferences(file);
  const auto result = npdw::gale_shapley(prefs);
  std::vector<npdw::TaskId> unmatched;
  for (auto u : prefs.tasks)
    if (!result.matching.core_of(u)) unmatched.push_back(u);

  if (json) {
    ordered_json j;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : result.matching.edges) j["edges"].push_back({e.task.value(), e.core.value()});
    j["unmatched"] = nlohmann::json::array();
    for (auto u : unmatched) j["unmatched"].push_back(u.value());
    for (const auto& p : result.proposals) {
      ordered_json row{{"task", p.task.value()}, {"core", p.core.value()}, {"accepted", p.accepted}};
      if (p.displaced) row["displaced"] = p.displaced->value();
      j["proposals"].push_back(row);
    }
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << "proposals:\n";
  for (const auto& p : result.proposals) {
    std::cout << "  task " << p.task << " -> core " << p.core << (p.accepted ? "  accepted" : "  rejected");
    if (p.displaced) std::cout << " (task " << *p.displaced << " freed)";
    std::cout << '\n';
  }
  std::cout << "matching:";
  for (const auto& e : result.matching.edges) std::cout << " (" << e.task << ',' << e.core << ')';
  std::cout << '\n';
  if (!unmatched.empty()) {
    std::cout << "unmatched:";
    for (auto u : unmatched) std::cout << ' ' << u;
    std::cout << '\n';
  }
  return 0;
}

std::vector<npdw::metrics::TrialRow> read_comparison_dir(const fs::path& in) {
  std::vector<npdw::metrics::TrialRow> rows;
  std::vector<fs::path> trials;
  for (const auto& e : fs::directory_iterator(in))
    if (e.is_directory()) trials.push_back(e.path());
  std::sort(trials.begin(), trials.end());
  for (const auto& t : trials) {
    npdw::metrics::TrialRow row;
    row.trial = t.filename().string();
    for (auto k : npdw::kAllSchedulers) {
      const auto dir = t / std::string(npdw::to_string(k));
      if (fs::exists(dir / "summary.json")) row.by_scheduler[k] = npdw::metrics::compute_metrics(npdw::io::read_trace(dir));
    }
    if (!row.by_scheduler.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-preemptive dynamic-window scheduling: analyzer, matcher, simulator and reports"};
  app.require_subcommand(1);

  std::string analyze_file, analyze_config;
  bool analyze_json = false;
  auto* analyze = app.add_subcommand("analyze", "Static cost analysis of an AT&T assembly file");
  analyze->add_option("file", analyze_file, "Assembly file (.s)")->required()->check(CLI::ExistingFile);
  analyze->add_flag("--json", analyze_json, "Emit JSON");
  analyze->add_option("--config", analyze_config, "Config file (analyzer thresholds)")->check(CLI::ExistingFile);

  std::string match_file;
  bool match_demo = false, match_json = false;
  auto* match = app.add_subcommand("match", "Stable task-core matching from preference lists");
  match->add_option("file", match_file, "Preference-list JSON")->check(CLI::ExistingFile);
  match->add_flag("--demo", match_demo, "Use the bundled five-task, four-core example");
  match->add_flag("--json", match_json, "Emit JSON");

  double gen_rate = 0.0, gen_horizon = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_config;
  auto* generate = app.add_subcommand("generate", "Write a Poisson workload file");
  generate->add_option("--rate", gen_rate, "Arrivals per second");
  generate->add_option("--horizon", gen_horizon, "Seconds of arrivals");
  generate->add_option("--seed", gen_seed, "Random seed");
  generate->add_option("--config", gen_config, "Config file ([workload] section)")->check(CLI::ExistingFile);
  generate->add_option("--out", gen_out, "Output CSV")->required();

  std::string run_sched, run_workload, run_config, run_out;
  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "Simulate one scheduler on a workload");
  run->add_option("--scheduler", run_sched, "npdw, fcfs, edf or sjf")->required();
  run->add_option("--workload", run_workload, "Workload CSV")->required()->check(CLI::ExistingFile);
  run->add_option("--config", run_config, "Config file")->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "Simulator seed (task durations)");
  run->add_option("--out", run_out, "Output directory")->required();

  std::vector<std::string> cmp_workloads;
  std::string cmp_config, cmp_out;
  auto* compare = app.add_subcommand("compare", "Run all four schedulers on identical workloads");
  compare->add_option("--workload", cmp_workloads, "Workload CSV (repeatable, one trial each)")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--config", cmp_config, "Config file")->check(CLI::ExistingFile);
  compare->add_option("--out", cmp_out, "Output directory")->required();

  std::string report_in, report_format = "text";
  auto* report = app.add_subcommand("report", "Comparison tables from a compare output directory");
  report->add_option("--in", report_in, "Directory written by compare")->required()->check(CLI::ExistingDirectory);
  report->add_option("--format", report_format, "csv, text or json")
      ->check(CLI::IsMember({"csv", "text", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(analyze_file, analyze_json, analyze_config);
    if (*match) return cmd_match(match_demo, match_file, match_json);

    if (*generate) {
      auto spec = load_run_config(gen_config).workload;
      if (generate->count("--rate")) spec.rate = gen_rate;
      if (generate->count("--horizon")) spec.horizon = gen_horizon;
      if (generate->count("--seed")) spec.seed = gen_seed;
      const auto records = npdw::sim::generate_workload(spec);
      npdw::sim::write_workload(gen_out, records);
      std::cout << "wrote " << records.size() << " arrivals to " << gen_out << '\n';
      return 0;
    }

    if (*run) {
      auto cfg = load_run_config(run_config);
      if (run->count("--seed")) cfg.sim.seed = run_seed;
      const auto kind = npdw::parse_scheduler(run_sched);
      const auto records = npdw::sim::read_workload(run_workload);
      auto trace = npdw::run_trial(kind, cfg.sim, npdw::sim::materialize_tasks(records, cfg.sim, cfg.scheduler.credit),
                                   cfg.scheduler);
      npdw::io::write_trace(run_out, trace, npdw::to_json(cfg));
      const auto m = npdw::metrics::compute_metrics(trace);
      std::cout << npdw::to_string(kind) << ": " << trace.tasks.size() << " tasks, " << trace.windows.size()
                << " windows, end " << trace.end_time << " s\n"
                << "  load stddev " << m.load_stddev << " pp, utilization " << m.avg_utilization << " %\n"
                << "  thermal stddev " << m.thermal_stddev << " C, avg temp " << m.avg_temperature << " C\n"
                << "  waiting cv " << m.waiting_cv << '\n';
      return 0;
    }

    if (*compare) {
      const auto cfg = load_run_config(cmp_config);
      std::vector<npdw::metrics::TrialRow> rows;
      std::vector<npdw::TrialResult> trials;
      for (const auto& w : cmp_workloads) {
        const auto name = fs::path(w).stem().string();
        auto trial = npdw::run_comparison_trial(name, npdw::sim::read_workload(w), cfg);
        rows.push_back(trial.row);
        trials.push_back(std::move(trial));
      }
      for (const auto& t : trials) npdw::write_trial(fs::path(cmp_out) / t.row.trial, t, cfg);
      npdw::metrics::write_comparison(rows, cmp_out);
      std::cout << npdw::metrics::render_comparison(rows, npdw::metrics::TableFormat::Text);
      return 0;
    }

    if (*report) {
      const auto rows = read_comparison_dir(report_in);
      std::cout << npdw::metrics::render_comparison(rows, npdw::metrics::parse_format(report_format));
      return 0;
    }
  } catch (const npdw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
