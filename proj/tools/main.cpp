#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "graywatch/graywatch.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw graywatch::ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

void write_lines(const std::string& path, const std::string& header,
                 const std::vector<std::string>& rows) {
  auto out = open_out(path);
  out << header << "\n";
  for (const auto& r : rows) out << r << "\n";
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& defense, const std::string& out_path, bool trace,
                 const std::string& tables_path, const std::string& probe_path,
                 const std::string& detect_path, const std::string& quarantine_path) {
  graywatch::ScenarioConfig cfg = graywatch::parse_config(slurp(config_path));
  if (seed) cfg.seed = *seed;
  if (defense == "on") cfg.defense = true;
  if (defense == "off") cfg.defense = false;

  graywatch::ScenarioRun run = graywatch::build_scenario(cfg, trace);
  run.net->run(cfg.sim_time_ms);
  graywatch::RunReport rep = graywatch::score_run(cfg, *run.net, run.truth);

  {
    auto out = open_out(out_path);
    out << graywatch::report_header() << "\n" << graywatch::report_row(rep) << "\n";
  }
  if (trace)
    for (const auto& rec : run.net->trace()) std::cout << graywatch::to_line(rec) << "\n";
  if (!tables_path.empty()) {
    auto rows = run.net->table_dump();
    auto out = open_out(tables_path);
    for (const auto& r : rows) out << r << "\n";
  }
  if (!probe_path.empty()) {
    std::vector<std::string> rows;
    for (const auto& r : run.net->probe_log()) rows.push_back(graywatch::to_line(r));
    write_lines(probe_path, "time,probe,route,round,ack_blocks,p_bh,verdict", rows);
  }
  if (!detect_path.empty()) {
    std::vector<std::string> rows;
    for (const auto& r : run.net->detect_log()) rows.push_back(graywatch::to_line(r));
    write_lines(detect_path, "time,session,route,event,detail,challenge", rows);
  }
  if (!quarantine_path.empty()) {
    std::vector<std::string> rows;
    for (const auto& r : run.net->quarantine_log()) rows.push_back(graywatch::to_line(r));
    write_lines(quarantine_path, "time,issuer,convicted,session", rows);
  }

  std::ostream& sum = trace ? std::cerr : std::cout;
  sum << "nodes=" << cfg.nodes << " attackers=" << rep.malicious.size()
      << " convicted=" << rep.convicted.size() << " defense=" << (cfg.defense ? "on" : "off")
      << " seed=" << cfg.seed << "\n";
  sum << "fpr=" << graywatch::format3(rep.fpr) << " fnr=" << graywatch::format3(rep.fnr)
      << " dr=" << graywatch::format3(rep.dr);
  if (rep.pdr) sum << " pdr=" << graywatch::format3(*rep.pdr);
  if (rep.avg_delay_ms) sum << " avg_delay_ms=" << graywatch::format3(*rep.avg_delay_ms);
  sum << "\n";
  sum << "report written to " << out_path << "\n";
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& ratios_spec, int seeds,
                  const std::string& out_path) {
  graywatch::ScenarioConfig cfg = graywatch::parse_config(slurp(config_path));
  std::vector<double> ratios;
  try {
    ratios = graywatch::parse_ratios(ratios_spec);
  } catch (const std::invalid_argument& e) {
    throw graywatch::ConfigError(e.what());
  }
  if (seeds < 1) throw graywatch::ConfigError("--seeds must be at least 1");
  auto out = open_out(out_path);
  auto groups = graywatch::run_sweep(cfg, ratios, seeds, &out);
  for (const auto& g : groups)
    std::cout << "ratio=" << graywatch::format3(g.ratio)
              << " mean_dr=" << graywatch::format3(g.mean_dr)
              << " mean_fpr=" << graywatch::format3(g.mean_fpr)
              << (g.mean_pdr ? " mean_pdr=" + graywatch::format3(*g.mean_pdr) : std::string{})
              << "\n";
  std::cout << "sweep written to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete-event simulator for gray hole defense in ad-hoc networks"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run one scenario and report metrics");
  std::string config_path;
  sim->add_option("--config", config_path, "scenario config (JSON)")->required();
  std::uint64_t seed_val = 0;
  auto* seed_opt = sim->add_option("--seed", seed_val, "override the config seed");
  std::string defense = "config";
  sim->add_option("--defense", defense, "force the defense on or off")
      ->check(CLI::IsMember({"on", "off"}));
  std::string out_path = "report.csv";
  sim->add_option("--out", out_path, "metrics CSV path");
  bool trace = false;
  sim->add_flag("--trace", trace, "print one line per delivered transmission to stdout");
  std::string tables_path, probe_path, detect_path, quarantine_path;
  sim->add_option("--tables", tables_path, "dump monitoring tables to this CSV");
  sim->add_option("--probe-log", probe_path, "dump route test rounds to this CSV");
  sim->add_option("--detect-log", detect_path, "dump challenge sessions to this CSV");
  sim->add_option("--quarantine-log", quarantine_path, "dump convictions to this CSV");

  auto* sw = app.add_subcommand("sweep", "run a ratio grid and write per-run plus mean rows");
  std::string sw_config, sw_ratios, sw_out;
  int sw_seeds = 0;
  sw->add_option("--config", sw_config, "scenario config (JSON)")->required();
  sw->add_option("--ratios", sw_ratios, "start:stop:step or comma list")->required();
  sw->add_option("--seeds", sw_seeds, "seeds 1..N per ratio")->required();
  sw->add_option("--out", sw_out, "sweep CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_val;
      return run_simulate(config_path, seed, defense, out_path, trace, tables_path, probe_path,
                          detect_path, quarantine_path);
    }
    return run_sweep_cmd(sw_config, sw_ratios, sw_seeds, sw_out);
  } catch (const graywatch::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
