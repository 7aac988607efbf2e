// Command-line front end: run, sweep, floor and regions.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "submss/submss.hpp"

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw submss::ConfigError("--out", "cannot write '" + path + "'");
  f << text;
}

submss::ScenarioConfig load_with_overrides(const std::string& file,
                                           const std::vector<std::string>& sets,
                                           const std::string& seed) {
  auto cfg = submss::load_scenario(file);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw submss::ConfigError("--set", "expected key=value");
    submss::apply_setting(cfg, submss::detail::trim(kv.substr(0, eq)),
                          submss::detail::trim(kv.substr(eq + 1)));
  }
  if (!seed.empty()) submss::apply_setting(cfg, "seed", seed);
  cfg.validate();
  return cfg;
}

std::vector<std::string> split_values(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = submss::detail::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for TCP flows sharing an AQM bottleneck"};
  app.require_subcommand(1);

  std::string out;
  std::string seed;
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "Run one scenario file and print its metrics as CSV");
  std::string run_file;
  run->add_option("file", run_file, "Scenario file (key = value lines)")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Output CSV path (default: stdout)");
  run->add_option("--set", sets, "Override a scenario key, as key=value");

  auto* sw = app.add_subcommand("sweep", "Run a scenario once per value of one key");
  std::string sweep_file, vary, values;
  unsigned jobs = 0;
  sw->add_option("file", sweep_file, "Template scenario file")->required();
  sw->add_option("--vary", vary, "Key to vary")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();
  sw->add_option("--jobs", jobs, "Parallel runs (default: hardware threads)");
  sw->add_option("--seed", seed, "Override the template seed");
  sw->add_option("--out", out, "Output CSV path (default: stdout)");
  sw->add_option("--set", sets, "Override a template key, as key=value");

  auto* fl = app.add_subcommand("floor", "Packets per RTT each flow gets: C*R/(n*P*8)");
  std::string capacity = "40mbps", rtt = "6ms", frame = "1518";
  int flows = 12;
  fl->add_option("--capacity", capacity, "Link rate, e.g. 40mbps")->capture_default_str();
  fl->add_option("--flows", flows, "Number of flows")->capture_default_str();
  fl->add_option("--frame", frame, "Frame size in bytes")->capture_default_str();
  fl->add_option("--rtt", rtt, "Round trip time, e.g. 6ms")->capture_default_str();

  auto* rg = app.add_subcommand("regions", "Per-flow window (in MSS) over an rtt x rate grid");
  std::string rtt_min = "100us", rtt_max = "1s", rate_min = "100kbps", rate_max = "10gbps",
              mss = "1500";
  int points = 9;
  rg->add_option("--rtt-min", rtt_min)->capture_default_str();
  rg->add_option("--rtt-max", rtt_max)->capture_default_str();
  rg->add_option("--rate-min", rate_min)->capture_default_str();
  rg->add_option("--rate-max", rate_max)->capture_default_str();
  rg->add_option("--mss", mss)->capture_default_str();
  rg->add_option("--points", points, "Grid points per axis")->capture_default_str();
  rg->add_option("--out", out, "Output CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = load_with_overrides(run_file, sets, seed);
      const auto m = submss::run_scenario(cfg);
      write_output(out, std::string(submss::metrics_csv_header()) + "\n" +
                            submss::metrics_csv_row(m) + "\n");
    } else if (*sw) {
      const auto cfg = load_with_overrides(sweep_file, sets, seed);
      const auto rows = submss::sweep(cfg, vary, split_values(values), jobs);
      write_output(out, submss::sweep_csv(vary, rows));
    } else if (*fl) {
      const double c = static_cast<double>(submss::parse_rate("--capacity", capacity));
      const double p = static_cast<double>(submss::parse_bytes("--frame", frame));
      const auto r = submss::parse_time("--rtt", rtt);
      if (flows <= 0) throw submss::ConfigError("--flows", "must be positive");
      std::cout << submss::format_real(submss::pkt_per_rtt_floor(c, flows, p, r)) << "\n";
    } else if (*rg) {
      if (points < 1) throw submss::ConfigError("--points", "must be at least 1");
      const auto cells = submss::window_region_grid(
          submss::parse_time("--rtt-min", rtt_min).seconds(),
          submss::parse_time("--rtt-max", rtt_max).seconds(),
          static_cast<double>(submss::parse_rate("--rate-min", rate_min)),
          static_cast<double>(submss::parse_rate("--rate-max", rate_max)),
          submss::parse_bytes("--mss", mss), points);
      std::string csv = "rtt_ns,rate_bps,window_mss,diagonal\n";
      for (const auto& c : cells) {
        csv += std::to_string(std::llround(c.rtt_s * 1e9)) + "," + submss::format_real(c.rate_bps) +
               "," + submss::format_real(c.window_mss) + "," + std::to_string(c.diagonal) + "\n";
      }
      write_output(out, csv);
    }
  } catch (const submss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const submss::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
