#include "crtpsim/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "crtpsim/rng.hpp"
#include "crtpsim/sim_engine.hpp"

namespace crtpsim {

namespace {

std::vector<Datarate> parse_rates(const std::string& csv) {
  std::vector<Datarate> rates;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) rates.push_back(parse_datarate(item));
  }
  if (rates.empty()) raise(ErrorCode::ValidationError, "rates must not be empty");
  return rates;
}

void cmd_scan(std::ostream& out, const std::string& scenario_path,
              const std::string& rates_csv, int dwell) {
  const Scenario scenario = load_scenario(scenario_path);
  const std::vector<Discovery> found =
      run_scan(scenario, parse_rates(rates_csv), dwell);
  char line[96];
  std::snprintf(line, sizeof line, "%-16s %4s %5s %8s\n", "ADDRESS", "CH",
                "RATE", "PACKETS");
  out << line;
  for (const Discovery& d : found) {
    std::snprintf(line, sizeof line, "%-16s %4d %5s %8llu\n",
                  format_address(d.address).c_str(), d.channel,
                  to_string(d.rate),
                  static_cast<unsigned long long>(d.packets_seen));
    out << line;
  }
  out << found.size() << " device(s) found\n";
}

void cmd_run(std::ostream& out, const std::string& scenario_path,
             std::optional<std::uint64_t> seed, const std::string& out_dir) {
  const Scenario scenario = load_scenario(scenario_path);
  const RunResult result = run(scenario, seed);

  out << "scenario " << scenario.name << ", seed "
      << (seed ? *seed : scenario.seed) << ", " << scenario.duration
      << " ticks, " << result.trace.events.size() << " events\n";
  for (const DroneMetrics& d : result.metrics.drones) {
    out << "drone " << d.entity << ": " << to_string(d.final_status);
    if (d.controlling_address) {
      out << " (controlled by " << format_address(*d.controlling_address) << ")";
    }
    out << "\n";
  }
  char line[128];
  for (const LinkMetrics& l : result.metrics.links) {
    std::snprintf(line, sizeof line,
                  "link %s: pdr %.4f (%llu/%llu)", l.entity.c_str(), l.pdr,
                  static_cast<unsigned long long>(l.frames_acked),
                  static_cast<unsigned long long>(l.frames_sent));
    out << line;
    if (l.link_lost_tick >= 0) out << ", link lost at tick " << l.link_lost_tick;
    if (l.mission_complete) out << ", mission complete";
    out << "\n";
  }
  if (result.metrics.first_alert_tick >= 0) {
    out << "first jam alert at tick " << result.metrics.first_alert_tick << "\n";
  }

  if (!out_dir.empty()) {
    write_outputs(result, out_dir);
    out << "wrote " << (std::filesystem::path(out_dir) / "trace.tsv").string()
        << " and " << (std::filesystem::path(out_dir) / "metrics.csv").string()
        << "\n";
  }
}

void cmd_spectrum(std::ostream& out, const std::string& scenario_path,
                  const std::string& entity, std::size_t fft_size,
                  double duration, const std::string& out_path,
                  const std::string& iq_path) {
  const Scenario scenario = load_scenario(scenario_path);
  const JammerConfig* cfg = nullptr;
  for (const JammerConfig& j : scenario.jammers) {
    if (j.name == entity) cfg = &j;
  }
  if (cfg == nullptr) {
    raise(ErrorCode::ValidationError,
          "entity '" + entity + "' is not a jammer in " + scenario.name);
  }
  JammerAgent jammer(*cfg, derive_stream_seed(scenario.seed, cfg->name));
  if (duration <= 0.0) {
    duration = 64.0 * static_cast<double>(fft_size) / cfg->sample_rate;
  }
  const Signal signal = jammer.transmitted_signal(duration);
  const Spectrum spectrum = power_spectrum(signal, fft_size);

  std::ofstream csv(out_path);
  if (!csv) raise(ErrorCode::IoError, "cannot write " + out_path);
  write_spectrum_csv(spectrum, csv);
  csv.flush();
  if (!csv) raise(ErrorCode::IoError, "write failed: " + out_path);

  if (!iq_path.empty()) {
    std::ofstream iq(iq_path);
    if (!iq) raise(ErrorCode::IoError, "cannot write " + iq_path);
    write_signal_csv(signal, iq);
    iq.flush();
    if (!iq) raise(ErrorCode::IoError, "write failed: " + iq_path);
  }

  std::size_t peak = 0;
  for (std::size_t i = 1; i < spectrum.power.size(); ++i) {
    if (spectrum.power[i] > spectrum.power[peak]) peak = i;
  }
  char line[128];
  std::snprintf(line, sizeof line,
                "%zu bins -> %s (peak %.4g at %.6g MHz offset)\n",
                spectrum.power.size(), out_path.c_str(), spectrum.power[peak],
                spectrum.bin_frequencies[peak] / 1e6);
  out << line;
}

struct TraceSummary {
  std::int64_t last_tick = 0;
  std::size_t events = 0;
  // entity -> (last status, tick)
  std::map<std::string, std::pair<std::string, std::int64_t>> status;
  std::map<std::string, std::int64_t> link_lost;
  std::map<std::string, std::int64_t> first_alert;
  std::map<std::string, std::vector<std::pair<std::string, std::int64_t>>> phases;
  std::map<std::string, std::int64_t> mission_complete;
  std::size_t discoveries = 0;
};

void cmd_report(std::ostream& out, const std::string& trace_path) {
  std::ifstream in(trace_path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + trace_path);

  TraceSummary sum;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() < 3) {
      raise(ErrorCode::ParseError,
            trace_path + ":" + std::to_string(line_no) + ": bad trace line");
    }
    std::int64_t tick = 0;
    try {
      tick = std::stoll(fields[0]);
    } catch (const std::exception&) {
      raise(ErrorCode::ParseError,
            trace_path + ":" + std::to_string(line_no) + ": bad tick");
    }
    const std::string& entity = fields[1];
    const std::string& kind = fields[2];
    std::map<std::string, std::string> kv;
    for (std::size_t i = 3; i < fields.size(); ++i) {
      auto eq = fields[i].find('=');
      if (eq != std::string::npos) {
        kv[fields[i].substr(0, eq)] = fields[i].substr(eq + 1);
      }
    }

    sum.events += 1;
    sum.last_tick = std::max(sum.last_tick, tick);
    if (kind == "status") {
      sum.status[entity] = {kv["to"], tick};
    } else if (kind == "link_lost") {
      if (!sum.link_lost.contains(entity)) sum.link_lost[entity] = tick;
    } else if (kind == "jam_alert") {
      if (!sum.first_alert.contains(entity)) sum.first_alert[entity] = tick;
    } else if (kind == "phase") {
      sum.phases[entity].emplace_back(kv["to"], tick);
    } else if (kind == "mission") {
      if (!sum.mission_complete.contains(entity)) sum.mission_complete[entity] = tick;
    } else if (kind == "discovery") {
      sum.discoveries += 1;
    }
  }

  out << sum.events << " events through tick " << sum.last_tick << "\n";
  for (const auto& [entity, st] : sum.status) {
    out << "drone " << entity << ": " << st.first << " (tick " << st.second
        << ")\n";
  }
  for (const auto& [entity, tick] : sum.link_lost) {
    out << "link " << entity << ": lost at tick " << tick << "\n";
  }
  for (const auto& [entity, tick] : sum.mission_complete) {
    out << "mission " << entity << ": complete at tick " << tick << "\n";
  }
  for (const auto& [entity, list] : sum.phases) {
    out << "hijacker " << entity << ":";
    for (const auto& [phase, tick] : list) {
      out << " " << phase << "@" << tick;
    }
    out << "\n";
  }
  for (const auto& [entity, tick] : sum.first_alert) {
    out << "alert " << entity << ": first at tick " << tick << "\n";
  }
  if (sum.discoveries > 0) out << sum.discoveries << " discovery record(s)\n";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"CRTP radio-link attack/defense simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string rates_csv = "250K,1M,2M";
  int dwell = 20;
  CLI::App* scan = app.add_subcommand("scan", "sweep the medium and list devices");
  scan->add_option("--scenario", scenario_path, "scenario file")->required();
  scan->add_option("--rates", rates_csv, "datarates to sweep (csv)");
  scan->add_option("--dwell", dwell, "ticks spent per (channel, rate) cell");

  std::string run_scenario;
  std::string out_dir;
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario");
  run_cmd->add_option("--scenario", run_scenario, "scenario file")->required();
  run_cmd->add_option("--seed", seed_value, "override the scenario seed")
      ->each([&](const std::string&) { seed_given = true; });
  run_cmd->add_option("--out", out_dir,
                      "output directory (default: $CRTP_SIM_OUT)");

  std::string spec_scenario, spec_entity, spec_out, spec_iq;
  std::size_t fft_size = 1024;
  double spec_duration = 0.0;
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "export a jammer's power spectrum");
  spectrum->add_option("--scenario", spec_scenario, "scenario file")->required();
  spectrum->add_option("--entity", spec_entity, "jammer name")->required();
  spectrum->add_option("--fft", fft_size, "FFT size (power of two)");
  spectrum->add_option("--duration", spec_duration, "signal duration in seconds");
  spectrum->add_option("--out", spec_out, "spectrum CSV path")->required();
  spectrum->add_option("--iq", spec_iq, "also dump the IQ samples as CSV");

  std::string trace_path;
  CLI::App* report = app.add_subcommand("report", "summarize a trace file");
  report->add_option("--trace", trace_path, "trace file")->required();

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 64;
  }

  try {
    if (scan->parsed()) {
      cmd_scan(out, scenario_path, rates_csv, dwell);
    } else if (run_cmd->parsed()) {
      if (out_dir.empty()) {
        if (const char* env = std::getenv("CRTP_SIM_OUT")) out_dir = env;
      }
      cmd_run(out, run_scenario,
              seed_given ? std::optional<std::uint64_t>(seed_value)
                         : std::nullopt,
              out_dir);
    } else if (spectrum->parsed()) {
      cmd_spectrum(out, spec_scenario, spec_entity, fft_size, spec_duration,
                   spec_out, spec_iq);
    } else if (report->parsed()) {
      cmd_report(out, trace_path);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? 2 : 1;
  }
  return 0;
}

}  // namespace crtpsim
