#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crtpsim/agents.hpp"
#include "crtpsim/defenses.hpp"
#include "crtpsim/radio_medium.hpp"

namespace crtpsim {

struct ScenarioDrone {
  std::string name;
  RadioUri uri;
  FlightMode mode = FlightMode::NonAutonomous;
  bool safe_mode = false;
  int loss_timeout = 200;
  int land_duration = 100;
  DroneStatus initial_status = DroneStatus::Flying;
};

struct DefenseConfig {
  std::optional<HopSchedule> hopping;
  bool detector = false;
  std::size_t detector_window = 100;
  double detector_threshold = 0.5;
};

enum class AgentKind : std::uint8_t { Drone, Gcs, Jammer, Hijacker };

struct Scenario {
  std::string name = "scenario";
  std::int64_t duration = 1000;  // ticks
  int tick_rate = 100;           // ticks/s
  std::uint64_t seed = 1;
  MediumParams medium;
  std::vector<ScenarioDrone> drones;
  std::vector<GcsConfig> gcs;
  std::vector<JammerConfig> jammers;
  std::vector<HijackerConfig> hijackers;
  DefenseConfig defense;
  // file order of the sections above; agents step in this order
  std::vector<std::pair<AgentKind, std::size_t>> roster;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::istream& in, const std::string& origin);
void validate_scenario(const Scenario& s);

struct TraceEvent {
  std::int64_t tick = 0;
  std::string entity;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> details;

  std::string to_line() const;  // tab-separated: tick, entity, kind, k=v...
};

struct Trace {
  std::vector<TraceEvent> events;

  void write(std::ostream& out) const;
  std::string to_string() const;
};

struct LinkMetrics {
  std::string entity;
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_acked = 0;
  double pdr = 1.0;
  std::int64_t link_lost_tick = -1;
  bool mission_complete = false;
  std::optional<Setpoint> last_delivered_setpoint;
};

struct DroneMetrics {
  std::string entity;
  DroneStatus final_status = DroneStatus::Idle;
  std::optional<Address> controlling_address;
  Setpoint last_setpoint{};
  std::optional<Setpoint> last_delivered_setpoint;
  std::int64_t suspended_tick = -1;
  std::int64_t crashed_tick = -1;
  std::int64_t landed_tick = -1;
  std::int64_t hijacked_tick = -1;
};

struct HijackerMetrics {
  std::string entity;
  std::int64_t phase_tick[4] = {-1, -1, -1, -1};  // indexed by HijackPhase
};

struct Metrics {
  std::vector<LinkMetrics> links;
  std::vector<DroneMetrics> drones;
  std::vector<HijackerMetrics> hijackers;
  std::int64_t first_alert_tick = -1;

  void write_csv(std::ostream& out) const;
};

struct RunResult {
  Trace trace;
  Metrics metrics;
};

// Deterministic fixed-tick loop: agents in roster order, then frame
// delivery, then defenses. Identical (scenario, seed) gives a
// byte-identical trace.
RunResult run(const Scenario& scenario,
              std::optional<std::uint64_t> seed_override = std::nullopt);

// Runs the scenario with a passive sweep scanner and returns what it saw.
std::vector<Discovery> run_scan(const Scenario& scenario,
                                const std::vector<Datarate>& rates, int dwell);

// trace.tsv and metrics.csv under out_dir.
void write_outputs(const RunResult& result,
                   const std::filesystem::path& out_dir);

}  // namespace crtpsim
