#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crtpsim/crtp_codec.hpp"
#include "crtpsim/phy_signal.hpp"
#include "crtpsim/radio_medium.hpp"

namespace crtpsim {

enum class FlightMode : std::uint8_t { Autonomous, NonAutonomous };
enum class DroneStatus : std::uint8_t {
  Idle,
  Flying,
  Suspended,
  Landing,
  Landed,
  Crashed,
  Hijacked,
};

const char* to_string(FlightMode mode);
const char* to_string(DroneStatus status);
bool is_terminal(DroneStatus status);

// Frame semantics above the codec: commander setpoints, an explicit land
// command (port 3, channel 1) and link-layer null keepalives (header 0xFF).
enum class FrameKind : std::uint8_t { Setpoint, Land, Null };

CrtpPacket encode_frame(FrameKind kind, const Setpoint& sp);
FrameKind classify_frame(const CrtpPacket& p);

struct DroneParams {
  FlightMode mode = FlightMode::NonAutonomous;
  bool safe_mode = false;
  int loss_timeout = 200;   // ticks without any frame before the loss reaction
  int land_duration = 100;  // Landing -> Landed
  std::optional<Address> original_gcs;  // legitimate controller identity
};

struct DroneState {
  DroneStatus status = DroneStatus::Idle;
  std::optional<Address> controlling_address;
  Setpoint last_setpoint{};
  int ticks_since_rx = 0;
  int landing_ticks = 0;
};

struct DroneEvent {
  enum class Kind : std::uint8_t { FrameRx, TickNoRx };
  Kind kind = Kind::TickNoRx;
  // FrameRx only:
  Address sender{};
  FrameKind frame = FrameKind::Null;
  Setpoint setpoint{};
};

// Pure flight-status state machine. Crashed and Landed are terminal.
DroneState drone_transition(DroneState state, const DroneEvent& event,
                            const DroneParams& params);

struct Discovery {
  Address address{};
  int channel = 0;
  Datarate rate = Datarate::M2;
  std::uint64_t packets_seen = 0;
};

// Sweep every (channel, datarate) cell: probe for listeners and count the
// frames observed there over the trailing dwell window. Sorted by
// (channel, address, rate).
std::vector<Discovery> scan_all(const RadioMedium& medium,
                                const std::vector<Datarate>& rates, int dwell);

// Destination comes from the sender's registered link target.
struct FrameToSend {
  FrameKind kind = FrameKind::Null;
  Setpoint setpoint{};
};

struct GcsConfig {
  std::string name;
  std::string drone;  // roster reference
  Address address{};  // own identity
  int command_period = 10;
  int ack_timeout = 50;  // ticks without an ack before the client gives up
  std::int64_t start_tick = 0;
  std::uint64_t mission_length = 0;  // instructions; 0 = endless pilot stream
  bool keepalive = true;             // null packets between commands
};

// Ground station: periodic setpoints (non-autonomous) or a scripted mission
// (autonomous), null keepalives in between, and ack-based link supervision.
// Once the link is declared lost the client stops transmitting.
class GcsAgent {
 public:
  GcsAgent(GcsConfig config, FlightMode drone_mode);

  std::optional<FrameToSend> step(std::int64_t tick);
  void on_outcome(const DeliveryOutcome& outcome, const FrameToSend& frame,
                  std::int64_t tick);

  bool link_lost() const { return link_lost_; }
  std::int64_t link_lost_tick() const { return link_lost_tick_; }
  bool mission_complete() const { return mission_complete_; }
  std::int64_t mission_complete_tick() const { return mission_complete_tick_; }
  std::uint64_t commands_emitted() const { return commands_emitted_; }
  std::optional<Setpoint> last_acked_setpoint() const { return last_acked_setpoint_; }
  const GcsConfig& config() const { return config_; }

  // Deterministic pilot/mission pattern, exposed so tests can predict it.
  static Setpoint command_pattern(std::uint64_t seq);

 private:
  bool active(std::int64_t tick) const;

  GcsConfig config_;
  FlightMode drone_mode_;
  std::uint64_t commands_emitted_ = 0;
  bool land_sent_ = false;
  bool mission_complete_ = false;
  std::int64_t mission_complete_tick_ = -1;
  bool link_lost_ = false;
  std::int64_t link_lost_tick_ = -1;
  std::int64_t last_ack_tick_ = -1;
  std::int64_t first_send_tick_ = -1;
  std::optional<Setpoint> last_acked_setpoint_;
};

struct Interference {
  int channel = 0;
  double power = 0.0;
  InterfererKind kind = InterfererKind::Gaussian;
};

struct JammerConfig {
  std::string name;
  int channel = 81;
  std::int64_t start_tick = 0;
  std::int64_t stop_tick = -1;  // -1: active until the end
  double amplitude = 1.0;
  double rf_gain_db = 14.0;
  double if_gain_db = 47.0;
  double bb_gain_db = 0.0;
  double cutoff_hz = 4e6;
  double transition_hz = 1e6;
  double sample_rate = 10e6;
};

// Constant jammer. The interferer power is derived once per activation from
// the baseband chain: Gaussian source -> RF/IF/BB gains -> low-pass.
class JammerAgent {
 public:
  JammerAgent(JammerConfig config, std::uint64_t seed);

  std::optional<Interference> step(std::int64_t tick);
  bool active(std::int64_t tick) const;
  double interferer_power();  // lazily derived, then cached
  Signal transmitted_signal(double duration) const;
  const JammerConfig& config() const { return config_; }

 private:
  JammerConfig config_;
  std::uint64_t seed_;
  std::optional<double> power_;
};

enum class HijackPhase : std::uint8_t { Scan, JamCw, Connect, Control };

const char* to_string(HijackPhase phase);

struct HijackerConfig {
  std::string name;
  Address address{};
  std::vector<Datarate> rates{Datarate::M2};
  int dwell = 20;
  std::int64_t start_tick = 0;
  int ack_timeout = 50;  // ack silence needed before connecting
  int jam_hold = 300;    // minimum CW time; keep above the victim loss_timeout
  double cw_margin_db = 10.0;
  int command_period = 1;
};

struct HijackerState {
  HijackPhase phase = HijackPhase::Scan;
  std::optional<Discovery> target;
};

struct HijackerActions {
  std::optional<Interference> cw;
  std::optional<FrameToSend> frame;
  bool sweep_done = false;             // a sweep finished this tick
  std::vector<Discovery> discoveries;  // its results (may be empty)
};

// Two-radio hijacker: sweep-scan for a target, CW-jam its channel until the
// legitimate link dies, then connect with its own setpoint stream. An idle
// target (no traffic seen) is connected to directly, skipping the jam.
class HijackerAgent {
 public:
  explicit HijackerAgent(HijackerConfig config);

  HijackerActions step(std::int64_t tick, const RadioMedium& medium);
  void on_outcome(const DeliveryOutcome& outcome, std::int64_t tick);

  const HijackerState& state() const { return state_; }
  const HijackerConfig& config() const { return config_; }
  std::int64_t phase_tick(HijackPhase phase) const;

 private:
  void enter_phase(HijackPhase phase, std::int64_t tick);
  std::int64_t sweep_ticks() const;

  HijackerConfig config_;
  HijackerState state_;
  std::int64_t scan_end_tick_ = -1;
  std::int64_t jam_start_tick_ = -1;
  std::int64_t phase_ticks_[4] = {-1, -1, -1, -1};
};

}  // namespace crtpsim
