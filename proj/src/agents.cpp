#include "crtpsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace crtpsim {

const char* to_string(FlightMode mode) {
  return mode == FlightMode::Autonomous ? "autonomous" : "non_autonomous";
}

const char* to_string(DroneStatus status) {
  switch (status) {
    case DroneStatus::Idle: return "idle";
    case DroneStatus::Flying: return "flying";
    case DroneStatus::Suspended: return "suspended";
    case DroneStatus::Landing: return "landing";
    case DroneStatus::Landed: return "landed";
    case DroneStatus::Crashed: return "crashed";
    case DroneStatus::Hijacked: return "hijacked";
  }
  return "?";
}

bool is_terminal(DroneStatus status) {
  return status == DroneStatus::Crashed || status == DroneStatus::Landed;
}

const char* to_string(HijackPhase phase) {
  switch (phase) {
    case HijackPhase::Scan: return "scan";
    case HijackPhase::JamCw: return "jam_cw";
    case HijackPhase::Connect: return "connect";
    case HijackPhase::Control: return "control";
  }
  return "?";
}

CrtpPacket encode_frame(FrameKind kind, const Setpoint& sp) {
  switch (kind) {
    case FrameKind::Setpoint:
      return encode_setpoint(sp);
    case FrameKind::Land: {
      CrtpPacket p = encode_setpoint(Setpoint{});
      p.channel = 1;
      return p;
    }
    case FrameKind::Null: {
      CrtpPacket p;
      p.port = kPortLink;  // header 0xFF
      p.link = 3;
      p.channel = 3;
      return p;
    }
  }
  return {};
}

FrameKind classify_frame(const CrtpPacket& p) {
  if (p.port == kPortCommander && p.channel == 0) return FrameKind::Setpoint;
  if (p.port == kPortCommander && p.channel == 1) return FrameKind::Land;
  return FrameKind::Null;
}

namespace {

DroneState apply_loss_reaction(DroneState state, const DroneParams& params) {
  if (params.safe_mode) {
    state.status = DroneStatus::Landing;
    state.landing_ticks = 0;
  } else if (params.mode == FlightMode::Autonomous) {
    state.status = DroneStatus::Crashed;
  } else {
    // holds the last command
    state.status = DroneStatus::Suspended;
  }
  return state;
}

}  // namespace

DroneState drone_transition(DroneState state, const DroneEvent& event,
                            const DroneParams& params) {
  if (is_terminal(state.status)) return state;

  if (event.kind == DroneEvent::Kind::TickNoRx) {
    if (state.status == DroneStatus::Landing) {
      state.landing_ticks += 1;
      if (state.landing_ticks >= params.land_duration) {
        state.status = DroneStatus::Landed;
      }
      return state;
    }
    state.ticks_since_rx += 1;
    if ((state.status == DroneStatus::Flying ||
         state.status == DroneStatus::Hijacked) &&
        state.ticks_since_rx > params.loss_timeout) {
      state = apply_loss_reaction(state, params);
    }
    return state;
  }

  // FrameRx. A landing drone is committed to its failsafe.
  if (state.status == DroneStatus::Landing) return state;

  state.ticks_since_rx = 0;
  if (event.frame == FrameKind::Null) return state;  // keepalive only

  state.controlling_address = event.sender;
  const bool foreign =
      params.original_gcs.has_value() && event.sender != *params.original_gcs;

  if (event.frame == FrameKind::Setpoint) {
    state.last_setpoint = event.setpoint;
    state.status = foreign ? DroneStatus::Hijacked : DroneStatus::Flying;
  } else if (event.frame == FrameKind::Land) {
    if (state.status == DroneStatus::Idle) {
      state.status = DroneStatus::Landed;
    } else {
      state.status = DroneStatus::Landing;
      state.landing_ticks = 0;
    }
  }
  return state;
}

std::vector<Discovery> scan_all(const RadioMedium& medium,
                                const std::vector<Datarate>& rates,
                                int dwell) {
  if (dwell < 1) raise(ErrorCode::ValidationError, "dwell must be >= 1");
  std::vector<Datarate> sweep = rates;
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());

  const std::int64_t since = medium.now() - dwell;
  std::vector<Discovery> out;
  for (int ch = 0; ch <= 125; ++ch) {
    for (Datarate rate : sweep) {
      std::map<Address, std::uint64_t> seen;
      for (const Address& addr : medium.probe(ch, rate)) {
        seen[addr] += 1;  // the probe ack itself
      }
      for (const auto& [addr, n] : medium.cell_traffic_since(ch, rate, since)) {
        seen[addr] += n;
      }
      for (const auto& [addr, n] : seen) {
        out.push_back(Discovery{addr, ch, rate, n});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Discovery& a, const Discovery& b) {
    return std::tie(a.channel, a.address, a.rate) <
           std::tie(b.channel, b.address, b.rate);
  });
  return out;
}

GcsAgent::GcsAgent(GcsConfig config, FlightMode drone_mode)
    : config_(std::move(config)), drone_mode_(drone_mode) {}

Setpoint GcsAgent::command_pattern(std::uint64_t seq) {
  // integer-derived floats so the stream is bit-stable everywhere
  Setpoint sp;
  sp.roll = static_cast<float>(static_cast<int>((seq * 7) % 21) - 10);
  sp.pitch = static_cast<float>(static_cast<int>((seq * 5) % 11) - 5);
  sp.yaw = static_cast<float>(static_cast<int>((seq * 3) % 31) - 15);
  sp.thrust = static_cast<std::uint16_t>(32000 + (seq % 100) * 80);
  return sp;
}

bool GcsAgent::active(std::int64_t tick) const {
  return tick >= config_.start_tick && !link_lost_ && !mission_complete_;
}

std::optional<FrameToSend> GcsAgent::step(std::int64_t tick) {
  if (!active(tick)) return std::nullopt;

  // link supervision: give up once acks stay away for ack_timeout ticks
  if (first_send_tick_ >= 0) {
    const std::int64_t ref =
        last_ack_tick_ >= 0 ? last_ack_tick_ : first_send_tick_;
    if (tick - ref > config_.ack_timeout) {
      link_lost_ = true;
      link_lost_tick_ = tick;
      return std::nullopt;
    }
  }

  const std::int64_t rel = tick - config_.start_tick;
  FrameToSend frame;
  if (rel % config_.command_period == 0) {
    const bool scripted = drone_mode_ == FlightMode::Autonomous &&
                          config_.mission_length > 0;
    if (scripted && commands_emitted_ >= config_.mission_length) {
      frame.kind = FrameKind::Land;  // resent until acked
      land_sent_ = true;
    } else {
      frame.kind = FrameKind::Setpoint;
      frame.setpoint = command_pattern(commands_emitted_);
      commands_emitted_ += 1;
    }
  } else if (config_.keepalive) {
    frame.kind = FrameKind::Null;
  } else {
    return std::nullopt;
  }
  if (first_send_tick_ < 0) first_send_tick_ = tick;
  return frame;
}

void GcsAgent::on_outcome(const DeliveryOutcome& outcome,
                          const FrameToSend& frame, std::int64_t tick) {
  if (!outcome.delivered) return;
  last_ack_tick_ = tick;
  if (frame.kind == FrameKind::Setpoint) last_acked_setpoint_ = frame.setpoint;
  if (frame.kind == FrameKind::Land && !mission_complete_) {
    mission_complete_ = true;
    mission_complete_tick_ = tick;
  }
}

JammerAgent::JammerAgent(JammerConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed) {}

bool JammerAgent::active(std::int64_t tick) const {
  if (tick < config_.start_tick) return false;
  return config_.stop_tick < 0 || tick < config_.stop_tick;
}

Signal JammerAgent::transmitted_signal(double duration) const {
  Signal s = gaussian_noise(config_.sample_rate, duration, config_.amplitude,
                            seed_);
  s = apply_gain_db(s, config_.rf_gain_db + config_.if_gain_db +
                           config_.bb_gain_db);
  return fir_lowpass(s, config_.cutoff_hz, config_.transition_hz);
}

double JammerAgent::interferer_power() {
  if (!power_) {
    // enough samples for a stable power estimate
    const double duration = 16384.0 / config_.sample_rate;
    power_ = mean_power(transmitted_signal(duration));
  }
  return *power_;
}

std::optional<Interference> JammerAgent::step(std::int64_t tick) {
  if (!active(tick)) return std::nullopt;
  return Interference{config_.channel, interferer_power(),
                      InterfererKind::Gaussian};
}

HijackerAgent::HijackerAgent(HijackerConfig config)
    : config_(std::move(config)) {
  if (config_.rates.empty()) {
    raise(ErrorCode::ValidationError, "rates: hijacker needs at least one");
  }
  if (config_.dwell < 1) raise(ErrorCode::ValidationError, "dwell must be >= 1");
}

std::int64_t HijackerAgent::sweep_ticks() const {
  return 126 * static_cast<std::int64_t>(config_.rates.size()) * config_.dwell;
}

std::int64_t HijackerAgent::phase_tick(HijackPhase phase) const {
  return phase_ticks_[static_cast<int>(phase)];
}

void HijackerAgent::enter_phase(HijackPhase phase, std::int64_t tick) {
  state_.phase = phase;
  phase_ticks_[static_cast<int>(phase)] = tick;
}

HijackerActions HijackerAgent::step(std::int64_t tick,
                                    const RadioMedium& medium) {
  HijackerActions actions;
  if (tick < config_.start_tick) return actions;
  if (phase_ticks_[0] < 0) enter_phase(HijackPhase::Scan, tick);

  auto cw_interference = [&]() -> Interference {
    const MediumParams& p = medium.params();
    const double signal =
        std::pow(10.0, (p.clear_snr_db + p.noise_floor_db) / 10.0);
    // louder than the legitimate module
    const double power = signal * std::pow(10.0, config_.cw_margin_db / 10.0);
    return Interference{state_.target->channel, power, InterfererKind::Cw};
  };

  switch (state_.phase) {
    case HijackPhase::Scan: {
      if (scan_end_tick_ < 0) scan_end_tick_ = tick + sweep_ticks();
      if (tick < scan_end_tick_) break;
      std::vector<Discovery> found =
          scan_all(medium, config_.rates, config_.dwell);
      actions.sweep_done = true;
      actions.discoveries = found;
      if (found.empty()) {
        scan_end_tick_ = tick + sweep_ticks();  // keep sweeping
        break;
      }
      state_.target = found.front();
      if (state_.target->packets_seen > 1) {
        // live traffic: sever the legitimate link first
        enter_phase(HijackPhase::JamCw, tick);
        jam_start_tick_ = tick;
        actions.cw = cw_interference();
      } else {
        enter_phase(HijackPhase::Connect, tick);
      }
      break;
    }
    case HijackPhase::JamCw: {
      const Discovery& target = *state_.target;
      const std::int64_t last_ack =
          medium.last_ack_on_cell(target.channel, target.rate);
      const bool acks_silent =
          last_ack < 0 || tick - last_ack > config_.ack_timeout;
      if (tick - jam_start_tick_ >= config_.jam_hold && acks_silent) {
        enter_phase(HijackPhase::Connect, tick);
      } else {
        actions.cw = cw_interference();
      }
      break;
    }
    case HijackPhase::Connect:
    case HijackPhase::Control: {
      const std::int64_t rel = tick - phase_tick(HijackPhase::Connect);
      if (rel % config_.command_period == 0) {
        FrameToSend frame;
        frame.kind = FrameKind::Setpoint;
        // steady hover-hold stream
        frame.setpoint = Setpoint{0.0f, 0.0f, 0.0f, 36000};
        actions.frame = frame;
      }
      break;
    }
  }
  return actions;
}

void HijackerAgent::on_outcome(const DeliveryOutcome& outcome,
                               std::int64_t tick) {
  if (state_.phase == HijackPhase::Connect && outcome.delivered) {
    enter_phase(HijackPhase::Control, tick);
  }
}

}  // namespace crtpsim
