#include "crtpsim/sim_engine.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crtpsim/rng.hpp"

namespace crtpsim {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string TraceEvent::to_line() const {
  std::string line = std::to_string(tick);
  line += '\t';
  line += entity;
  line += '\t';
  line += kind;
  for (const auto& [k, v] : details) {
    line += '\t';
    line += k;
    line += '=';
    line += v;
  }
  return line;
}

void Trace::write(std::ostream& out) const {
  for (const TraceEvent& e : events) {
    out << e.to_line() << '\n';
  }
}

std::string Trace::to_string() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

void Metrics::write_csv(std::ostream& out) const {
  out << "entity,metric,value\n";
  auto row = [&](const std::string& entity, const std::string& metric,
                 const std::string& value) {
    out << entity << ',' << metric << ',' << value << '\n';
  };
  for (const LinkMetrics& l : links) {
    row(l.entity, "frames_sent", std::to_string(l.frames_sent));
    row(l.entity, "frames_acked", std::to_string(l.frames_acked));
    row(l.entity, "pdr", fmt_double(l.pdr));
    row(l.entity, "link_lost_tick", std::to_string(l.link_lost_tick));
    row(l.entity, "mission_complete", l.mission_complete ? "1" : "0");
  }
  for (const DroneMetrics& d : drones) {
    row(d.entity, "final_status", to_string(d.final_status));
    row(d.entity, "controlling_address",
        d.controlling_address ? format_address(*d.controlling_address) : "-");
    row(d.entity, "last_setpoint_roll", fmt_double(d.last_setpoint.roll));
    row(d.entity, "last_setpoint_pitch", fmt_double(d.last_setpoint.pitch));
    row(d.entity, "last_setpoint_yaw", fmt_double(d.last_setpoint.yaw));
    row(d.entity, "last_setpoint_thrust", std::to_string(d.last_setpoint.thrust));
    row(d.entity, "suspended_tick", std::to_string(d.suspended_tick));
    row(d.entity, "crashed_tick", std::to_string(d.crashed_tick));
    row(d.entity, "landed_tick", std::to_string(d.landed_tick));
    row(d.entity, "hijacked_tick", std::to_string(d.hijacked_tick));
  }
  for (const HijackerMetrics& h : hijackers) {
    row(h.entity, "tick_scan", std::to_string(h.phase_tick[0]));
    row(h.entity, "tick_jam_cw", std::to_string(h.phase_tick[1]));
    row(h.entity, "tick_connect", std::to_string(h.phase_tick[2]));
    row(h.entity, "tick_control", std::to_string(h.phase_tick[3]));
  }
  row("sim", "first_alert_tick", std::to_string(first_alert_tick));
}

namespace {

struct DroneRuntime {
  const ScenarioDrone* cfg = nullptr;
  DroneParams params;
  DroneState state;
  std::optional<Setpoint> last_delivered_setpoint;
  std::int64_t suspended_tick = -1;
  std::int64_t crashed_tick = -1;
  std::int64_t landed_tick = -1;
  std::int64_t hijacked_tick = -1;
};

struct GcsRuntime {
  GcsAgent agent;
  RandomStream rng;
  bool link_lost_emitted = false;
  bool mission_emitted = false;
  bool alert_on = false;
};

struct JammerRuntime {
  JammerAgent agent;
  bool was_on = false;
};

struct HijackerRuntime {
  HijackerAgent agent;
  RandomStream rng;
  bool entered = false;
  bool cw_was_on = false;
};

struct PendingFrame {
  AgentKind origin = AgentKind::Gcs;
  std::size_t origin_index = 0;
  std::string sender;
  Address sender_address{};
  Address to{};
  CrtpPacket packet;
  FrameToSend frame;
  double draw = 0.0;
};

class Engine {
 public:
  Engine(const Scenario& sc, std::uint64_t seed);

  RunResult run_all();
  void run_ticks(std::int64_t ticks);
  RadioMedium& medium() { return medium_; }

 private:
  void do_tick(std::int64_t t);
  void hop_if_due(std::int64_t t);
  void step_agents(std::int64_t t);
  void deliver(std::int64_t t);
  void run_defenses(std::int64_t t);
  void queue_frame(AgentKind origin, std::size_t index,
                   const std::string& sender, const Address& sender_address,
                   const FrameToSend& frame, double draw);
  void apply_drone_event(std::size_t index, const DroneEvent& event,
                         std::int64_t t);
  void emit(std::int64_t tick, const std::string& entity,
            const std::string& kind,
            std::vector<std::pair<std::string, std::string>> details);
  void emit_phase_change(std::int64_t t, HijackerRuntime& h, HijackPhase from,
                         HijackPhase to);
  Metrics collect_metrics() const;

  const Scenario& sc_;
  std::uint64_t seed_;
  RadioMedium medium_;
  std::vector<DroneRuntime> drones_;
  std::vector<GcsRuntime> gcs_;
  std::vector<JammerRuntime> jammers_;
  std::vector<HijackerRuntime> hijackers_;
  std::vector<PendingFrame> pending_;
  Trace trace_;
  std::int64_t first_alert_tick_ = -1;
  int hop_channel_ = -1;
};

Engine::Engine(const Scenario& sc, std::uint64_t seed)
    : sc_(sc), seed_(seed), medium_(sc.medium) {
  for (const ScenarioDrone& d : sc_.drones) {
    Transceiver t;
    t.id = d.name;
    t.uri = d.uri;
    t.role = Role::Drone;
    t.listening = true;
    t.own_address = d.uri.address;
    medium_.register_transceiver(t);

    DroneRuntime rt;
    rt.cfg = &d;
    rt.params.mode = d.mode;
    rt.params.safe_mode = d.safe_mode;
    rt.params.loss_timeout = d.loss_timeout;
    rt.params.land_duration = d.land_duration;
    for (const GcsConfig& g : sc_.gcs) {
      if (g.drone == d.name) {
        rt.params.original_gcs = g.address;
        break;
      }
    }
    rt.state.status = d.initial_status;
    drones_.push_back(std::move(rt));
  }

  for (const GcsConfig& g : sc_.gcs) {
    const ScenarioDrone* drone = nullptr;
    for (const ScenarioDrone& d : sc_.drones) {
      if (d.name == g.drone) drone = &d;
    }
    Transceiver t;
    t.id = g.name;
    t.uri = drone->uri;  // tuned to its drone's cell
    t.role = Role::Gcs;
    t.listening = false;
    t.own_address = g.address;
    medium_.register_transceiver(t);
    gcs_.push_back(GcsRuntime{GcsAgent(g, drone->mode),
                              RandomStream(derive_stream_seed(seed_, g.name)),
                              false, false, false});
  }

  for (const JammerConfig& j : sc_.jammers) {
    jammers_.push_back(
        JammerRuntime{JammerAgent(j, derive_stream_seed(seed_, j.name)), false});
  }

  for (const HijackerConfig& h : sc_.hijackers) {
    Transceiver t;
    t.id = h.name;
    t.uri.channel = 0;
    t.uri.rate = h.rates.front();
    t.uri.address = h.address;  // retargeted on connect
    t.role = Role::Attacker;
    t.listening = false;
    t.own_address = h.address;
    medium_.register_transceiver(t);
    hijackers_.push_back(
        HijackerRuntime{HijackerAgent(h),
                        RandomStream(derive_stream_seed(seed_, h.name)),
                        false, false});
  }
}

void Engine::emit(std::int64_t tick, const std::string& entity,
                  const std::string& kind,
                  std::vector<std::pair<std::string, std::string>> details) {
  trace_.events.push_back(TraceEvent{tick, entity, kind, std::move(details)});
}

void Engine::hop_if_due(std::int64_t t) {
  if (!sc_.defense.hopping) return;
  const HopSchedule& sched = *sc_.defense.hopping;
  if (t % sched.epoch_length != 0) return;
  const auto epoch = static_cast<std::uint64_t>(t / sched.epoch_length);
  const int channel = next_hop_channel(sched, epoch);
  if (channel == hop_channel_) return;
  hop_channel_ = channel;
  for (const ScenarioDrone& d : sc_.drones) medium_.retune(d.name, channel);
  for (const GcsConfig& g : sc_.gcs) medium_.retune(g.name, channel);
  emit(t, "hopping", "retune",
       {{"epoch", std::to_string(epoch)}, {"channel", std::to_string(channel)}});
}

void Engine::queue_frame(AgentKind origin, std::size_t index,
                         const std::string& sender,
                         const Address& sender_address,
                         const FrameToSend& frame, double draw) {
  PendingFrame pf;
  pf.origin = origin;
  pf.origin_index = index;
  pf.sender = sender;
  pf.sender_address = sender_address;
  pf.to = medium_.transceiver(sender).uri.address;
  pf.packet = encode_frame(frame.kind, frame.setpoint);
  pf.frame = frame;
  pf.draw = draw;
  pending_.push_back(std::move(pf));
}

void Engine::emit_phase_change(std::int64_t t, HijackerRuntime& h,
                               HijackPhase from, HijackPhase to) {
  emit(t, h.agent.config().name, "phase",
       {{"from", to_string(from)}, {"to", to_string(to)}});
}

void Engine::step_agents(std::int64_t t) {
  for (const auto& [kind, index] : sc_.roster) {
    switch (kind) {
      case AgentKind::Drone: {
        DroneEvent ev;
        ev.kind = DroneEvent::Kind::TickNoRx;
        apply_drone_event(index, ev, t);
        break;
      }
      case AgentKind::Gcs: {
        GcsRuntime& g = gcs_[index];
        std::optional<FrameToSend> frame = g.agent.step(t);
        if (g.agent.link_lost() && !g.link_lost_emitted) {
          g.link_lost_emitted = true;
          emit(t, g.agent.config().name, "link_lost", {});
        }
        if (frame) {
          queue_frame(AgentKind::Gcs, index, g.agent.config().name,
                      g.agent.config().address, *frame, g.rng.uniform01());
        }
        break;
      }
      case AgentKind::Jammer: {
        JammerRuntime& j = jammers_[index];
        std::optional<Interference> contribution = j.agent.step(t);
        if (contribution) {
          medium_.add_interference(contribution->channel, contribution->power,
                                   contribution->kind);
          if (!j.was_on) {
            j.was_on = true;
            emit(t, j.agent.config().name, "jam_on",
                 {{"channel", std::to_string(contribution->channel)},
                  {"power", fmt_double(contribution->power)}});
          }
        } else if (j.was_on) {
          j.was_on = false;
          emit(t, j.agent.config().name, "jam_off", {});
        }
        break;
      }
      case AgentKind::Hijacker: {
        HijackerRuntime& h = hijackers_[index];
        const std::string& name = h.agent.config().name;
        const HijackPhase prev = h.agent.state().phase;
        HijackerActions actions = h.agent.step(t, medium_);
        if (!h.entered && t >= h.agent.config().start_tick) {
          h.entered = true;
          emit(t, name, "phase", {{"to", to_string(HijackPhase::Scan)}});
        }
        if (actions.sweep_done) {
          for (const Discovery& d : actions.discoveries) {
            emit(t, name, "discovery",
                 {{"address", format_address(d.address)},
                  {"channel", std::to_string(d.channel)},
                  {"rate", to_string(d.rate)},
                  {"packets", std::to_string(d.packets_seen)}});
          }
        }
        const HijackPhase now = h.agent.state().phase;
        if (now != prev) {
          if (h.agent.state().target &&
              (now == HijackPhase::JamCw || now == HijackPhase::Connect)) {
            const Discovery& target = *h.agent.state().target;
            if (prev == HijackPhase::Scan) {
              emit(t, name, "target",
                   {{"address", format_address(target.address)},
                    {"channel", std::to_string(target.channel)},
                    {"rate", to_string(target.rate)}});
            }
          }
          emit_phase_change(t, h, prev, now);
          if (now == HijackPhase::Connect) {
            const Discovery& target = *h.agent.state().target;
            medium_.set_link_target(name, target.channel, target.rate,
                                    target.address);
          }
        }
        if (actions.cw) {
          medium_.add_interference(actions.cw->channel, actions.cw->power,
                                   actions.cw->kind);
          if (!h.cw_was_on) {
            h.cw_was_on = true;
            emit(t, name, "cw_on",
                 {{"channel", std::to_string(actions.cw->channel)},
                  {"power", fmt_double(actions.cw->power)}});
          }
        } else if (h.cw_was_on) {
          h.cw_was_on = false;
          emit(t, name, "cw_off", {});
        }
        if (actions.frame) {
          queue_frame(AgentKind::Hijacker, index, name,
                      h.agent.config().address, *actions.frame,
                      h.rng.uniform01());
        }
        break;
      }
    }
  }
}

void Engine::apply_drone_event(std::size_t index, const DroneEvent& event,
                               std::int64_t t) {
  DroneRuntime& d = drones_[index];
  const DroneStatus old = d.state.status;
  d.state = drone_transition(d.state, event, d.params);
  const DroneStatus now = d.state.status;
  if (now == old) return;

  std::vector<std::pair<std::string, std::string>> kv = {
      {"from", to_string(old)}, {"to", to_string(now)}};
  if (now == DroneStatus::Hijacked && d.state.controlling_address) {
    kv.emplace_back("controlling", format_address(*d.state.controlling_address));
  }
  emit(t, d.cfg->name, "status", std::move(kv));

  switch (now) {
    case DroneStatus::Suspended:
      if (d.suspended_tick < 0) d.suspended_tick = t;
      break;
    case DroneStatus::Crashed:
      if (d.crashed_tick < 0) d.crashed_tick = t;
      break;
    case DroneStatus::Landed:
      if (d.landed_tick < 0) d.landed_tick = t;
      break;
    case DroneStatus::Hijacked:
      if (d.hijacked_tick < 0) d.hijacked_tick = t;
      break;
    default:
      break;
  }
}

void Engine::deliver(std::int64_t t) {
  for (PendingFrame& pf : pending_) {
    const DeliveryOutcome outcome =
        medium_.transmit_frame(pf.sender, pf.to, pf.packet, pf.draw);

    if (pf.origin == AgentKind::Gcs) {
      GcsRuntime& g = gcs_[pf.origin_index];
      g.agent.on_outcome(outcome, pf.frame, t);
      if (g.agent.mission_complete() && !g.mission_emitted) {
        g.mission_emitted = true;
        emit(t, g.agent.config().name, "mission",
             {{"event", "complete"},
              {"commands", std::to_string(g.agent.commands_emitted())}});
      }
    } else {
      HijackerRuntime& h = hijackers_[pf.origin_index];
      const HijackPhase prev = h.agent.state().phase;
      h.agent.on_outcome(outcome, t);
      if (h.agent.state().phase != prev) {
        emit_phase_change(t, h, prev, h.agent.state().phase);
      }
    }

    if (!outcome.delivered || outcome.receiver.empty()) continue;
    for (std::size_t i = 0; i < drones_.size(); ++i) {
      if (drones_[i].cfg->name != outcome.receiver) continue;
      DroneEvent ev;
      ev.kind = DroneEvent::Kind::FrameRx;
      ev.sender = pf.sender_address;
      ev.frame = classify_frame(pf.packet);
      if (ev.frame == FrameKind::Setpoint) {
        ev.setpoint = decode_setpoint(pf.packet);
        drones_[i].last_delivered_setpoint = ev.setpoint;
      }
      apply_drone_event(i, ev, t);
      break;
    }
  }
  pending_.clear();
}

void Engine::run_defenses(std::int64_t t) {
  if (!sc_.defense.detector) return;
  for (GcsRuntime& g : gcs_) {
    const std::string& name = g.agent.config().name;
    std::optional<JamAlert> alert =
        detect_jamming(medium_.stats(name), sc_.defense.detector_window,
                       sc_.defense.detector_threshold, t);
    if (alert && !g.alert_on) {
      g.alert_on = true;
      if (first_alert_tick_ < 0) first_alert_tick_ = t;
      emit(t, name, "jam_alert",
           {{"per", fmt_double(alert->per)},
            {"window", std::to_string(alert->window)}});
    } else if (!alert && g.alert_on) {
      g.alert_on = false;
    }
  }
}

void Engine::do_tick(std::int64_t t) {
  medium_.begin_tick(t);
  hop_if_due(t);
  step_agents(t);
  deliver(t);
  run_defenses(t);
}

void Engine::run_ticks(std::int64_t ticks) {
  for (std::int64_t t = 0; t < ticks; ++t) do_tick(t);
}

RunResult Engine::run_all() {
  emit(0, "sim", "start",
       {{"scenario", sc_.name},
        {"seed", std::to_string(seed_)},
        {"duration", std::to_string(sc_.duration)}});
  run_ticks(sc_.duration);
  RunResult result;
  result.metrics = collect_metrics();
  result.trace = std::move(trace_);
  return result;
}

Metrics Engine::collect_metrics() const {
  Metrics m;
  for (const GcsRuntime& g : gcs_) {
    const std::string& name = g.agent.config().name;
    const LinkStats& stats = medium_.stats(name);
    LinkMetrics lm;
    lm.entity = name;
    lm.frames_sent = stats.frames_sent;
    lm.frames_acked = stats.frames_acked;
    lm.pdr = stats.frames_sent == 0
                 ? 1.0
                 : static_cast<double>(stats.frames_acked) /
                       static_cast<double>(stats.frames_sent);
    lm.link_lost_tick = g.agent.link_lost_tick();
    lm.mission_complete = g.agent.mission_complete();
    lm.last_delivered_setpoint = g.agent.last_acked_setpoint();
    m.links.push_back(std::move(lm));
  }
  for (const HijackerRuntime& h : hijackers_) {
    const std::string& name = h.agent.config().name;
    const LinkStats& stats = medium_.stats(name);
    LinkMetrics lm;
    lm.entity = name;
    lm.frames_sent = stats.frames_sent;
    lm.frames_acked = stats.frames_acked;
    lm.pdr = stats.frames_sent == 0
                 ? 1.0
                 : static_cast<double>(stats.frames_acked) /
                       static_cast<double>(stats.frames_sent);
    m.links.push_back(std::move(lm));
  }
  for (const DroneRuntime& d : drones_) {
    DroneMetrics dm;
    dm.entity = d.cfg->name;
    dm.final_status = d.state.status;
    dm.controlling_address = d.state.controlling_address;
    dm.last_setpoint = d.state.last_setpoint;
    dm.last_delivered_setpoint = d.last_delivered_setpoint;
    dm.suspended_tick = d.suspended_tick;
    dm.crashed_tick = d.crashed_tick;
    dm.landed_tick = d.landed_tick;
    dm.hijacked_tick = d.hijacked_tick;
    m.drones.push_back(std::move(dm));
  }
  for (const HijackerRuntime& h : hijackers_) {
    HijackerMetrics hm;
    hm.entity = h.agent.config().name;
    for (int p = 0; p < 4; ++p) {
      hm.phase_tick[p] = h.agent.phase_tick(static_cast<HijackPhase>(p));
    }
    m.hijackers.push_back(std::move(hm));
  }
  m.first_alert_tick = first_alert_tick_;
  return m;
}

}  // namespace

RunResult run(const Scenario& scenario,
              std::optional<std::uint64_t> seed_override) {
  validate_scenario(scenario);
  Engine engine(scenario, seed_override.value_or(scenario.seed));
  return engine.run_all();
}

std::vector<Discovery> run_scan(const Scenario& scenario,
                                const std::vector<Datarate>& rates,
                                int dwell) {
  validate_scenario(scenario);
  if (dwell < 1) raise(ErrorCode::ValidationError, "dwell must be >= 1");
  std::vector<Datarate> unique = rates;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (unique.empty()) raise(ErrorCode::ValidationError, "rates must not be empty");

  Engine engine(scenario, scenario.seed);
  const std::int64_t sweep =
      126 * static_cast<std::int64_t>(unique.size()) * dwell + dwell;
  engine.run_ticks(sweep);
  return scan_all(engine.medium(), unique, dwell);
}

void write_outputs(const RunResult& result,
                   const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(ErrorCode::IoError, out_dir.string() + ": " + ec.message());

  const std::filesystem::path trace_path = out_dir / "trace.tsv";
  std::ofstream trace_out(trace_path);
  if (!trace_out) raise(ErrorCode::IoError, "cannot write " + trace_path.string());
  result.trace.write(trace_out);
  trace_out.flush();
  if (!trace_out) raise(ErrorCode::IoError, "write failed: " + trace_path.string());

  const std::filesystem::path metrics_path = out_dir / "metrics.csv";
  std::ofstream metrics_out(metrics_path);
  if (!metrics_out) raise(ErrorCode::IoError, "cannot write " + metrics_path.string());
  result.metrics.write_csv(metrics_out);
  metrics_out.flush();
  if (!metrics_out) raise(ErrorCode::IoError, "write failed: " + metrics_path.string());
}

}  // namespace crtpsim
