#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "crtpsim/sim_engine.hpp"

namespace crtpsim {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, e - b + 1));
}

struct RawEntry {
  std::string value;
  int line = 0;
};

struct RawSection {
  std::string name;
  int line = 0;
  std::map<std::string, RawEntry> entries;
};

[[noreturn]] void parse_fail(const std::string& origin, int line,
                             const std::string& what) {
  raise(ErrorCode::ParseError,
        origin + ":" + std::to_string(line) + ": " + what);
}

std::vector<RawSection> tokenize(std::istream& in, const std::string& origin) {
  std::vector<RawSection> sections;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        parse_fail(origin, line_no, "malformed section header");
      }
      sections.push_back(RawSection{trim(line.substr(1, line.size() - 2)),
                                    line_no,
                                    {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      parse_fail(origin, line_no, "expected key = value");
    }
    if (sections.empty()) {
      parse_fail(origin, line_no, "key outside any [section]");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_fail(origin, line_no, "empty key");
    auto [it, inserted] =
        sections.back().entries.emplace(key, RawEntry{value, line_no});
    (void)it;
    if (!inserted) parse_fail(origin, line_no, "duplicate key '" + key + "'");
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(RawSection section, std::string origin)
      : section_(std::move(section)), origin_(std::move(origin)) {}

  std::optional<RawEntry> take(const std::string& key) {
    auto it = section_.entries.find(key);
    if (it == section_.entries.end()) return std::nullopt;
    RawEntry e = it->second;
    section_.entries.erase(it);
    return e;
  }

  std::string require(const std::string& key) {
    auto e = take(key);
    if (!e) {
      raise(ErrorCode::ValidationError,
            key + ": required in [" + section_.name + "] (" + origin_ + ":" +
                std::to_string(section_.line) + ")");
    }
    return e->value;
  }

  std::int64_t take_int(const std::string& key, std::int64_t def) {
    auto e = take(key);
    if (!e) return def;
    std::int64_t v = 0;
    const std::string& s = e->value;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      parse_fail(origin_, e->line, key + ": expected integer, got '" + s + "'");
    }
    return v;
  }

  double take_double(const std::string& key, double def) {
    auto e = take(key);
    if (!e) return def;
    const char* begin = e->value.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + e->value.size() || e->value.empty()) {
      parse_fail(origin_, e->line,
                 key + ": expected number, got '" + e->value + "'");
    }
    return v;
  }

  bool take_bool(const std::string& key, bool def) {
    auto e = take(key);
    if (!e) return def;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    parse_fail(origin_, e->line,
               key + ": expected true or false, got '" + e->value + "'");
  }

  std::string take_string(const std::string& key, const std::string& def) {
    auto e = take(key);
    return e ? e->value : def;
  }

  int line() const { return section_.line; }
  const std::string& name() const { return section_.name; }

  void done() {
    if (section_.entries.empty()) return;
    const auto& [key, entry] = *section_.entries.begin();
    parse_fail(origin_, entry.line,
               "unknown key '" + key + "' in [" + section_.name + "]");
  }

 private:
  RawSection section_;
  std::string origin_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

FlightMode parse_mode(const std::string& s, const std::string& origin,
                      int line) {
  if (s == "autonomous") return FlightMode::Autonomous;
  if (s == "non_autonomous") return FlightMode::NonAutonomous;
  parse_fail(origin, line, "mode: expected autonomous or non_autonomous");
}

Address default_entity_address(std::uint8_t tag, std::size_t index) {
  return Address{tag, 0x00, 0x00, 0x00, static_cast<std::uint8_t>(index + 1)};
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin) {
  Scenario sc;
  sc.name = origin;
  bool saw_sim = false;
  bool saw_medium = false;
  bool saw_defense = false;

  for (RawSection& raw : tokenize(in, origin)) {
    SectionReader r(std::move(raw), origin);
    if (r.name() == "sim") {
      if (saw_sim) parse_fail(origin, r.line(), "duplicate [sim]");
      saw_sim = true;
      sc.duration = r.take_int("duration", sc.duration);
      sc.tick_rate = static_cast<int>(r.take_int("tick_rate", sc.tick_rate));
      sc.seed = static_cast<std::uint64_t>(r.take_int("seed", 1));
      r.done();
    } else if (r.name() == "medium") {
      if (saw_medium) parse_fail(origin, r.line(), "duplicate [medium]");
      saw_medium = true;
      sc.medium.clear_snr_db = r.take_double("clear_snr_db", sc.medium.clear_snr_db);
      sc.medium.noise_floor_db = r.take_double("noise_floor_db", sc.medium.noise_floor_db);
      sc.medium.theta_low_db = r.take_double("theta_low_db", sc.medium.theta_low_db);
      sc.medium.theta_high_db = r.take_double("theta_high_db", sc.medium.theta_high_db);
      sc.medium.stats_window = static_cast<std::size_t>(
          r.take_int("stats_window", static_cast<std::int64_t>(sc.medium.stats_window)));
      r.done();
    } else if (r.name() == "drone") {
      ScenarioDrone d;
      d.name = r.take_string("name", "drone" + std::to_string(sc.drones.size() + 1));
      d.uri = parse_uri(r.require("uri"));
      d.mode = parse_mode(r.take_string("mode", "non_autonomous"), origin, r.line());
      d.safe_mode = r.take_bool("safe_mode", false);
      d.loss_timeout = static_cast<int>(r.take_int("loss_timeout", d.loss_timeout));
      d.land_duration = static_cast<int>(r.take_int("land_duration", d.land_duration));
      const std::string start = r.take_string("start", "flying");
      if (start == "flying") {
        d.initial_status = DroneStatus::Flying;
      } else if (start == "idle") {
        d.initial_status = DroneStatus::Idle;
      } else {
        parse_fail(origin, r.line(), "start: expected flying or idle");
      }
      r.done();
      sc.roster.emplace_back(AgentKind::Drone, sc.drones.size());
      sc.drones.push_back(std::move(d));
    } else if (r.name() == "gcs") {
      GcsConfig g;
      g.name = r.take_string("name", "gcs" + std::to_string(sc.gcs.size() + 1));
      g.drone = r.require("drone");
      const std::string addr = r.take_string("address", "");
      g.address = addr.empty() ? default_entity_address(0xA0, sc.gcs.size())
                               : parse_address(addr);
      g.command_period = static_cast<int>(r.take_int("command_period", g.command_period));
      g.ack_timeout = static_cast<int>(r.take_int("ack_timeout", g.ack_timeout));
      g.start_tick = r.take_int("start_tick", g.start_tick);
      g.mission_length = static_cast<std::uint64_t>(
          r.take_int("mission_length", static_cast<std::int64_t>(g.mission_length)));
      g.keepalive = r.take_bool("keepalive", g.keepalive);
      r.done();
      sc.roster.emplace_back(AgentKind::Gcs, sc.gcs.size());
      sc.gcs.push_back(std::move(g));
    } else if (r.name() == "jammer") {
      JammerConfig j;
      j.name = r.take_string("name", "jammer" + std::to_string(sc.jammers.size() + 1));
      j.channel = static_cast<int>(r.take_int("channel", j.channel));
      j.start_tick = r.take_int("start_tick", j.start_tick);
      j.stop_tick = r.take_int("stop_tick", j.stop_tick);
      j.amplitude = r.take_double("amplitude", j.amplitude);
      j.rf_gain_db = r.take_double("rf_gain_db", j.rf_gain_db);
      j.if_gain_db = r.take_double("if_gain_db", j.if_gain_db);
      j.bb_gain_db = r.take_double("bb_gain_db", j.bb_gain_db);
      j.cutoff_hz = r.take_double("cutoff_hz", j.cutoff_hz);
      j.transition_hz = r.take_double("transition_hz", j.transition_hz);
      j.sample_rate = r.take_double("sample_rate", j.sample_rate);
      r.done();
      sc.roster.emplace_back(AgentKind::Jammer, sc.jammers.size());
      sc.jammers.push_back(std::move(j));
    } else if (r.name() == "hijacker") {
      HijackerConfig h;
      h.name = r.take_string("name", "hijacker" + std::to_string(sc.hijackers.size() + 1));
      const std::string addr = r.take_string("address", "");
      h.address = addr.empty() ? default_entity_address(0xAD, sc.hijackers.size())
                               : parse_address(addr);
      const std::string rates = r.take_string("rates", "2M");
      h.rates.clear();
      for (const std::string& item : split_list(rates)) {
        h.rates.push_back(parse_datarate(item));
      }
      h.dwell = static_cast<int>(r.take_int("dwell", h.dwell));
      h.start_tick = r.take_int("start_tick", h.start_tick);
      h.ack_timeout = static_cast<int>(r.take_int("ack_timeout", h.ack_timeout));
      h.jam_hold = static_cast<int>(r.take_int("jam_hold", h.jam_hold));
      h.cw_margin_db = r.take_double("cw_margin_db", h.cw_margin_db);
      h.command_period = static_cast<int>(r.take_int("command_period", h.command_period));
      r.done();
      sc.roster.emplace_back(AgentKind::Hijacker, sc.hijackers.size());
      sc.hijackers.push_back(std::move(h));
    } else if (r.name() == "defense") {
      if (saw_defense) parse_fail(origin, r.line(), "duplicate [defense]");
      saw_defense = true;
      const std::string hop = r.take_string("hop_channels", "");
      if (!hop.empty()) {
        std::vector<int> channels;
        for (const std::string& item : split_list(hop)) {
          int ch = 0;
          auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), ch);
          if (ec != std::errc() || p != item.data() + item.size()) {
            parse_fail(origin, r.line(), "hop_channels: bad channel '" + item + "'");
          }
          channels.push_back(ch);
        }
        const int epoch = static_cast<int>(r.take_int("hop_epoch", 25));
        const auto hop_seed = static_cast<std::uint64_t>(r.take_int("hop_seed", 0));
        sc.defense.hopping = HopSchedule::make(std::move(channels), epoch, hop_seed);
      }
      sc.defense.detector = r.take_bool("detector", false);
      sc.defense.detector_window = static_cast<std::size_t>(
          r.take_int("detector_window", static_cast<std::int64_t>(sc.defense.detector_window)));
      sc.defense.detector_threshold =
          r.take_double("detector_threshold", sc.defense.detector_threshold);
      r.done();
    } else {
      parse_fail(origin, r.line(), "unknown section [" + r.name() + "]");
    }
  }

  validate_scenario(sc);
  return sc;
}

void validate_scenario(const Scenario& sc) {
  auto fail = [](const std::string& field, const std::string& what) {
    raise(ErrorCode::ValidationError, field + ": " + what);
  };

  if (sc.duration < 1) fail("duration", "must be >= 1");
  if (sc.tick_rate < 1) fail("tick_rate", "must be >= 1");
  if (sc.medium.theta_low_db >= sc.medium.theta_high_db) {
    fail("theta_low_db", "must be below theta_high_db");
  }
  if (sc.medium.stats_window < 1) fail("stats_window", "must be >= 1");

  std::set<std::string> names;
  auto check_name = [&](const std::string& name) {
    if (name.empty()) fail("name", "must not be empty");
    if (!names.insert(name).second) fail("name", "duplicate entity '" + name + "'");
  };

  std::set<std::string> uris;
  std::set<std::tuple<int, int, Address>> cells;
  for (const ScenarioDrone& d : sc.drones) {
    check_name(d.name);
    if (!uris.insert(format_uri(d.uri)).second) {
      fail("uri", "duplicate " + format_uri(d.uri));
    }
    if (!cells.insert({d.uri.channel, static_cast<int>(d.uri.rate), d.uri.address}).second) {
      fail("uri", "duplicate listener cell " + format_uri(d.uri));
    }
    if (d.loss_timeout < 1) fail("loss_timeout", "must be >= 1");
    if (d.land_duration < 1) fail("land_duration", "must be >= 1");
  }

  std::set<Address> entity_addresses;
  for (const GcsConfig& g : sc.gcs) {
    check_name(g.name);
    bool found = false;
    for (const ScenarioDrone& d : sc.drones) found |= d.name == g.drone;
    if (!found) fail("drone", "gcs '" + g.name + "' references unknown drone '" + g.drone + "'");
    if (g.command_period < 1) fail("command_period", "must be >= 1");
    if (g.ack_timeout < 1) fail("ack_timeout", "must be >= 1");
    if (!entity_addresses.insert(g.address).second) {
      fail("address", "duplicate sender address " + format_address(g.address));
    }
  }

  for (const JammerConfig& j : sc.jammers) {
    check_name(j.name);
    if (j.channel < 0 || j.channel > 125) {
      fail("channel", "jammer '" + j.name + "' channel out of range");
    }
    if (j.amplitude < 0.0) fail("amplitude", "must be >= 0");
    if (j.sample_rate <= 0.0) fail("sample_rate", "must be > 0");
    if (j.cutoff_hz <= 0.0 || j.transition_hz <= 0.0 ||
        j.cutoff_hz + j.transition_hz >= j.sample_rate / 2.0) {
      fail("cutoff_hz", "band must fit below half the sample rate");
    }
  }

  for (const HijackerConfig& h : sc.hijackers) {
    check_name(h.name);
    if (h.rates.empty()) fail("rates", "must list at least one datarate");
    if (h.dwell < 1) fail("dwell", "must be >= 1");
    if (h.ack_timeout < 1) fail("ack_timeout", "must be >= 1");
    if (h.jam_hold < 1) fail("jam_hold", "must be >= 1");
    if (h.command_period < 1) fail("command_period", "must be >= 1");
    if (!entity_addresses.insert(h.address).second) {
      fail("address", "duplicate sender address " + format_address(h.address));
    }
  }

  if (sc.defense.detector) {
    if (sc.defense.detector_window < 1 ||
        sc.defense.detector_window > sc.medium.stats_window) {
      fail("detector_window", "must be within the stats window");
    }
    if (sc.defense.detector_threshold < 0.0 || sc.defense.detector_threshold > 1.0) {
      fail("detector_threshold", "must be in [0, 1]");
    }
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoError, "cannot open " + path.string());
  }
  Scenario sc = parse_scenario(in, path.filename().string());
  std::string stem = path.stem().string();
  if (!stem.empty()) sc.name = stem;
  return sc;
}

}  // namespace crtpsim
