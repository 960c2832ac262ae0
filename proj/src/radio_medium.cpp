#include "crtpsim/radio_medium.hpp"

#include <algorithm>
#include <cmath>

namespace crtpsim {

const char* to_string(Role role) {
  switch (role) {
    case Role::Gcs: return "gcs";
    case Role::Drone: return "drone";
    case Role::Attacker: return "attacker";
  }
  return "?";
}

void DeliveryWindow::push(bool delivered) {
  ring_.push_back(delivered);
  if (ring_.size() > capacity_) ring_.pop_front();
}

std::size_t DeliveryWindow::losses_in_last(std::size_t window) const {
  const std::size_t n = std::min(window, ring_.size());
  std::size_t losses = 0;
  for (std::size_t i = ring_.size() - n; i < ring_.size(); ++i) {
    if (!ring_[i]) ++losses;
  }
  return losses;
}

double channel_to_frequency_mhz(int channel) {
  if (channel < 0 || channel > 125) {
    raise(ErrorCode::ChannelOutOfRange, std::to_string(channel));
  }
  return 2400.0 + static_cast<double>(channel);
}

double pdr_from_snr(double snr_db, const MediumParams& params) {
  if (snr_db <= params.theta_low_db) return 0.0;
  if (snr_db >= params.theta_high_db) return 1.0;
  return (snr_db - params.theta_low_db) /
         (params.theta_high_db - params.theta_low_db);
}

RadioMedium::RadioMedium(MediumParams params) : params_(params) {}

void RadioMedium::check_channel(int channel) const {
  if (channel < 0 || channel > 125) {
    raise(ErrorCode::ChannelOutOfRange, std::to_string(channel));
  }
}

void RadioMedium::register_transceiver(const Transceiver& t) {
  check_channel(t.uri.channel);
  if (transceivers_.contains(t.id)) {
    raise(ErrorCode::ValidationError, "duplicate transceiver id " + t.id);
  }
  if (t.listening) {
    for (const auto& [id, other] : transceivers_) {
      if (other.listening && other.uri.channel == t.uri.channel &&
          other.uri.rate == t.uri.rate && other.uri.address == t.uri.address) {
        raise(ErrorCode::ValidationError,
              "uri: listener cell already taken by " + id);
      }
    }
  }
  order_.push_back(t.id);
  transceivers_.emplace(t.id, t);
  stats_.emplace(t.id, LinkStats{0, 0, DeliveryWindow(params_.stats_window), 0.0});
}

bool RadioMedium::has_transceiver(const std::string& id) const {
  return transceivers_.contains(id);
}

const Transceiver& RadioMedium::transceiver(const std::string& id) const {
  auto it = transceivers_.find(id);
  if (it == transceivers_.end()) raise(ErrorCode::NotRegistered, id);
  return it->second;
}

Transceiver& RadioMedium::transceiver_mut(const std::string& id) {
  auto it = transceivers_.find(id);
  if (it == transceivers_.end()) raise(ErrorCode::NotRegistered, id);
  return it->second;
}

std::vector<std::string> RadioMedium::transceiver_ids() const { return order_; }

void RadioMedium::retune(const std::string& id, int channel) {
  check_channel(channel);
  transceiver_mut(id).uri.channel = channel;
}

void RadioMedium::set_link_target(const std::string& id, int channel,
                                  Datarate rate, const Address& address) {
  check_channel(channel);
  Transceiver& t = transceiver_mut(id);
  t.uri.channel = channel;
  t.uri.rate = rate;
  t.uri.address = address;
}

void RadioMedium::begin_tick(std::int64_t tick) {
  now_ = tick;
  occupancy_.clear();
}

void RadioMedium::add_interference(int channel, double power,
                                   InterfererKind kind) {
  check_channel(channel);
  if (power < 0.0) raise(ErrorCode::ValidationError, "negative power");
  auto deposit = [&](int ch, double p) {
    ChannelOccupancy& occ = occupancy_[ch];
    occ.channel = ch;
    occ.interferer_power += p;
    if (kind == InterfererKind::Gaussian) occ.has_gaussian = true;
    if (kind == InterfererKind::Cw) occ.has_cw = true;
  };
  deposit(channel, power);
  if (kind == InterfererKind::Gaussian && power > 0.0) {
    // 10 MHz jam bandwidth reaches the 1 MHz-spaced neighbours, 20 dB down
    if (channel > 0) deposit(channel - 1, power / 100.0);
    if (channel < 125) deposit(channel + 1, power / 100.0);
  }
}

ChannelOccupancy RadioMedium::occupancy(int channel) const {
  check_channel(channel);
  auto it = occupancy_.find(channel);
  if (it == occupancy_.end()) return ChannelOccupancy{channel, 0.0, false, false};
  return it->second;
}

double RadioMedium::link_signal_power(const std::string& id) const {
  const Transceiver& t = transceiver(id);
  return std::pow(10.0, (params_.clear_snr_db + params_.noise_floor_db +
                         t.tx_power_db) / 10.0);
}

double RadioMedium::effective_snr_on(int channel, double tx_power_db) const {
  const double signal =
      std::pow(10.0, (params_.clear_snr_db + params_.noise_floor_db + tx_power_db) / 10.0);
  const double floor = std::pow(10.0, params_.noise_floor_db / 10.0);
  const double interference = occupancy(channel).interferer_power;
  return 10.0 * std::log10(signal / (floor + interference));
}

double RadioMedium::effective_snr(const std::string& from,
                                  const std::string& to) const {
  const Transceiver& tx = transceiver(from);
  const Transceiver& rx = transceiver(to);
  if (tx.uri.channel != rx.uri.channel) {
    raise(ErrorCode::ChannelMismatch,
          std::to_string(tx.uri.channel) + " vs " + std::to_string(rx.uri.channel));
  }
  return effective_snr_on(tx.uri.channel, tx.tx_power_db);
}

DeliveryOutcome RadioMedium::transmit_frame(const std::string& from,
                                            const Address& to,
                                            const CrtpPacket& packet,
                                            double rng_draw) {
  (void)packet;  // carried, not inspected; delivery is SNR-gated
  const Transceiver& sender = transceiver(from);
  const int channel = sender.uri.channel;
  const Datarate rate = sender.uri.rate;

  sent_ticks_[CellKey{channel, static_cast<int>(rate), to}].push_back(now_);

  // unique listener per (channel, rate, address), enforced at registration
  const Transceiver* receiver = nullptr;
  for (const auto& id : order_) {
    const Transceiver& t = transceivers_.at(id);
    if (t.listening && t.uri.channel == channel && t.uri.rate == rate &&
        t.uri.address == to) {
      receiver = &t;
      break;
    }
  }

  DeliveryOutcome outcome;
  outcome.snr_db = effective_snr_on(channel, sender.tx_power_db);

  LinkStats& tx_stats = stats_.at(from);
  tx_stats.frames_sent += 1;
  tx_stats.last_snr_db = outcome.snr_db;

  if (receiver != nullptr) {
    const double pdr = pdr_from_snr(outcome.snr_db, params_);
    outcome.delivered = rng_draw < pdr;
    if (outcome.delivered) {
      outcome.receiver = receiver->id;
      last_ack_[{channel, static_cast<int>(rate)}] = now_;
    }
    LinkStats& rx_stats = stats_.at(receiver->id);
    rx_stats.frames_sent += 1;
    rx_stats.frames_acked += outcome.delivered ? 1 : 0;
    rx_stats.per_window.push(outcome.delivered);
    rx_stats.last_snr_db = outcome.snr_db;
  }

  tx_stats.frames_acked += outcome.delivered ? 1 : 0;
  tx_stats.per_window.push(outcome.delivered);
  return outcome;
}

std::vector<Address> RadioMedium::probe(int channel, Datarate rate) const {
  check_channel(channel);
  std::vector<Address> found;
  for (const auto& id : order_) {
    const Transceiver& t = transceivers_.at(id);
    if (t.listening && t.uri.channel == channel && t.uri.rate == rate) {
      found.push_back(t.uri.address);
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::uint64_t RadioMedium::frames_on_cell_since(int channel, Datarate rate,
                                                const Address& to,
                                                std::int64_t since_tick) const {
  auto it = sent_ticks_.find(CellKey{channel, static_cast<int>(rate), to});
  if (it == sent_ticks_.end()) return 0;
  const auto& ticks = it->second;
  auto lo = std::lower_bound(ticks.begin(), ticks.end(), since_tick);
  return static_cast<std::uint64_t>(ticks.end() - lo);
}

std::vector<std::pair<Address, std::uint64_t>> RadioMedium::cell_traffic_since(
    int channel, Datarate rate, std::int64_t since_tick) const {
  std::vector<std::pair<Address, std::uint64_t>> out;
  for (const auto& [key, ticks] : sent_ticks_) {
    if (std::get<0>(key) != channel || std::get<1>(key) != static_cast<int>(rate)) {
      continue;
    }
    auto lo = std::lower_bound(ticks.begin(), ticks.end(), since_tick);
    const auto n = static_cast<std::uint64_t>(ticks.end() - lo);
    if (n > 0) out.emplace_back(std::get<2>(key), n);
  }
  return out;  // map order: already sorted by address
}

std::int64_t RadioMedium::last_ack_on_cell(int channel, Datarate rate) const {
  auto it = last_ack_.find({channel, static_cast<int>(rate)});
  return it == last_ack_.end() ? -1 : it->second;
}

const LinkStats& RadioMedium::stats(const std::string& id) const {
  auto it = stats_.find(id);
  if (it == stats_.end()) raise(ErrorCode::NotRegistered, id);
  return it->second;
}

}  // namespace crtpsim
