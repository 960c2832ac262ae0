#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "crtpsim/crtp_codec.hpp"
#include "crtpsim/error.hpp"

namespace crtpsim {

enum class Role : std::uint8_t { Gcs, Drone, Attacker };
enum class InterfererKind : std::uint8_t { Gaussian, Cw };

const char* to_string(Role role);

struct Transceiver {
  std::string id;
  RadioUri uri;  // tuning; for senders, uri.address is the link target
  double tx_power_db = 0.0;
  Role role = Role::Drone;
  bool listening = false;  // listeners ack frames matching (channel, rate, address)
  Address own_address{};   // sender identity carried on command frames
};

struct ChannelOccupancy {
  int channel = 0;
  double interferer_power = 0.0;  // linear, relative to unit signal power
  bool has_gaussian = false;
  bool has_cw = false;
};

// Ring of the last W delivery outcomes, fixed capacity per scenario.
class DeliveryWindow {
 public:
  explicit DeliveryWindow(std::size_t capacity) : capacity_(capacity) {}

  void push(bool delivered);
  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t losses_in_last(std::size_t window) const;

 private:
  std::size_t capacity_;
  std::deque<bool> ring_;
};

struct LinkStats {
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_acked = 0;
  DeliveryWindow per_window{256};
  double last_snr_db = 0.0;
};

struct MediumParams {
  double clear_snr_db = 30.0;
  double noise_floor_db = -30.0;  // relative to unit signal power
  double theta_low_db = 5.0;      // PDR 0 at or below
  double theta_high_db = 15.0;    // PDR 1 at or above
  std::size_t stats_window = 256;
};

struct DeliveryOutcome {
  bool delivered = false;   // delivered and acked
  std::string receiver;     // empty when no transceiver matched
  double snr_db = 0.0;
};

// 2400 MHz + channel.
double channel_to_frequency_mhz(int channel);

// Piecewise-linear delivery curve: 0 below theta_low, 1 above theta_high.
double pdr_from_snr(double snr_db, const MediumParams& params = {});

// The shared RF medium: registry of transceivers, per-channel interference
// asserted anew each tick, and SNR-gated acknowledged frame delivery.
// Mutated only by the simulation engine; not thread-safe by design.
class RadioMedium {
 public:
  explicit RadioMedium(MediumParams params = {});

  void register_transceiver(const Transceiver& t);
  bool has_transceiver(const std::string& id) const;
  const Transceiver& transceiver(const std::string& id) const;
  std::vector<std::string> transceiver_ids() const;  // registration order

  void retune(const std::string& id, int channel);
  // Point a sender at a new (channel, rate, address) cell.
  void set_link_target(const std::string& id, int channel, Datarate rate,
                       const Address& address);

  void begin_tick(std::int64_t tick);  // clears per-tick interference
  std::int64_t now() const { return now_; }

  // Gaussian interference spills 20 dB down into the +/-1 adjacent
  // channels; CW stays on the exact channel.
  void add_interference(int channel, double power, InterfererKind kind);
  ChannelOccupancy occupancy(int channel) const;

  double link_signal_power(const std::string& id) const;
  double effective_snr(const std::string& from, const std::string& to) const;
  double effective_snr_on(int channel, double tx_power_db) const;

  // Delivered iff a listener matches (channel, rate, to) and
  // rng_draw < pdr_from_snr(effective_snr). The ack mirrors delivery.
  DeliveryOutcome transmit_frame(const std::string& from, const Address& to,
                                 const CrtpPacket& packet, double rng_draw);

  // Listeners tuned to the cell; an idle Crazyflie acks anything addressed
  // to it, which is what makes it discoverable.
  std::vector<Address> probe(int channel, Datarate rate) const;

  std::uint64_t frames_on_cell_since(int channel, Datarate rate,
                                     const Address& to,
                                     std::int64_t since_tick) const;
  std::vector<std::pair<Address, std::uint64_t>> cell_traffic_since(
      int channel, Datarate rate, std::int64_t since_tick) const;
  std::int64_t last_ack_on_cell(int channel, Datarate rate) const;  // -1: never

  const LinkStats& stats(const std::string& id) const;
  const MediumParams& params() const { return params_; }

 private:
  using CellKey = std::tuple<int, int, Address>;  // channel, rate, address

  Transceiver& transceiver_mut(const std::string& id);
  void check_channel(int channel) const;

  MediumParams params_;
  std::int64_t now_ = 0;
  std::vector<std::string> order_;
  std::map<std::string, Transceiver> transceivers_;
  std::map<std::string, LinkStats> stats_;
  std::map<int, ChannelOccupancy> occupancy_;
  std::map<CellKey, std::vector<std::int64_t>> sent_ticks_;
  std::map<std::pair<int, int>, std::int64_t> last_ack_;
};

}  // namespace crtpsim
