#include "crtpsim/defenses.hpp"

#include <algorithm>
#include <set>

#include "crtpsim/rng.hpp"

namespace crtpsim {

HopSchedule HopSchedule::make(std::vector<int> hop_set, int epoch_length,
                              std::uint64_t seed) {
  if (hop_set.size() < 2) {
    raise(ErrorCode::ValidationError, "hop_channels: need at least 2");
  }
  std::set<int> distinct;
  for (int ch : hop_set) {
    if (ch < 0 || ch > 125) {
      raise(ErrorCode::ChannelOutOfRange, std::to_string(ch));
    }
    if (!distinct.insert(ch).second) {
      raise(ErrorCode::ValidationError,
            "hop_channels: duplicate " + std::to_string(ch));
    }
  }
  if (epoch_length < 1) {
    raise(ErrorCode::ValidationError, "hop_epoch must be >= 1");
  }
  HopSchedule s;
  s.hop_set = std::move(hop_set);
  s.epoch_length = epoch_length;
  s.seed = seed;
  return s;
}

int next_hop_channel(const HopSchedule& schedule, std::uint64_t epoch) {
  const std::uint64_t h =
      splitmix64(splitmix64(schedule.seed) ^ splitmix64(epoch + 1));
  return schedule.hop_set[h % schedule.hop_set.size()];
}

std::optional<JamAlert> detect_jamming(const LinkStats& stats,
                                       std::size_t window, double threshold,
                                       std::int64_t tick) {
  if (window == 0 || window > stats.per_window.capacity()) {
    raise(ErrorCode::ValidationError,
          "window exceeds the stats ring capacity");
  }
  if (stats.per_window.size() < window) return std::nullopt;
  const double per =
      static_cast<double>(stats.per_window.losses_in_last(window)) /
      static_cast<double>(window);
  if (per >= threshold) return JamAlert{tick, per, window};
  return std::nullopt;
}

DroneState safe_mode_policy(DroneState state, bool link_lost,
                            const DroneParams& params) {
  (void)params;
  if (!link_lost) return state;
  if (state.status == DroneStatus::Flying ||
      state.status == DroneStatus::Suspended) {
    state.status = DroneStatus::Landing;
    state.landing_ticks = 0;
  }
  return state;
}

}  // namespace crtpsim
