#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crtpsim/agents.hpp"
#include "crtpsim/radio_medium.hpp"

namespace crtpsim {

// Synchronized pseudo-random channel schedule. Both link endpoints compute
// the epoch channel independently from the shared (seed, epoch) key.
struct HopSchedule {
  std::vector<int> hop_set;  // >= 2 distinct channels in [0, 125]
  int epoch_length = 25;     // ticks per epoch
  std::uint64_t seed = 0;

  static HopSchedule make(std::vector<int> hop_set, int epoch_length,
                          std::uint64_t seed);
};

int next_hop_channel(const HopSchedule& schedule, std::uint64_t epoch);

struct JamAlert {
  std::int64_t tick = 0;
  double per = 0.0;  // packet error ratio over the window
  std::size_t window = 0;
};

// Alert iff at least `window` outcomes are recorded and the PER over the
// last `window` of them reaches `threshold`.
std::optional<JamAlert> detect_jamming(const LinkStats& stats,
                                       std::size_t window, double threshold,
                                       std::int64_t tick);

// Failsafe: on link loss a Flying/Suspended drone lands instead of crashing
// or hanging. Identity on every other state.
DroneState safe_mode_policy(DroneState state, bool link_lost,
                            const DroneParams& params);

}  // namespace crtpsim
