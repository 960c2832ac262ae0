#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace crtpsim {

// All randomness in the simulator flows through mt19937_64 with the explicit
// mappings below. The standard pins the mt19937_64 output sequence, so traces
// replay bit-identically on any conforming implementation.

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t fnv1a64(std::string_view text);

// Per-entity stream seed: adding an entity never perturbs another's draws.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::string_view entity);

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller (no library distribution: those are not
  // portable across standard library implementations)
  double normal();

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace crtpsim
