#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crtpsim/error.hpp"

namespace crtpsim {

inline constexpr std::size_t kMaxPayload = 31;

// Well-known CRTP ports.
inline constexpr std::uint8_t kPortCommander = 3;
inline constexpr std::uint8_t kPortLogging = 5;
inline constexpr std::uint8_t kPortLink = 15;

// One CRTP frame: 1-byte header (port/link/channel) plus up to 31 payload
// bytes. The link field is reserved; the codec carries it verbatim and never
// interprets it.
struct CrtpPacket {
  std::uint8_t port = 0;     // 0..15
  std::uint8_t link = 0;     // 0..3
  std::uint8_t channel = 0;  // 0..3
  std::vector<std::uint8_t> payload;

  bool operator==(const CrtpPacket&) const = default;
};

enum class MediumKind : std::uint8_t { Radio, Serial };
enum class Datarate : std::uint8_t { K250, M1, M2 };

using Address = std::array<std::uint8_t, 5>;

inline constexpr Address kDefaultAddress{0xE7, 0xE7, 0xE7, 0xE7, 0xE7};

// Link endpoint identity: scheme://device/channel/rate/address.
struct RadioUri {
  MediumKind medium = MediumKind::Radio;
  int device = 0;
  int channel = 0;  // 0..125
  Datarate rate = Datarate::M2;
  Address address = kDefaultAddress;

  bool operator==(const RadioUri&) const = default;
};

// Commander frame body. Wire form is exactly 14 bytes, little endian:
// roll, pitch, yaw as 32-bit IEEE-754 floats, then thrust as uint16.
struct Setpoint {
  float roll = 0.0f;   // deg
  float pitch = 0.0f;  // deg
  float yaw = 0.0f;    // deg/s
  std::uint16_t thrust = 0;

  bool operator==(const Setpoint&) const = default;
};

inline constexpr std::size_t kSetpointWireSize = 14;

std::vector<std::uint8_t> encode_packet(const CrtpPacket& p);
CrtpPacket decode_packet(std::span<const std::uint8_t> bytes);

RadioUri parse_uri(std::string_view text);
std::string format_uri(const RadioUri& uri);

CrtpPacket encode_setpoint(const Setpoint& s);
Setpoint decode_setpoint(const CrtpPacket& p);

// Accepts "01E7E7E7E7" and "01:E7:E7:E7:E7", case-insensitive.
Address parse_address(std::string_view text);
std::string format_address(const Address& a);        // colon-separated
std::string format_address_plain(const Address& a);  // 10 hex digits

Datarate parse_datarate(std::string_view text);
const char* to_string(Datarate rate);

}  // namespace crtpsim
