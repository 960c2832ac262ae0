#include "crtpsim/crtp_codec.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>

namespace crtpsim {

namespace {

void check_fields(const CrtpPacket& p) {
  if (p.port > 15) raise(ErrorCode::FieldOutOfRange, "port " + std::to_string(p.port));
  if (p.link > 3) raise(ErrorCode::FieldOutOfRange, "link " + std::to_string(p.link));
  if (p.channel > 3) raise(ErrorCode::FieldOutOfRange, "channel " + std::to_string(p.channel));
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_packet(const CrtpPacket& p) {
  check_fields(p);
  if (p.payload.size() > kMaxPayload) {
    raise(ErrorCode::PayloadTooLong,
          std::to_string(p.payload.size()) + " bytes");
  }
  std::vector<std::uint8_t> out;
  out.reserve(1 + p.payload.size());
  // port in bits 7-4, link in bits 3-2, channel in bits 1-0
  out.push_back(static_cast<std::uint8_t>((p.port << 4) | (p.link << 2) | p.channel));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

CrtpPacket decode_packet(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) raise(ErrorCode::EmptyFrame, "zero-length frame");
  if (bytes.size() > 1 + kMaxPayload) {
    raise(ErrorCode::PayloadTooLong,
          std::to_string(bytes.size()) + "-byte frame");
  }
  CrtpPacket p;
  p.port = static_cast<std::uint8_t>(bytes[0] >> 4);
  p.link = static_cast<std::uint8_t>((bytes[0] >> 2) & 0x3);
  p.channel = static_cast<std::uint8_t>(bytes[0] & 0x3);
  p.payload.assign(bytes.begin() + 1, bytes.end());
  return p;
}

Address parse_address(std::string_view text) {
  std::string hex;
  hex.reserve(10);
  if (text.size() == 14) {  // XX:XX:XX:XX:XX
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (i % 3 == 2) {
        if (text[i] != ':') raise(ErrorCode::BadAddress, std::string(text));
      } else {
        hex.push_back(text[i]);
      }
    }
  } else {
    hex.assign(text);
  }
  if (hex.size() != 10) raise(ErrorCode::BadAddress, std::string(text));
  Address a{};
  for (std::size_t i = 0; i < 5; ++i) {
    int hi = hex_digit(hex[2 * i]);
    int lo = hex_digit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) raise(ErrorCode::BadAddress, std::string(text));
    a[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return a;
}

std::string format_address(const Address& a) {
  static const char* digits = "0123456789ABCDEF";
  std::string out;
  out.reserve(14);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out.push_back(':');
    out.push_back(digits[a[i] >> 4]);
    out.push_back(digits[a[i] & 0xF]);
  }
  return out;
}

std::string format_address_plain(const Address& a) {
  static const char* digits = "0123456789ABCDEF";
  std::string out;
  out.reserve(10);
  for (std::uint8_t b : a) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

Datarate parse_datarate(std::string_view text) {
  if (text == "250K") return Datarate::K250;
  if (text == "1M") return Datarate::M1;
  if (text == "2M") return Datarate::M2;
  raise(ErrorCode::UnknownDatarate, std::string(text));
}

const char* to_string(Datarate rate) {
  switch (rate) {
    case Datarate::K250: return "250K";
    case Datarate::M1: return "1M";
    case Datarate::M2: return "2M";
  }
  return "?";
}

RadioUri parse_uri(std::string_view text) {
  RadioUri uri;
  std::string_view rest = text;
  if (rest.starts_with("radio://")) {
    uri.medium = MediumKind::Radio;
    rest.remove_prefix(8);
  } else if (rest.starts_with("serial://")) {
    uri.medium = MediumKind::Serial;
    rest.remove_prefix(9);
  } else {
    raise(ErrorCode::MalformedUri, std::string(text));
  }

  std::vector<std::string_view> parts;
  while (true) {
    auto slash = rest.find('/');
    if (slash == std::string_view::npos) {
      parts.push_back(rest);
      break;
    }
    parts.push_back(rest.substr(0, slash));
    rest.remove_prefix(slash + 1);
  }
  if (parts.size() != 4) raise(ErrorCode::MalformedUri, std::string(text));

  auto parse_int = [&](std::string_view s) -> int {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      raise(ErrorCode::MalformedUri, std::string(text));
    }
    return value;
  };

  uri.device = parse_int(parts[0]);
  if (uri.device < 0) raise(ErrorCode::MalformedUri, std::string(text));
  uri.channel = parse_int(parts[1]);
  if (uri.channel < 0 || uri.channel > 125) {
    raise(ErrorCode::ChannelOutOfRange, std::string(parts[1]));
  }
  uri.rate = parse_datarate(parts[2]);
  uri.address = parse_address(parts[3]);
  return uri;
}

std::string format_uri(const RadioUri& uri) {
  std::string out = uri.medium == MediumKind::Radio ? "radio://" : "serial://";
  out += std::to_string(uri.device);
  out += '/';
  out += std::to_string(uri.channel);
  out += '/';
  out += to_string(uri.rate);
  out += '/';
  out += format_address_plain(uri.address);
  return out;
}

CrtpPacket encode_setpoint(const Setpoint& s) {
  CrtpPacket p;
  p.port = kPortCommander;
  p.link = 0;
  p.channel = 0;
  p.payload.reserve(kSetpointWireSize);
  put_u32_le(p.payload, std::bit_cast<std::uint32_t>(s.roll));
  put_u32_le(p.payload, std::bit_cast<std::uint32_t>(s.pitch));
  put_u32_le(p.payload, std::bit_cast<std::uint32_t>(s.yaw));
  p.payload.push_back(static_cast<std::uint8_t>(s.thrust & 0xFF));
  p.payload.push_back(static_cast<std::uint8_t>(s.thrust >> 8));
  return p;
}

Setpoint decode_setpoint(const CrtpPacket& p) {
  if (p.port != kPortCommander) {
    raise(ErrorCode::WrongPort, "port " + std::to_string(p.port));
  }
  if (p.payload.size() != kSetpointWireSize) {
    raise(ErrorCode::BadLength, std::to_string(p.payload.size()) + " bytes");
  }
  Setpoint s;
  s.roll = std::bit_cast<float>(get_u32_le(p.payload.data()));
  s.pitch = std::bit_cast<float>(get_u32_le(p.payload.data() + 4));
  s.yaw = std::bit_cast<float>(get_u32_le(p.payload.data() + 8));
  s.thrust = static_cast<std::uint16_t>(p.payload[12] |
                                        (static_cast<std::uint16_t>(p.payload[13]) << 8));
  return s;
}

}  // namespace crtpsim
