#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crtpsim/crtp_codec.hpp"
#include "test_util.hpp"

using namespace crtpsim;
using crtpsim::test::error_code_of;

namespace {

CrtpPacket random_packet(std::mt19937_64& rng) {
  CrtpPacket p;
  p.port = static_cast<std::uint8_t>(rng() % 16);
  p.link = static_cast<std::uint8_t>(rng() % 4);
  p.channel = static_cast<std::uint8_t>(rng() % 4);
  p.payload.resize(rng() % 32);
  for (auto& b : p.payload) b = static_cast<std::uint8_t>(rng() % 256);
  return p;
}

RadioUri random_uri(std::mt19937_64& rng) {
  RadioUri u;
  u.medium = rng() % 4 == 0 ? MediumKind::Serial : MediumKind::Radio;
  u.device = static_cast<int>(rng() % 4);
  u.channel = static_cast<int>(rng() % 126);
  u.rate = static_cast<Datarate>(rng() % 3);
  for (auto& b : u.address) b = static_cast<std::uint8_t>(rng() % 256);
  return u;
}

Setpoint random_setpoint(std::mt19937_64& rng) {
  auto f = [&](double lo, double hi) {
    return static_cast<float>(lo + (hi - lo) * static_cast<double>(rng() % 10000) / 10000.0);
  };
  Setpoint s;
  s.roll = f(-180.0, 180.0);
  s.pitch = f(-180.0, 180.0);
  s.yaw = f(-360.0, 360.0);
  s.thrust = static_cast<std::uint16_t>(rng() % 65536);
  return s;
}

}  // namespace

TEST_CASE("encode_packet header layout") {
  CHECK(encode_packet({0, 0, 0, {}}) == std::vector<std::uint8_t>{0x00});

  // logging port 5, link 3, channel 0 -> 0b0101'11'00
  CHECK(encode_packet({5, 3, 0, {0x01}}) ==
        std::vector<std::uint8_t>{0x5C, 0x01});

  Setpoint sp{};
  CrtpPacket commander = encode_setpoint(sp);
  std::vector<std::uint8_t> wire = encode_packet(commander);
  CHECK(wire.size() == 15);
  CHECK(wire[0] == 0x30);  // port 3, link 0, channel 0
}

TEST_CASE("encode_packet rejects bad fields") {
  CrtpPacket p;
  p.payload.assign(32, 0);
  CHECK(error_code_of([&] { encode_packet(p); }) == ErrorCode::PayloadTooLong);

  CHECK(error_code_of([] { encode_packet({16, 0, 0, {}}); }) ==
        ErrorCode::FieldOutOfRange);
  CHECK(error_code_of([] { encode_packet({0, 4, 0, {}}); }) ==
        ErrorCode::FieldOutOfRange);
  CHECK(error_code_of([] { encode_packet({0, 0, 4, {}}); }) ==
        ErrorCode::FieldOutOfRange);
}

TEST_CASE("decode_packet") {
  CrtpPacket p = decode_packet(std::vector<std::uint8_t>{0x00});
  CHECK(p == CrtpPacket{0, 0, 0, {}});

  p = decode_packet(std::vector<std::uint8_t>{0x5C, 0x01});
  CHECK(p.port == 5);
  CHECK(p.link == 3);
  CHECK(p.channel == 0);
  CHECK(p.payload == std::vector<std::uint8_t>{0x01});

  std::vector<std::uint8_t> empty;
  CHECK(error_code_of([&] { decode_packet(empty); }) == ErrorCode::EmptyFrame);

  std::vector<std::uint8_t> oversize(33, 0xAA);
  CHECK(error_code_of([&] { decode_packet(oversize); }) ==
        ErrorCode::PayloadTooLong);
}

TEST_CASE("packet round-trip over 10^4 random packets") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    CrtpPacket p = random_packet(rng);
    CHECK(decode_packet(encode_packet(p)) == p);
  }
}

TEST_CASE("header byte is a bijection") {
  // every (port, link, channel) encodes to a distinct byte and back
  for (int byte = 0; byte < 256; ++byte) {
    CrtpPacket p = decode_packet(std::vector<std::uint8_t>{
        static_cast<std::uint8_t>(byte)});
    CHECK(encode_packet(p)[0] == byte);
  }
}

TEST_CASE("parse_uri accepts the experiment configuration") {
  RadioUri u = parse_uri("radio://0/81/2M/01E7E7E7E7");
  CHECK(u.medium == MediumKind::Radio);
  CHECK(u.device == 0);
  CHECK(u.channel == 81);
  CHECK(u.rate == Datarate::M2);
  CHECK(u.address == Address{0x01, 0xE7, 0xE7, 0xE7, 0xE7});

  RadioUri v = parse_uri("radio://0/0/250K/E7E7E7E7E7");
  CHECK(v.channel == 0);
  CHECK(v.rate == Datarate::K250);
  CHECK(v.address == kDefaultAddress);

  // colon-separated address accepted on input
  CHECK(parse_uri("radio://0/81/2M/01:E7:E7:E7:E7") == u);
}

TEST_CASE("parse_uri rejections") {
  CHECK(error_code_of([] { parse_uri("radio://0/126/2M/E7E7E7E7E7"); }) ==
        ErrorCode::ChannelOutOfRange);
  CHECK(error_code_of([] { parse_uri("radio://0/81/3M/E7E7E7E7E7"); }) ==
        ErrorCode::UnknownDatarate);
  CHECK(error_code_of([] { parse_uri("radio://0/81/2M/E7E7E7E7"); }) ==
        ErrorCode::BadAddress);
  CHECK(error_code_of([] { parse_uri("usb://0/81/2M/E7E7E7E7E7"); }) ==
        ErrorCode::MalformedUri);
  CHECK(error_code_of([] { parse_uri("radio://0/81/2M"); }) ==
        ErrorCode::MalformedUri);
  CHECK(error_code_of([] { parse_uri("radio://0/81/2M/E7E7E7E7E7/9"); }) ==
        ErrorCode::MalformedUri);
}

TEST_CASE("format_uri canonical form") {
  RadioUri u = parse_uri("radio://0/81/2M/01:E7:E7:E7:E7");
  CHECK(format_uri(u) == "radio://0/81/2M/01E7E7E7E7");
  RadioUri v;
  v.channel = 0;
  v.rate = Datarate::K250;
  CHECK(format_uri(v) == "radio://0/0/250K/E7E7E7E7E7");
}

TEST_CASE("uri round-trip over 10^3 random uris") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    RadioUri u = random_uri(rng);
    CHECK(parse_uri(format_uri(u)) == u);
  }
}

TEST_CASE("parse_uri rejects single-character corruptions") {
  const std::string valid = "radio://0/81/2M/01E7E7E7E7";
  REQUIRE_NOTHROW(parse_uri(valid));
  // corrupt each position with a character of the wrong class
  for (std::size_t i = 0; i < valid.size(); ++i) {
    std::string broken = valid;
    broken[i] = broken[i] == 'z' ? '!' : 'z';
    if (broken == valid) continue;
    CHECK(error_code_of([&] { parse_uri(broken); }).has_value());
  }
}

TEST_CASE("setpoint wire form") {
  CrtpPacket zero = encode_setpoint({});
  CHECK(zero.port == 3);
  CHECK(zero.channel == 0);
  CHECK(zero.payload == std::vector<std::uint8_t>(14, 0));

  Setpoint thrusty{};
  thrusty.thrust = 40000;
  CrtpPacket p = encode_setpoint(thrusty);
  REQUIRE(p.payload.size() == 14);
  CHECK(p.payload[12] == 0x40);  // 40000 = 0x9C40 little-endian
  CHECK(p.payload[13] == 0x9C);
  CHECK(decode_setpoint(p).thrust == 40000);
}

TEST_CASE("setpoint round-trip and errors") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    Setpoint s = random_setpoint(rng);
    CrtpPacket p = encode_setpoint(s);
    CHECK(p.payload.size() == 14);
    CHECK(decode_setpoint(p) == s);
  }

  CrtpPacket wrong_port = encode_setpoint({});
  wrong_port.port = 5;
  CHECK(error_code_of([&] { decode_setpoint(wrong_port); }) ==
        ErrorCode::WrongPort);

  CrtpPacket short_payload = encode_setpoint({});
  short_payload.payload.pop_back();
  CHECK(error_code_of([&] { decode_setpoint(short_payload); }) ==
        ErrorCode::BadLength);
}

TEST_CASE("address text forms") {
  Address a{0x01, 0xE7, 0xE7, 0xE7, 0xE7};
  CHECK(format_address(a) == "01:E7:E7:E7:E7");
  CHECK(format_address_plain(a) == "01E7E7E7E7");
  CHECK(parse_address("01:e7:e7:e7:e7") == a);
  CHECK(parse_address("01e7e7e7e7") == a);
  CHECK(error_code_of([] { parse_address("01e7e7e7e"); }) == ErrorCode::BadAddress);
  CHECK(error_code_of([] { parse_address("01e7e7e7eg"); }) == ErrorCode::BadAddress);
}
