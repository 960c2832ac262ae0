#pragma once

#include <stdexcept>
#include <string>

namespace crtpsim {

enum class ErrorCode {
  // codec
  PayloadTooLong,
  FieldOutOfRange,
  EmptyFrame,
  MalformedUri,
  ChannelOutOfRange,
  UnknownDatarate,
  BadAddress,
  WrongPort,
  BadLength,
  // signal
  AliasedFrequency,
  LengthMismatch,
  RateMismatch,
  BadBand,
  TooFewSamples,
  // medium
  ChannelMismatch,
  NotRegistered,
  // scenario / io
  ParseError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace crtpsim
