#include "crtpsim/error.hpp"

namespace crtpsim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PayloadTooLong: return "PayloadTooLong";
    case ErrorCode::FieldOutOfRange: return "FieldOutOfRange";
    case ErrorCode::EmptyFrame: return "EmptyFrame";
    case ErrorCode::MalformedUri: return "MalformedUri";
    case ErrorCode::ChannelOutOfRange: return "ChannelOutOfRange";
    case ErrorCode::UnknownDatarate: return "UnknownDatarate";
    case ErrorCode::BadAddress: return "BadAddress";
    case ErrorCode::WrongPort: return "WrongPort";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::AliasedFrequency: return "AliasedFrequency";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::BadBand: return "BadBand";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::NotRegistered: return "NotRegistered";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace crtpsim
