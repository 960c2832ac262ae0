#pragma once

#include <optional>
#include <string>
#include <utility>

#include "crtpsim/error.hpp"

namespace crtpsim::test {

template <typename Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::string scenario_path(const std::string& name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
  return std::string(GOLDEN_DIR) + "/" + name;
}

}  // namespace crtpsim::test
