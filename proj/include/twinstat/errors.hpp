#pragma once

#include <stdexcept>
#include <string>

namespace twinstat {

/// Error classes used across the library. The numeric value doubles as the
/// CLI exit code (0 = success, 2 = usage error, 3+ = the codes below).
enum class ErrorCode : int {
  InvalidInput = 3,
  InvalidConfig = 4,
  InvalidChannel = 5,
  UnsupportedTopology = 6,
  ExcitationOutOfRange = 7,
  SampleRate = 8,
  FrequencyTooHigh = 9,
  OpenCircuit = 10,
  FrameLength = 11,
  Checksum = 12,
  UnknownOpcode = 13,
  Parse = 14,
  CalibrationFailed = 15,
  Io = 16,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace twinstat
