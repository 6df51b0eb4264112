#pragma once

#include <stdexcept>
#include <string>

namespace m2msim {

enum class Errc {
  // configuration validation
  NON_POSITIVE_PERIOD,
  PHASE_GE_PERIOD,
  LT_OUT_OF_RANGE,
  EMPTY_SENSOR_SET,
  NEGATIVE_RATE,
  NON_POSITIVE_VALUE,
  NON_FINITE_VALUE,
  // runtime
  NON_POSITIVE_RATE,
  NEGATIVE_LATENCY,
  MALFORMED_TRACE,
  UNSUPPORTED_POLICY,
  PENDING_RECORD,
  TRACE_TOO_LARGE,
  UNSTABLE_SYSTEM,
  IO_FAILURE,
  PARSE_ERROR,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NON_POSITIVE_PERIOD: return "NON_POSITIVE_PERIOD";
    case Errc::PHASE_GE_PERIOD: return "PHASE_GE_PERIOD";
    case Errc::LT_OUT_OF_RANGE: return "LT_OUT_OF_RANGE";
    case Errc::EMPTY_SENSOR_SET: return "EMPTY_SENSOR_SET";
    case Errc::NEGATIVE_RATE: return "NEGATIVE_RATE";
    case Errc::NON_POSITIVE_VALUE: return "NON_POSITIVE_VALUE";
    case Errc::NON_FINITE_VALUE: return "NON_FINITE_VALUE";
    case Errc::NON_POSITIVE_RATE: return "NON_POSITIVE_RATE";
    case Errc::NEGATIVE_LATENCY: return "NEGATIVE_LATENCY";
    case Errc::MALFORMED_TRACE: return "MALFORMED_TRACE";
    case Errc::UNSUPPORTED_POLICY: return "UNSUPPORTED_POLICY";
    case Errc::PENDING_RECORD: return "PENDING_RECORD";
    case Errc::TRACE_TOO_LARGE: return "TRACE_TOO_LARGE";
    case Errc::UNSTABLE_SYSTEM: return "UNSTABLE_SYSTEM";
    case Errc::IO_FAILURE: return "IO_FAILURE";
    case Errc::PARSE_ERROR: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

class SimError : public std::runtime_error {
 public:
  SimError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace m2msim
