#pragma once
#include <stdexcept>
#include <string>

namespace bfrb {

enum class Errc {
  domain_violation,
  dimension_mismatch,
  empty_samples,
  no_closed_form,
  empty_constraint,
  inadmissible_parameters,
  missing_l,
  empty_interval,
  tau_nonpositive,
  invalid_spec,
  no_trace,
  no_reference_solution,
  oracle_failure,
  config_parse_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::domain_violation: return "DOMAIN_VIOLATION";
    case Errc::dimension_mismatch: return "DIMENSION_MISMATCH";
    case Errc::empty_samples: return "EMPTY_SAMPLES";
    case Errc::no_closed_form: return "NO_CLOSED_FORM";
    case Errc::empty_constraint: return "EMPTY_CONSTRAINT";
    case Errc::inadmissible_parameters: return "INADMISSIBLE_PARAMETERS";
    case Errc::missing_l: return "MISSING_L";
    case Errc::empty_interval: return "EMPTY_INTERVAL";
    case Errc::tau_nonpositive: return "TAU_NONPOSITIVE";
    case Errc::invalid_spec: return "INVALID_SPEC";
    case Errc::no_trace: return "NO_TRACE";
    case Errc::no_reference_solution: return "NO_REFERENCE_SOLUTION";
    case Errc::oracle_failure: return "ORACLE_FAILURE";
    case Errc::config_parse_error: return "CONFIG_PARSE_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace bfrb
