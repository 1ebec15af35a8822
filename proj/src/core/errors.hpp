#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hjbtk {

// Error taxonomy for the toolkit. Structural misuse (dimension mismatch,
// domain violations) and run-level failures (divergence, inapplicable
// identities) are distinct codes so the C API can map them faithfully.
enum class errc {
  dimension_mismatch,
  domain,
  parameter,
  config,
  capability,
  policy_range,
  diverged,
  identity_inapplicable,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

// Trajectory left the sane region (|X| > divergence_bound or non-finite).
class DivergedError : public Error {
 public:
  DivergedError(std::size_t step, const std::string& msg)
      : Error(errc::diverged, msg), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// A feedback/open-loop policy produced a control outside the control set.
class PolicyRangeError : public Error {
 public:
  PolicyRangeError(std::size_t step, const std::string& msg)
      : Error(errc::policy_range, msg), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// An identity (decomposition / verification) hit a non-finite Hamiltonian
// value along the trajectory and does not apply there.
class IdentityInapplicableError : public Error {
 public:
  IdentityInapplicableError(double time, const std::string& msg)
      : Error(errc::identity_inapplicable, msg), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::domain: return "domain";
    case errc::parameter: return "parameter";
    case errc::config: return "config";
    case errc::capability: return "capability";
    case errc::policy_range: return "policy_range";
    case errc::diverged: return "diverged";
    case errc::identity_inapplicable: return "identity_inapplicable";
    case errc::io: return "io";
    case errc::internal: return "internal";
  }
  return "unknown";
}

}  // namespace hjbtk
