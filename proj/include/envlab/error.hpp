#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace envlab {

enum class ErrorCode {
  unknown_name,
  invalid_parameter,
  improper_density_unsampleable,
  nonpositive_initial_amount,
  event_inconsistent_with_process,
  invalid_interval,
  observation_outside_bounds,
  zero_conditioned_samples,
  malformed_spec,
  unknown_session,
  session_conflict,
  address_in_use,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace envlab
