#include "envlab/error.hpp"

namespace envlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_name: return "unknown-name";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::improper_density_unsampleable: return "improper-density-unsampleable";
    case ErrorCode::nonpositive_initial_amount: return "nonpositive-initial-amount";
    case ErrorCode::event_inconsistent_with_process: return "event-inconsistent-with-process";
    case ErrorCode::invalid_interval: return "invalid-interval";
    case ErrorCode::observation_outside_bounds: return "observation-outside-bounds";
    case ErrorCode::zero_conditioned_samples: return "zero-conditioned-samples";
    case ErrorCode::malformed_spec: return "malformed-spec";
    case ErrorCode::unknown_session: return "unknown-session";
    case ErrorCode::session_conflict: return "session-conflict";
    case ErrorCode::address_in_use: return "address-in-use";
  }
  return "unknown-error";
}

}  // namespace envlab
