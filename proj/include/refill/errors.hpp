#pragma once

#include <stdexcept>
#include <string>

namespace refill {

enum class Errc {
  malformed_line,
  duplicate_doc,
  duplicate_rank,
  grade_out_of_range,
  duplicate_pair,
  missing_field,
  non_contiguous_turns,
  no_match,
  unmapped_system,
  unknown_system,
  invalid_argument,
  system_set_mismatch,
  key_set_mismatch,
  empty_input,
  missing_depth,
  missing_canonical_response,
  no_judged_pair,
  unparsable_grade,
  backend_unavailable,
  missing_reference,
  missing_passage,
  unknown_query,
  missing_request,
  empty_intersection,
  config_error,
  io_error,
};

const char* errc_name(Errc code);

/// Library failure with a machine-checkable condition code. Callers branch on
/// code() instead of parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace refill
