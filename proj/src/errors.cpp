#include "refill/errors.hpp"

namespace refill {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::malformed_line: return "malformed_line";
    case Errc::duplicate_doc: return "duplicate_doc";
    case Errc::duplicate_rank: return "duplicate_rank";
    case Errc::grade_out_of_range: return "grade_out_of_range";
    case Errc::duplicate_pair: return "duplicate_pair";
    case Errc::missing_field: return "missing_field";
    case Errc::non_contiguous_turns: return "non_contiguous_turns";
    case Errc::no_match: return "no_match";
    case Errc::unmapped_system: return "unmapped_system";
    case Errc::unknown_system: return "unknown_system";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::system_set_mismatch: return "system_set_mismatch";
    case Errc::key_set_mismatch: return "key_set_mismatch";
    case Errc::empty_input: return "empty_input";
    case Errc::missing_depth: return "missing_depth";
    case Errc::missing_canonical_response: return "missing_canonical_response";
    case Errc::no_judged_pair: return "no_judged_pair";
    case Errc::unparsable_grade: return "unparsable_grade";
    case Errc::backend_unavailable: return "backend_unavailable";
    case Errc::missing_reference: return "missing_reference";
    case Errc::missing_passage: return "missing_passage";
    case Errc::unknown_query: return "unknown_query";
    case Errc::missing_request: return "missing_request";
    case Errc::empty_intersection: return "empty_intersection";
    case Errc::config_error: return "config_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace refill
