// Program documents: JSON with top-level keys `classes`, `globals`, `entry`
// and statements as tagged records. The full schema lives in
// docs/program-schema.md; fixtures under fixtures/ are the reference inputs.
#pragma once

#include <string>

#include "flexgc/ir.hpp"

namespace flexgc {

// Parses and validates a program document. Throws ValidateError with a
// document location on schema violations, unresolved names or hierarchy
// cycles.
Program parse_program(const std::string& text);
Program parse_program_file(const std::string& path);

std::string program_to_json(const Program& program);

}  // namespace flexgc
