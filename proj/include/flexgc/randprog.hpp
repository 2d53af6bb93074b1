// Deterministic random program generator. Produces valid programs that
// execute without contract violations by construction: bodies are straight
// line, so the generator can track array sizes and binding states exactly
// while still producing polymorphic call sites, null flows, aliasing and
// array traffic for the analysis and the collector to chew on.
#pragma once

#include <cstdint>

#include "flexgc/ir.hpp"

namespace flexgc {

struct RandProgParams {
  int classes = 5;           // hierarchy size, entry class excluded
  int method_pool = 3;       // distinct dispatchable method names
  int fields_per_class = 2;  // field 0 holds objects only, the rest anything
  int globals = 5;           // cycled through array/object roles
  int body_statements = 10;
  int max_call_args = 2;
};

Program random_program(uint64_t seed, const RandProgParams& params = {});

}  // namespace flexgc
