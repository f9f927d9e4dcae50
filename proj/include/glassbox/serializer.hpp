#pragma once

#include "glassbox/spec.hpp"

#include <string>

namespace glassbox {

// Canonical .gbx rendering: deterministic, LF line endings, two-space indent,
// declaration order preserved within each category. Serializing the re-parsed
// output is byte-identical (idempotent canonical form).
std::string serialize_spec(const GlassBoxSpec& spec);

}  // namespace glassbox
