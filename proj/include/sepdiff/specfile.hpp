#pragma once

#include <string>

#include "sepdiff/diffusion_model.hpp"

namespace sepdiff {

// TOML document with tables [space], [scale], [speed] and a top-level label.
// Throws SpecError (with the origin in the message) on any structural problem
// and SyntaxError/UnknownFunction from density expressions. The result is not
// checked with validate_spec.
DiffusionSpec parse_spec(const std::string& text, const std::string& origin = "<string>");
DiffusionSpec load_spec(const std::string& path);

// Inverse of parse_spec; parse_spec(write_spec(s)) describes the same diffusion.
std::string write_spec(const DiffusionSpec& spec);

}  // namespace sepdiff
