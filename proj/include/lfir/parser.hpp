#pragma once

#include <optional>
#include <string>

#include "lfir/diagnostics.hpp"
#include "lfir/ir.hpp"

namespace lf {

/// Parse a textual module. Accepts both the legacy spelling
/// (`load float* %p`, `getelementptr [2 x float]* %a, ...`) and the
/// modern spelling (`load float, float* %p`, ...), normalizing to one
/// representation. Unknown function attributes and metadata nodes are
/// dropped with a warning. On success the module has already passed
/// the structural validator.
std::optional<Module> parse_module(const std::string& text, Diagnostics& diags);

}  // namespace lf
