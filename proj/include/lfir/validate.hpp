#pragma once

#include "lfir/diagnostics.hpp"
#include "lfir/ir.hpp"

namespace lf {

/// Structural and semantic checks: name uniqueness, block/terminator shape,
/// SSA dominance, operand typing, phi/predecessor agreement, call signatures,
/// and constant gep bounds (warning `inbounds-out-of-range`).
/// Errors mean later stages must not consume the module.
Diagnostics validate(const Module& m);

}  // namespace lf
