#pragma once

#include <string>

#include "lfir/ir.hpp"

namespace lf {

/// Textual spelling of memory operations. Legacy writes `load float* %p`;
/// Modern writes `load float, float* %p` (and likewise for getelementptr).
/// Both parse back to the same module; Legacy is the canonical output.
enum class Syntax { Legacy, Modern };

std::string print_module(const Module& m, Syntax syntax = Syntax::Legacy);
std::string print_function(const Function& f, Syntax syntax = Syntax::Legacy);
std::string print_instruction(const Instruction& inst, Syntax syntax = Syntax::Legacy);

/// Operand spelling without its type: `%x`, `@g`, `7`, `true`, `1.500000e+00`.
std::string print_value(const Value& v);

/// A float constant that reparses bit-exactly: short scientific form when
/// that round-trips, otherwise hexadecimal double bits.
std::string float_literal(float f);

}  // namespace lf
