#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfir/type.hpp"

namespace lf {

enum class Opcode {
    Gep, Load, Store, Bitcast,
    Add, Sub, Mul, SDiv, SRem,
    FAdd, FSub, FMul, FDiv,
    ICmp, FCmp, Select, Phi,
    Br, Ret, Call,
    ZExt, SExt, Trunc, SIToFP, FPToSI,
};

const char* opcode_name(Opcode op);

enum class Cmp {
    // integer predicates
    Eq, Ne, Slt, Sle, Sgt, Sge,
    // float predicates (ordered / unordered)
    Oeq, One, Olt, Ole, Ogt, Oge,
    Ueq, Une, Ult, Ule, Ugt, Uge,
};

const char* cmp_name(Cmp c);
bool is_int_pred(Cmp c);

/// An operand: SSA local, global reference, or immediate constant.
/// The type is the syntactic type at the use site.
struct Value {
    enum class Kind { Local, Global, ConstInt, ConstFloat };

    Kind kind = Kind::ConstInt;
    const Type* type = nullptr;
    std::string name;  // local/global name, without %/@ sigil
    int64_t ival = 0;
    float fval = 0.0f;

    static Value local(std::string n, const Type* t);
    static Value global(std::string n, const Type* t);
    static Value const_int(int64_t v, const Type* t);
    static Value const_float(float v);

    bool is_const() const { return kind == Kind::ConstInt || kind == Kind::ConstFloat; }

    bool operator==(const Value& o) const;
};

struct Instruction {
    Opcode op;
    std::string result;       // empty when the instruction produces no value
    const Type* type = nullptr;   // result type (Void for store/br/ret)
    const Type* pointee = nullptr;  // load/store/gep: source element type
    std::vector<Value> operands;
    std::vector<std::string> labels;  // br targets; phi incoming blocks
    std::string callee;               // call target (no @ sigil)
    Cmp pred = Cmp::Eq;
    bool is_volatile = false;
    bool inbounds = false;
    unsigned align = 0;
    // Filled by simplify for geps whose indices are all constant:
    // the row-major scalar offset from the base pointer.
    std::optional<int64_t> folded_offset;

    bool is_terminator() const { return op == Opcode::Br || op == Opcode::Ret; }
    bool has_result() const { return !result.empty(); }

    bool operator==(const Instruction& o) const;
};

struct Block {
    std::string label;
    std::vector<Instruction> insts;

    const Instruction* terminator() const {
        return insts.empty() ? nullptr : &insts.back();
    }
    bool operator==(const Block& o) const = default;
};

struct Param {
    std::string name;
    const Type* type = nullptr;
    bool operator==(const Param& o) const = default;
};

struct Function {
    std::string name;
    const Type* ret = nullptr;
    std::vector<Param> params;
    std::vector<Block> blocks;   // empty for declarations
    bool defined = false;

    const Block* entry() const { return blocks.empty() ? nullptr : &blocks.front(); }
    Block* find_block(const std::string& label);
    const Block* find_block(const std::string& label) const;
    size_t inst_count() const;

    bool operator==(const Function& o) const = default;
};

struct Initializer {
    bool zero = true;
    std::vector<Value> elems;  // row-major scalar constants when !zero
    bool operator==(const Initializer& o) const = default;
};

struct Global {
    std::string name;
    const Type* type = nullptr;
    Initializer init;
    unsigned align = 0;
    bool internal = false;

    bool operator==(const Global& o) const = default;
};

struct Module {
    std::vector<Global> globals;
    std::vector<Function> functions;
    // Ignored residue from parsing (metadata nodes, attribute groups).
    std::vector<std::string> metadata;

    Function* find_function(const std::string& name);
    const Function* find_function(const std::string& name) const;
    Global* find_global(const std::string& name);
    const Global* find_global(const std::string& name) const;

    /// Entry point: @main when present, else the sole defined function.
    const Function* entry_function() const;

    size_t inst_count() const;
};

/// Structural module equality: compares globals and functions field by
/// field (metadata residue is ignored).
bool structurally_equal(const Module& a, const Module& b);

/// Rename purely numeric SSA names and block labels to a dense sequence
/// per function, in definition order, the way the upstream assembler
/// numbers unnamed temporaries. Named values are untouched.
void renumber_locals(Function& f);
void renumber_locals(Module& m);

/// The closed intrinsic set callable without an in-module definition.
bool is_intrinsic(const std::string& callee);

}  // namespace lf
