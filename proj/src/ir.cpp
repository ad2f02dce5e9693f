#include "lfir/ir.hpp"

#include <bit>
#include <cctype>
#include <unordered_map>

namespace lf {

const char* opcode_name(Opcode op) {
    switch (op) {
        case Opcode::Gep: return "getelementptr";
        case Opcode::Load: return "load";
        case Opcode::Store: return "store";
        case Opcode::Bitcast: return "bitcast";
        case Opcode::Add: return "add";
        case Opcode::Sub: return "sub";
        case Opcode::Mul: return "mul";
        case Opcode::SDiv: return "sdiv";
        case Opcode::SRem: return "srem";
        case Opcode::FAdd: return "fadd";
        case Opcode::FSub: return "fsub";
        case Opcode::FMul: return "fmul";
        case Opcode::FDiv: return "fdiv";
        case Opcode::ICmp: return "icmp";
        case Opcode::FCmp: return "fcmp";
        case Opcode::Select: return "select";
        case Opcode::Phi: return "phi";
        case Opcode::Br: return "br";
        case Opcode::Ret: return "ret";
        case Opcode::Call: return "call";
        case Opcode::ZExt: return "zext";
        case Opcode::SExt: return "sext";
        case Opcode::Trunc: return "trunc";
        case Opcode::SIToFP: return "sitofp";
        case Opcode::FPToSI: return "fptosi";
    }
    return "?";
}

const char* cmp_name(Cmp c) {
    switch (c) {
        case Cmp::Eq: return "eq";
        case Cmp::Ne: return "ne";
        case Cmp::Slt: return "slt";
        case Cmp::Sle: return "sle";
        case Cmp::Sgt: return "sgt";
        case Cmp::Sge: return "sge";
        case Cmp::Oeq: return "oeq";
        case Cmp::One: return "one";
        case Cmp::Olt: return "olt";
        case Cmp::Ole: return "ole";
        case Cmp::Ogt: return "ogt";
        case Cmp::Oge: return "oge";
        case Cmp::Ueq: return "ueq";
        case Cmp::Une: return "une";
        case Cmp::Ult: return "ult";
        case Cmp::Ule: return "ule";
        case Cmp::Ugt: return "ugt";
        case Cmp::Uge: return "uge";
    }
    return "?";
}

bool is_int_pred(Cmp c) {
    switch (c) {
        case Cmp::Eq: case Cmp::Ne:
        case Cmp::Slt: case Cmp::Sle: case Cmp::Sgt: case Cmp::Sge:
            return true;
        default:
            return false;
    }
}

Value Value::local(std::string n, const Type* t) {
    Value v;
    v.kind = Kind::Local;
    v.name = std::move(n);
    v.type = t;
    return v;
}

Value Value::global(std::string n, const Type* t) {
    Value v;
    v.kind = Kind::Global;
    v.name = std::move(n);
    v.type = t;
    return v;
}

Value Value::const_int(int64_t x, const Type* t) {
    Value v;
    v.kind = Kind::ConstInt;
    v.ival = x;
    v.type = t;
    return v;
}

Value Value::const_float(float x) {
    Value v;
    v.kind = Kind::ConstFloat;
    v.fval = x;
    v.type = Types::f32();
    return v;
}

bool Value::operator==(const Value& o) const {
    if (kind != o.kind || type != o.type) return false;
    switch (kind) {
        case Kind::Local:
        case Kind::Global:
            return name == o.name;
        case Kind::ConstInt:
            return ival == o.ival;
        case Kind::ConstFloat:
            // bit comparison so NaNs and -0.0 compare faithfully
            return std::bit_cast<uint32_t>(fval) == std::bit_cast<uint32_t>(o.fval);
    }
    return false;
}

bool Instruction::operator==(const Instruction& o) const {
    return op == o.op && result == o.result && type == o.type &&
           pointee == o.pointee && operands == o.operands && labels == o.labels &&
           callee == o.callee && pred == o.pred && is_volatile == o.is_volatile &&
           inbounds == o.inbounds && align == o.align;
}

Block* Function::find_block(const std::string& label) {
    for (auto& b : blocks)
        if (b.label == label) return &b;
    return nullptr;
}

const Block* Function::find_block(const std::string& label) const {
    for (const auto& b : blocks)
        if (b.label == label) return &b;
    return nullptr;
}

size_t Function::inst_count() const {
    size_t n = 0;
    for (const auto& b : blocks) n += b.insts.size();
    return n;
}

Function* Module::find_function(const std::string& name) {
    for (auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

const Function* Module::find_function(const std::string& name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

Global* Module::find_global(const std::string& name) {
    for (auto& g : globals)
        if (g.name == name) return &g;
    return nullptr;
}

const Global* Module::find_global(const std::string& name) const {
    for (const auto& g : globals)
        if (g.name == name) return &g;
    return nullptr;
}

const Function* Module::entry_function() const {
    if (const Function* f = find_function("main"); f && f->defined) return f;
    const Function* only = nullptr;
    for (const auto& f : functions) {
        if (!f.defined) continue;
        if (only) return nullptr;  // ambiguous
        only = &f;
    }
    return only;
}

size_t Module::inst_count() const {
    size_t n = 0;
    for (const auto& f : functions) n += f.inst_count();
    return n;
}

bool structurally_equal(const Module& a, const Module& b) {
    return a.globals == b.globals && a.functions == b.functions;
}

namespace {

bool is_numeric_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

void renumber_locals(Function& f) {
    std::unordered_map<std::string, std::string> rename;
    uint64_t next = 0;
    auto fresh = [&](const std::string& old) {
        std::string n = std::to_string(next++);
        rename[old] = n;
        return n;
    };
    for (auto& p : f.params)
        if (is_numeric_name(p.name)) p.name = fresh(p.name);
    for (auto& b : f.blocks) {
        if (is_numeric_name(b.label)) b.label = fresh(b.label);
        for (auto& i : b.insts)
            if (i.has_result() && is_numeric_name(i.result)) i.result = fresh(i.result);
    }
    if (rename.empty()) return;
    auto remap = [&](std::string& name) {
        auto it = rename.find(name);
        if (it != rename.end()) name = it->second;
    };
    for (auto& b : f.blocks) {
        for (auto& i : b.insts) {
            for (auto& v : i.operands)
                if (v.kind == Value::Kind::Local) remap(v.name);
            for (auto& l : i.labels) remap(l);
        }
    }
}

void renumber_locals(Module& m) {
    for (auto& f : m.functions)
        if (f.defined) renumber_locals(f);
}

bool is_intrinsic(const std::string& callee) {
    return callee == "expf" || callee == "tanhf" || callee == "logf" ||
           callee == "maxnum.f32";
}

}  // namespace lf
