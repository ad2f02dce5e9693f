#include "lfir/printer.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace lf {

std::string float_literal(float f) {
    char buf[64];
    if (std::isfinite(f)) {
        std::snprintf(buf, sizeof(buf), "%.6e", static_cast<double>(f));
        if (static_cast<float>(std::strtod(buf, nullptr)) == f) return buf;
    }
    uint64_t bits = std::bit_cast<uint64_t>(static_cast<double>(f));
    std::snprintf(buf, sizeof(buf), "0x%016llX", static_cast<unsigned long long>(bits));
    return buf;
}

std::string print_value(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Local: return "%" + v.name;
        case Value::Kind::Global: return "@" + v.name;
        case Value::Kind::ConstInt:
            if (v.type == Types::i1()) return v.ival ? "true" : "false";
            return std::to_string(v.ival);
        case Value::Kind::ConstFloat: return float_literal(v.fval);
    }
    return "<bad>";
}

namespace {

std::string typed(const Value& v) { return v.type->to_string() + " " + print_value(v); }

void print_inst(std::ostringstream& os, const Instruction& inst, Syntax syntax) {
    if (inst.has_result()) os << "%" << inst.result << " = ";
    switch (inst.op) {
        case Opcode::Load: {
            os << "load ";
            if (inst.is_volatile) os << "volatile ";
            if (syntax == Syntax::Modern) os << inst.pointee->to_string() << ", ";
            os << inst.pointee->to_string() << "* " << print_value(inst.operands[0]);
            break;
        }
        case Opcode::Store: {
            os << "store ";
            if (inst.is_volatile) os << "volatile ";
            os << typed(inst.operands[0]) << ", " << inst.pointee->to_string() << "* "
               << print_value(inst.operands[1]);
            break;
        }
        case Opcode::Gep: {
            os << "getelementptr ";
            if (inst.inbounds) os << "inbounds ";
            if (syntax == Syntax::Modern) os << inst.pointee->to_string() << ", ";
            os << inst.pointee->to_string() << "* " << print_value(inst.operands[0]);
            for (size_t i = 1; i < inst.operands.size(); i++)
                os << ", " << typed(inst.operands[i]);
            break;
        }
        case Opcode::Bitcast:
        case Opcode::ZExt:
        case Opcode::SExt:
        case Opcode::Trunc:
        case Opcode::SIToFP:
        case Opcode::FPToSI:
            os << opcode_name(inst.op) << " " << typed(inst.operands[0]) << " to "
               << inst.type->to_string();
            break;
        case Opcode::Add:
        case Opcode::Sub:
        case Opcode::Mul:
        case Opcode::SDiv:
        case Opcode::SRem:
        case Opcode::FAdd:
        case Opcode::FSub:
        case Opcode::FMul:
        case Opcode::FDiv:
            os << opcode_name(inst.op) << " " << inst.type->to_string() << " "
               << print_value(inst.operands[0]) << ", " << print_value(inst.operands[1]);
            break;
        case Opcode::ICmp:
        case Opcode::FCmp:
            os << opcode_name(inst.op) << " " << cmp_name(inst.pred) << " "
               << inst.operands[0].type->to_string() << " "
               << print_value(inst.operands[0]) << ", " << print_value(inst.operands[1]);
            break;
        case Opcode::Select:
            os << "select " << typed(inst.operands[0]) << ", " << typed(inst.operands[1])
               << ", " << typed(inst.operands[2]);
            break;
        case Opcode::Phi: {
            os << "phi " << inst.type->to_string();
            for (size_t i = 0; i < inst.operands.size(); i++) {
                os << (i ? ", [ " : " [ ") << print_value(inst.operands[i]) << ", %"
                   << inst.labels[i] << " ]";
            }
            break;
        }
        case Opcode::Br:
            if (inst.operands.empty()) {
                os << "br label %" << inst.labels[0];
            } else {
                os << "br " << typed(inst.operands[0]) << ", label %" << inst.labels[0]
                   << ", label %" << inst.labels[1];
            }
            break;
        case Opcode::Ret:
            if (inst.operands.empty())
                os << "ret void";
            else
                os << "ret " << typed(inst.operands[0]);
            break;
        case Opcode::Call: {
            os << "call " << inst.type->to_string() << " @" << inst.callee << "(";
            for (size_t i = 0; i < inst.operands.size(); i++)
                os << (i ? ", " : "") << typed(inst.operands[i]);
            os << ")";
            break;
        }
    }
    if (inst.align != 0) os << ", align " << inst.align;
}

// Reconstructs the nested bracket form from the row-major scalar list.
void print_init(std::ostringstream& os, const Type* type, const Value* elems,
                uint64_t count) {
    if (type->is_array()) {
        os << "[";
        uint64_t stride = type->elem()->flat_size();
        for (uint64_t i = 0; i < type->count(); i++) {
            if (i) os << ", ";
            os << type->elem()->to_string() << " ";
            print_init(os, type->elem(), elems + i * stride, stride);
        }
        os << "]";
        return;
    }
    (void)count;
    os << print_value(elems[0]);
}

}  // namespace

std::string print_instruction(const Instruction& inst, Syntax syntax) {
    std::ostringstream os;
    print_inst(os, inst, syntax);
    return os.str();
}

std::string print_function(const Function& f, Syntax syntax) {
    std::ostringstream os;
    os << (f.defined ? "define " : "declare ") << f.ret->to_string() << " @" << f.name
       << "(";
    for (size_t i = 0; i < f.params.size(); i++) {
        os << (i ? ", " : "") << f.params[i].type->to_string();
        if (f.defined) os << " %" << f.params[i].name;
    }
    os << ")";
    if (!f.defined) {
        os << "\n";
        return os.str();
    }
    os << " {\n";
    for (size_t bi = 0; bi < f.blocks.size(); bi++) {
        const Block& b = f.blocks[bi];
        if (bi != 0) os << "\n";
        if (bi != 0 || b.label != "entry") os << b.label << ":\n";
        for (const Instruction& inst : b.insts) {
            os << "  ";
            print_inst(os, inst, syntax);
            os << "\n";
        }
    }
    os << "}\n";
    return os.str();
}

std::string print_module(const Module& m, Syntax syntax) {
    std::ostringstream os;
    bool any = false;
    for (const Global& g : m.globals) {
        os << "@" << g.name << " = " << (g.internal ? "internal " : "") << "global "
           << g.type->to_string() << " ";
        if (g.init.zero) {
            os << "zeroinitializer";
        } else if (g.type->is_array()) {
            print_init(os, g.type, g.init.elems.data(), g.init.elems.size());
        } else {
            os << print_value(g.init.elems[0]);
        }
        if (g.align != 0) os << ", align " << g.align;
        os << "\n";
        any = true;
    }
    for (const Function& f : m.functions) {
        if (any) os << "\n";
        os << print_function(f, syntax);
        any = true;
    }
    return os.str();
}

}  // namespace lf
