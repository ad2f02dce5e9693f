#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lfir/transform.hpp"
#include "subst.hpp"

namespace lf {
namespace {

int64_t wrap_to(const Type* t, int64_t v) {
    if (!t || !t->is_int()) return v;
    if (t->bits() == 1) return v & 1;
    if (t->bits() == 32) return static_cast<int32_t>(static_cast<uint64_t>(v));
    return v;
}

std::optional<int64_t> fold_int(Opcode op, int64_t a, int64_t b,
                                const Type* type) {
    uint64_t ua = static_cast<uint64_t>(a), ub = static_cast<uint64_t>(b);
    switch (op) {
        case Opcode::Add: return wrap_to(type, static_cast<int64_t>(ua + ub));
        case Opcode::Sub: return wrap_to(type, static_cast<int64_t>(ua - ub));
        case Opcode::Mul: return wrap_to(type, static_cast<int64_t>(ua * ub));
        case Opcode::SDiv:
        case Opcode::SRem:
            // Faulting divisions stay for run time to report.
            if (b == 0) return std::nullopt;
            if (a == std::numeric_limits<int64_t>::min() && b == -1)
                return std::nullopt;
            return wrap_to(type, op == Opcode::SDiv ? a / b : a % b);
        default: return std::nullopt;
    }
}

bool fold_icmp(Cmp pred, int64_t a, int64_t b) {
    switch (pred) {
        case Cmp::Eq: return a == b;
        case Cmp::Ne: return a != b;
        case Cmp::Slt: return a < b;
        case Cmp::Sle: return a <= b;
        case Cmp::Sgt: return a > b;
        case Cmp::Sge: return a >= b;
        default: return false;
    }
}

bool fold_fcmp(Cmp pred, float a, float b) {
    bool un = std::isnan(a) || std::isnan(b);
    switch (pred) {
        case Cmp::Oeq: return !un && a == b;
        case Cmp::One: return !un && a != b;
        case Cmp::Olt: return !un && a < b;
        case Cmp::Ole: return !un && a <= b;
        case Cmp::Ogt: return !un && a > b;
        case Cmp::Oge: return !un && a >= b;
        case Cmp::Ueq: return un || a == b;
        case Cmp::Une: return un || a != b;
        case Cmp::Ult: return un || a < b;
        case Cmp::Ule: return un || a <= b;
        case Cmp::Ugt: return un || a > b;
        case Cmp::Uge: return un || a >= b;
        default: return false;
    }
}

// Try to reduce `inst` to a plain value. Handles constant arithmetic,
// decided selects, and redundant phis.
std::optional<Value> fold(const Instruction& inst) {
    auto cint = [](const Value& v) { return v.kind == Value::Kind::ConstInt; };
    auto cflt = [](const Value& v) { return v.kind == Value::Kind::ConstFloat; };
    switch (inst.op) {
        case Opcode::Add:
        case Opcode::Sub:
        case Opcode::Mul:
        case Opcode::SDiv:
        case Opcode::SRem: {
            if (!cint(inst.operands[0]) || !cint(inst.operands[1])) break;
            auto r = fold_int(inst.op, inst.operands[0].ival,
                              inst.operands[1].ival, inst.type);
            if (r) return Value::const_int(*r, inst.type);
            break;
        }
        case Opcode::FAdd:
        case Opcode::FSub:
        case Opcode::FMul:
        case Opcode::FDiv: {
            if (!cflt(inst.operands[0]) || !cflt(inst.operands[1])) break;
            float a = inst.operands[0].fval, b = inst.operands[1].fval, r = 0;
            if (inst.op == Opcode::FAdd) r = a + b;
            else if (inst.op == Opcode::FSub) r = a - b;
            else if (inst.op == Opcode::FMul) r = a * b;
            else r = a / b;
            return Value::const_float(r);
        }
        case Opcode::ICmp:
            if (cint(inst.operands[0]) && cint(inst.operands[1]))
                return Value::const_int(
                    fold_icmp(inst.pred, inst.operands[0].ival,
                              inst.operands[1].ival) ? 1 : 0,
                    Types::i1());
            break;
        case Opcode::FCmp:
            if (cflt(inst.operands[0]) && cflt(inst.operands[1]))
                return Value::const_int(
                    fold_fcmp(inst.pred, inst.operands[0].fval,
                              inst.operands[1].fval) ? 1 : 0,
                    Types::i1());
            break;
        case Opcode::Select:
            if (cint(inst.operands[0]))
                return inst.operands[0].ival ? inst.operands[1]
                                             : inst.operands[2];
            break;
        case Opcode::ZExt: {
            if (!cint(inst.operands[0])) break;
            uint64_t raw = static_cast<uint64_t>(inst.operands[0].ival);
            const Type* from = inst.operands[0].type;
            if (from && from->is_int() && from->bits() == 1) raw &= 1;
            if (from && from->is_int() && from->bits() == 32)
                raw &= 0xFFFFFFFFull;
            return Value::const_int(static_cast<int64_t>(raw), inst.type);
        }
        case Opcode::SExt:
            if (cint(inst.operands[0])) {
                int64_t v = inst.operands[0].ival;
                const Type* from = inst.operands[0].type;
                if (from && from->is_int() && from->bits() == 1)
                    v = (v & 1) ? -1 : 0;
                return Value::const_int(v, inst.type);
            }
            break;
        case Opcode::Trunc:
            if (cint(inst.operands[0]))
                return Value::const_int(
                    wrap_to(inst.type, inst.operands[0].ival), inst.type);
            break;
        case Opcode::SIToFP:
            if (cint(inst.operands[0]))
                return Value::const_float(
                    static_cast<float>(inst.operands[0].ival));
            break;
        case Opcode::FPToSI: {
            if (!cflt(inst.operands[0])) break;
            float v = inst.operands[0].fval;
            if (std::isnan(v) || v >= 9.2233720368547758e18f ||
                v < -9.2233720368547758e18f)
                break;  // run-time fault; keep it
            int64_t r = static_cast<int64_t>(v);
            if (inst.type->bits() == 32 &&
                (r > std::numeric_limits<int32_t>::max() ||
                 r < std::numeric_limits<int32_t>::min()))
                break;
            return Value::const_int(r, inst.type);
        }
        case Opcode::Phi: {
            // A phi whose incomings are all the same value (ignoring
            // references to itself) is that value.
            const Value* uniform = nullptr;
            bool ok = true;
            for (const Value& v : inst.operands) {
                if (v.kind == Value::Kind::Local && v.name == inst.result)
                    continue;
                if (!uniform) uniform = &v;
                else if (!(*uniform == v)) ok = false;
            }
            if (ok && uniform) return *uniform;
            break;
        }
        default: break;
    }
    return std::nullopt;
}

bool is_pure(const Instruction& inst) {
    switch (inst.op) {
        case Opcode::Store:
        case Opcode::Br:
        case Opcode::Ret:
            return false;
        case Opcode::Load:
            return !inst.is_volatile;
        case Opcode::Call:
            return is_intrinsic(inst.callee);
        default:
            return !inst.is_volatile;
    }
}

void prune_phi_edge(Block& b, const std::string& pred_label) {
    for (Instruction& inst : b.insts) {
        if (inst.op != Opcode::Phi) break;
        for (size_t k = 0; k < inst.labels.size(); k++)
            if (inst.labels[k] == pred_label) {
                inst.labels.erase(inst.labels.begin() + static_cast<long>(k));
                inst.operands.erase(inst.operands.begin() +
                                    static_cast<long>(k));
                break;
            }
    }
}

bool simplify_round(Function& f) {
    bool changed = false;

    // 1. Fold constants and redundant phis into a substitution map.
    std::unordered_map<std::string, Value> subst;
    for (Block& b : f.blocks)
        for (Instruction& inst : b.insts) {
            if (!inst.has_result() || inst.is_volatile) continue;
            if (auto v = fold(inst)) subst[inst.result] = *v;
        }
    // Resolve chains (select -> %x while %x -> const). A resolution cycle
    // means mutually-referential dead phis; leave those alone.
    for (auto it = subst.begin(); it != subst.end();) {
        Value v = it->second;
        size_t hops = 0;
        bool cycle = false;
        while (v.kind == Value::Kind::Local) {
            auto next = subst.find(v.name);
            if (next == subst.end()) break;
            if (++hops > subst.size()) { cycle = true; break; }
            v = next->second;
        }
        if (cycle) it = subst.erase(it);
        else { it->second = v; ++it; }
    }
    if (!subst.empty()) {
        changed = true;
        for (Block& b : f.blocks) {
            std::vector<Instruction> kept;
            for (Instruction& inst : b.insts)
                if (!inst.has_result() || !subst.count(inst.result))
                    kept.push_back(std::move(inst));
            b.insts = std::move(kept);
        }
        substitute_uses(f, subst);
    }

    // 2. Decide constant branches; prune the dropped edges.
    for (Block& b : f.blocks) {
        Instruction* term = b.insts.empty() ? nullptr : &b.insts.back();
        if (!term || term->op != Opcode::Br || term->operands.empty()) continue;
        if (term->operands[0].kind != Value::Kind::ConstInt) continue;
        std::string taken = term->operands[0].ival ? term->labels[0]
                                                   : term->labels[1];
        std::string dropped = term->operands[0].ival ? term->labels[1]
                                                     : term->labels[0];
        term->operands.clear();
        term->labels = {taken};
        changed = true;
        if (dropped != taken) {
            if (Block* db = f.find_block(dropped)) prune_phi_edge(*db, b.label);
        }
    }

    // 3. Drop unreachable blocks.
    {
        std::unordered_map<std::string, size_t> index;
        for (size_t i = 0; i < f.blocks.size(); i++)
            index[f.blocks[i].label] = i;
        std::vector<bool> reach(f.blocks.size(), false);
        std::vector<size_t> stack{0};
        reach[0] = true;
        while (!stack.empty()) {
            size_t cur = stack.back();
            stack.pop_back();
            const Instruction* term = f.blocks[cur].terminator();
            if (!term) continue;
            for (const std::string& lbl : term->labels) {
                auto it = index.find(lbl);
                if (it != index.end() && !reach[it->second]) {
                    reach[it->second] = true;
                    stack.push_back(it->second);
                }
            }
        }
        std::vector<std::string> dead_labels;
        for (size_t i = 0; i < f.blocks.size(); i++)
            if (!reach[i]) dead_labels.push_back(f.blocks[i].label);
        if (!dead_labels.empty()) {
            changed = true;
            std::vector<Block> live;
            for (size_t i = 0; i < f.blocks.size(); i++)
                if (reach[i]) live.push_back(std::move(f.blocks[i]));
            f.blocks = std::move(live);
            for (Block& b : f.blocks)
                for (const std::string& dl : dead_labels)
                    prune_phi_edge(b, dl);
        }
    }

    // 4. Merge straight-line block pairs.
    {
        std::unordered_map<std::string, int> pred_count;
        for (const Block& b : f.blocks) {
            const Instruction* term = b.terminator();
            if (!term) continue;
            for (const std::string& lbl : term->labels) pred_count[lbl]++;
        }
        for (size_t i = 0; i < f.blocks.size(); i++) {
            Block& a = f.blocks[i];
            const Instruction* term = a.terminator();
            if (!term || term->op != Opcode::Br || term->labels.size() != 1)
                continue;
            const std::string target = term->labels[0];
            if (target == a.label || pred_count[target] != 1) continue;
            Block* bp = f.find_block(target);
            if (!bp || bp == &a) continue;
            if (!bp->insts.empty() && bp->insts.front().op == Opcode::Phi)
                continue;  // fold the phi first, merge next round
            // Splice b into a.
            a.insts.pop_back();
            for (Instruction& inst : bp->insts) a.insts.push_back(std::move(inst));
            std::string gone = bp->label;
            f.blocks.erase(f.blocks.begin() +
                           (bp - f.blocks.data()));
            // Edges that arrived from `gone` now arrive from `a`.
            for (Block& other : f.blocks)
                for (Instruction& inst : other.insts) {
                    if (inst.op != Opcode::Phi) continue;
                    for (std::string& lbl : inst.labels)
                        if (lbl == gone) lbl = a.label;
                }
            changed = true;
            break;  // indices shifted; next round continues
        }
    }

    // 5. Dead code elimination.
    {
        std::unordered_map<std::string, int> uses;
        for (const Block& b : f.blocks)
            for (const Instruction& inst : b.insts)
                for (const Value& v : inst.operands)
                    if (v.kind == Value::Kind::Local) uses[v.name]++;
        for (Block& b : f.blocks) {
            std::vector<Instruction> kept;
            for (Instruction& inst : b.insts) {
                if (inst.has_result() && uses[inst.result] == 0 &&
                    is_pure(inst)) {
                    changed = true;
                    continue;
                }
                kept.push_back(std::move(inst));
            }
            b.insts = std::move(kept);
        }
    }

    // 6. Annotate constant geps with their flat offsets.
    for (Block& b : f.blocks)
        for (Instruction& inst : b.insts) {
            if (inst.op != Opcode::Gep) continue;
            bool all_const = true;
            for (size_t k = 1; k < inst.operands.size(); k++)
                if (inst.operands[k].kind != Value::Kind::ConstInt)
                    all_const = false;
            if (!all_const) continue;
            int64_t off = 0;
            const Type* cur = inst.pointee;
            for (size_t k = 1; k < inst.operands.size() && cur; k++) {
                if (k == 1) {
                    off += inst.operands[k].ival *
                           static_cast<int64_t>(cur->flat_size());
                } else {
                    if (!cur->is_array()) { cur = nullptr; break; }
                    off += inst.operands[k].ival *
                           static_cast<int64_t>(cur->elem()->flat_size());
                    cur = cur->elem();
                }
            }
            if (!cur && inst.operands.size() > 2) continue;
            if (inst.folded_offset != off) {
                inst.folded_offset = off;
                changed = true;
            }
        }

    return changed;
}

}  // namespace

bool simplify(Module& m) {
    bool changed = false;
    for (Function& f : m.functions) {
        if (!f.defined) continue;
        for (int guard = 0; guard < 100000; guard++) {
            if (!simplify_round(f)) break;
            changed = true;
        }
    }
    return changed;
}

}  // namespace lf
