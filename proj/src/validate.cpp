#include "lfir/validate.hpp"

#include <unordered_map>
#include <unordered_set>

#include "lfir/cfg.hpp"

namespace lf {
namespace {

Location inst_loc(const Function& f, const Block& b, int idx) {
    Location loc;
    loc.function = f.name;
    loc.block = b.label;
    loc.inst_index = idx;
    return loc;
}

struct DefSite {
    int block = -1;  // -1 = function parameter
    int inst = -1;
    const Type* type = nullptr;
};

// Expected signature of the closed intrinsic set.
bool intrinsic_signature(const std::string& name, std::vector<const Type*>& params,
                         const Type*& ret) {
    const Type* f = Types::f32();
    if (name == "expf" || name == "tanhf" || name == "logf") {
        params = {f};
        ret = f;
        return true;
    }
    if (name == "maxnum.f32") {
        params = {f, f};
        ret = f;
        return true;
    }
    return false;
}

class FunctionValidator {
public:
    FunctionValidator(const Module& m, const Function& f, Diagnostics& diags)
        : m_(m), f_(f), diags_(diags) {}

    void run() {
        collect_defs();
        if (!shape_ok_) return;  // label/terminator problems make the CFG unusable
        cfg_ = Cfg::build(f_);
        rpo_ = reverse_post_order(cfg_);
        idom_ = immediate_dominators(cfg_, rpo_);
        reachable_.assign(f_.blocks.size(), false);
        for (int b : rpo_) reachable_[b] = true;
        for (size_t bi = 0; bi < f_.blocks.size(); bi++) check_block(static_cast<int>(bi));
    }

private:
    void collect_defs() {
        std::unordered_set<std::string> labels;
        for (const Block& b : f_.blocks) {
            if (!labels.insert(b.label).second) {
                Location loc;
                loc.function = f_.name;
                loc.block = b.label;
                diags_.error("duplicate-label", loc,
                             "duplicate block label %" + b.label);
                shape_ok_ = false;
            }
        }
        for (const Param& p : f_.params) {
            if (defs_.count(p.name)) {
                Location loc;
                loc.function = f_.name;
                diags_.error("duplicate-name", loc,
                             "duplicate parameter %" + p.name);
            }
            defs_[p.name] = DefSite{-1, -1, p.type};
        }
        for (size_t bi = 0; bi < f_.blocks.size(); bi++) {
            const Block& b = f_.blocks[bi];
            if (b.insts.empty() || !b.insts.back().is_terminator()) {
                Location loc;
                loc.function = f_.name;
                loc.block = b.label;
                diags_.error("missing-terminator", loc,
                             "block %" + b.label + " does not end in br/ret");
                shape_ok_ = false;
            }
            bool past_phis = false;
            for (size_t ii = 0; ii < b.insts.size(); ii++) {
                const Instruction& inst = b.insts[ii];
                if (inst.is_terminator() && ii + 1 != b.insts.size()) {
                    diags_.error("misplaced-terminator",
                                 inst_loc(f_, b, static_cast<int>(ii)),
                                 "terminator before end of block");
                    shape_ok_ = false;
                }
                if (inst.op == Opcode::Phi) {
                    if (past_phis)
                        diags_.error("misplaced-phi",
                                     inst_loc(f_, b, static_cast<int>(ii)),
                                     "phi after a non-phi instruction");
                } else {
                    past_phis = true;
                }
                if (inst.has_result()) {
                    if (defs_.count(inst.result)) {
                        diags_.error("duplicate-name",
                                     inst_loc(f_, b, static_cast<int>(ii)),
                                     "duplicate definition of %" + inst.result);
                    }
                    defs_[inst.result] = DefSite{static_cast<int>(bi),
                                                 static_cast<int>(ii), inst.type};
                }
            }
        }
    }

    void check_block(int bi) {
        const Block& b = f_.blocks[bi];
        for (size_t ii = 0; ii < b.insts.size(); ii++) {
            const Instruction& inst = b.insts[ii];
            Location loc = inst_loc(f_, b, static_cast<int>(ii));
            check_operands(inst, bi, static_cast<int>(ii), loc);
            check_types(inst, loc);
            if (inst.op == Opcode::Br) check_branch(inst, loc);
            if (inst.op == Opcode::Phi) check_phi(inst, bi, loc);
            if (inst.op == Opcode::Ret) check_ret(inst, loc);
            if (inst.op == Opcode::Call) check_call(inst, loc);
            if (inst.op == Opcode::Gep) check_gep_bounds(inst, loc);
        }
    }

    void check_operands(const Instruction& inst, int bi, int ii, const Location& loc) {
        for (size_t oi = 0; oi < inst.operands.size(); oi++) {
            const Value& v = inst.operands[oi];
            if (v.kind == Value::Kind::Global) {
                const Global* g = m_.find_global(v.name);
                if (!g) {
                    // A function address used as a value is out of dialect.
                    diags_.error("unknown-global", loc, "unknown global @" + v.name);
                } else if (v.type != Types::address(g->type)) {
                    diags_.error("type-mismatch", loc,
                                 "@" + v.name + " used at type " + v.type->to_string() +
                                     " but declared " +
                                     Types::address(g->type)->to_string());
                }
                continue;
            }
            if (v.kind != Value::Kind::Local) continue;
            auto it = defs_.find(v.name);
            if (it == defs_.end()) {
                diags_.error("unknown-value", loc, "use of undefined %" + v.name);
                continue;
            }
            if (it->second.type && v.type && it->second.type != v.type) {
                diags_.error("type-mismatch", loc,
                             "%" + v.name + " used at type " + v.type->to_string() +
                                 " but defined as " + it->second.type->to_string());
            }
            // Dominance. Phi incoming values are checked against the edge.
            if (!reachable_[bi]) continue;
            const DefSite& d = it->second;
            if (d.block == -1) continue;  // parameters dominate everything
            if (inst.op == Opcode::Phi) {
                int pred = cfg_.block_of(inst.labels[oi]);
                if (pred < 0 || !reachable_[pred]) continue;
                if (d.block != pred && !dominates(idom_, d.block, pred)) {
                    diags_.error("ssa-use-before-def", loc,
                                 "%" + v.name +
                                     " does not dominate phi edge from %" +
                                     inst.labels[oi]);
                }
                continue;
            }
            bool ok;
            if (d.block == bi)
                ok = d.inst < ii;
            else
                ok = reachable_[d.block] && dominates(idom_, d.block, bi);
            if (!ok) {
                diags_.error("ssa-use-before-def", loc,
                             "%" + v.name + " does not dominate this use");
            }
        }
    }

    void check_types(const Instruction& inst, const Location& loc) {
        auto err = [&](const std::string& msg) {
            diags_.error("type-mismatch", loc, msg);
        };
        auto scalar_of = [](const Type* t) {
            return t->is_vector() ? t->elem() : t;
        };
        switch (inst.op) {
            case Opcode::Add:
            case Opcode::Sub:
            case Opcode::Mul:
            case Opcode::SDiv:
            case Opcode::SRem: {
                const Type* t = inst.type;
                if (!scalar_of(t)->is_int()) err("integer op on non-integer type");
                for (const Value& v : inst.operands)
                    if (v.type != t) err("operand type differs from result type");
                break;
            }
            case Opcode::FAdd:
            case Opcode::FSub:
            case Opcode::FMul:
            case Opcode::FDiv: {
                const Type* t = inst.type;
                if (!scalar_of(t)->is_float()) err("float op on non-float type");
                for (const Value& v : inst.operands)
                    if (v.type != t) err("operand type differs from result type");
                break;
            }
            case Opcode::ICmp: {
                if (!is_int_pred(inst.pred)) err("icmp with float predicate");
                const Type* t = inst.operands[0].type;
                if (!scalar_of(t)->is_int() && !t->is_address())
                    err("icmp on non-integer type");
                if (inst.operands[1].type != t) err("icmp operand types differ");
                break;
            }
            case Opcode::FCmp: {
                if (is_int_pred(inst.pred)) err("fcmp with integer predicate");
                const Type* t = inst.operands[0].type;
                if (!scalar_of(t)->is_float()) err("fcmp on non-float type");
                if (inst.operands[1].type != t) err("fcmp operand types differ");
                break;
            }
            case Opcode::Select: {
                if (inst.operands[0].type != Types::i1()) err("select condition must be i1");
                if (inst.operands[1].type != inst.type ||
                    inst.operands[2].type != inst.type)
                    err("select arms must match result type");
                break;
            }
            case Opcode::Load: {
                const Type* p = inst.operands[0].type;
                if (!p->is_address() || p->elem() != inst.type)
                    err("load pointer does not match result type");
                break;
            }
            case Opcode::Store: {
                const Type* p = inst.operands[1].type;
                if (!p->is_address() || p->elem() != inst.operands[0].type)
                    err("store pointer does not match value type");
                break;
            }
            case Opcode::Bitcast: {
                if (!inst.operands[0].type->is_address() || !inst.type->is_address())
                    err("bitcast is address-to-address only");
                break;
            }
            case Opcode::ZExt:
            case Opcode::SExt: {
                const Type* s = inst.operands[0].type;
                if (!s->is_int() || !inst.type->is_int() || s->bits() >= inst.type->bits())
                    err("extension must go to a wider integer");
                break;
            }
            case Opcode::Trunc: {
                const Type* s = inst.operands[0].type;
                if (!s->is_int() || !inst.type->is_int() || s->bits() <= inst.type->bits())
                    err("trunc must go to a narrower integer");
                break;
            }
            case Opcode::SIToFP: {
                if (!inst.operands[0].type->is_int() || !inst.type->is_float())
                    err("sitofp must convert integer to float");
                break;
            }
            case Opcode::FPToSI: {
                if (!inst.operands[0].type->is_float() || !inst.type->is_int())
                    err("fptosi must convert float to integer");
                break;
            }
            case Opcode::Phi: {
                for (const Value& v : inst.operands)
                    if (v.type != inst.type) err("phi incoming type differs");
                break;
            }
            case Opcode::Gep: {
                if (!inst.operands[0].type->is_address())
                    err("getelementptr base must be an address");
                for (size_t i = 1; i < inst.operands.size(); i++)
                    if (!inst.operands[i].type->is_int())
                        err("getelementptr index must be an integer");
                break;
            }
            case Opcode::Br:
                if (!inst.operands.empty() && inst.operands[0].type != Types::i1())
                    err("branch condition must be i1");
                break;
            default:
                break;
        }
        if (inst.is_volatile && inst.op != Opcode::Load && inst.op != Opcode::Store)
            err("volatile applies to load/store only");
    }

    void check_branch(const Instruction& inst, const Location& loc) {
        for (const std::string& lbl : inst.labels) {
            if (cfg_.block_of(lbl) < 0)
                diags_.error("unknown-label", loc, "branch to unknown label %" + lbl);
        }
    }

    void check_phi(const Instruction& inst, int bi, const Location& loc) {
        std::unordered_set<std::string> have;
        for (const std::string& lbl : inst.labels) {
            if (cfg_.block_of(lbl) < 0) {
                diags_.error("unknown-label", loc, "phi incoming from unknown %" + lbl);
                return;
            }
            if (!have.insert(lbl).second) {
                diags_.error("phi-pred-mismatch", loc,
                             "duplicate phi incoming from %" + lbl);
                return;
            }
        }
        std::unordered_set<std::string> preds;
        for (int p : cfg_.preds[bi]) preds.insert(f_.blocks[p].label);
        if (preds != have) {
            diags_.error("phi-pred-mismatch", loc,
                         "phi incoming blocks do not match the predecessors of %" +
                             f_.blocks[bi].label);
        }
    }

    void check_ret(const Instruction& inst, const Location& loc) {
        if (f_.ret->is_void()) {
            if (!inst.operands.empty())
                diags_.error("type-mismatch", loc, "ret with value in void function");
        } else if (inst.operands.empty()) {
            diags_.error("type-mismatch", loc, "ret void in non-void function");
        } else if (inst.operands[0].type != f_.ret) {
            diags_.error("type-mismatch", loc, "ret value type differs from signature");
        }
    }

    void check_call(const Instruction& inst, const Location& loc) {
        std::vector<const Type*> params;
        const Type* ret = nullptr;
        const Function* callee = m_.find_function(inst.callee);
        if (callee) {
            ret = callee->ret;
            for (const Param& p : callee->params) params.push_back(p.type);
        } else if (!intrinsic_signature(inst.callee, params, ret)) {
            diags_.error("unknown-callee", loc, "call to unknown @" + inst.callee);
            return;
        }
        if (inst.type != ret) {
            diags_.error("type-mismatch", loc, "call result type differs from callee");
            return;
        }
        if (inst.operands.size() != params.size()) {
            diags_.error("type-mismatch", loc, "call argument count differs from callee");
            return;
        }
        for (size_t i = 0; i < params.size(); i++) {
            if (params[i] && inst.operands[i].type != params[i])
                diags_.error("type-mismatch", loc,
                             "call argument " + std::to_string(i) + " type differs");
        }
    }

    // Constant indices that step outside the indexed aggregate get a warning;
    // synthesis assumes every inbounds access stays in its bank.
    void check_gep_bounds(const Instruction& inst, const Location& loc) {
        const Type* cur = inst.pointee;
        for (size_t i = 1; i < inst.operands.size(); i++) {
            const Value& idx = inst.operands[i];
            if (i == 1) {
                // Leading index steps over the base pointer itself.
                if (inst.operands[0].kind == Value::Kind::Global &&
                    idx.kind == Value::Kind::ConstInt && idx.ival != 0) {
                    diags_.warning("inbounds-out-of-range", loc,
                                   "leading index " + std::to_string(idx.ival) +
                                       " steps past @" + inst.operands[0].name);
                }
                continue;
            }
            if (!cur->is_array() && !cur->is_vector()) break;
            if (idx.kind == Value::Kind::ConstInt &&
                (idx.ival < 0 || idx.ival >= static_cast<int64_t>(cur->count()))) {
                diags_.warning("inbounds-out-of-range", loc,
                               "index " + std::to_string(idx.ival) + " outside [0, " +
                                   std::to_string(cur->count()) + ")");
            }
            cur = cur->elem();
        }
    }

    const Module& m_;
    const Function& f_;
    Diagnostics& diags_;
    std::unordered_map<std::string, DefSite> defs_;
    bool shape_ok_ = true;
    Cfg cfg_;
    std::vector<int> rpo_;
    std::vector<int> idom_;
    std::vector<bool> reachable_;
};

}  // namespace

Diagnostics validate(const Module& m) {
    Diagnostics diags;
    std::unordered_set<std::string> global_names;
    for (const Global& g : m.globals) {
        Location loc;
        loc.global = g.name;
        if (!global_names.insert(g.name).second)
            diags.error("duplicate-name", loc, "duplicate global @" + g.name);
        if (!g.type || g.type->is_void() || g.type->is_address())
            diags.error("bad-global-type", loc,
                         "globals must have scalar or array type");
        else if (!g.init.zero && g.init.elems.size() != g.type->flat_size())
            diags.error("bad-initializer", loc,
                         "initializer has " + std::to_string(g.init.elems.size()) +
                             " elements, type needs " +
                             std::to_string(g.type->flat_size()));
    }
    std::unordered_set<std::string> fn_names;
    for (const Function& f : m.functions) {
        Location loc;
        loc.function = f.name;
        if (!fn_names.insert(f.name).second)
            diags.error("duplicate-name", loc, "duplicate function @" + f.name);
        if (global_names.count(f.name))
            diags.error("duplicate-name", loc,
                         "@" + f.name + " names both a global and a function");
    }
    for (const Function& f : m.functions) {
        if (!f.defined) continue;
        FunctionValidator fv(m, f, diags);
        fv.run();
    }
    return diags;
}

}  // namespace lf
