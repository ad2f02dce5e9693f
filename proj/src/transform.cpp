#include "lfir/transform.hpp"

#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "lfir/interp.hpp"
#include "lfir/validate.hpp"
#include "subst.hpp"

namespace lf {
namespace {

Function* entry_function_mut(Module& m) {
    if (Function* f = m.find_function("main"); f && f->defined) return f;
    Function* only = nullptr;
    for (Function& f : m.functions) {
        if (!f.defined) continue;
        if (only) return nullptr;
        only = &f;
    }
    return only;
}

struct SlotInfo {
    std::string bank;
    const Type* type = nullptr;
};

int role_of_bank(const std::string& bank) {
    if (bank.rfind("arg", 0) == 0) return 0;
    if (bank.rfind("tmp", 0) == 0) return 1;
    return 2;
}

}  // namespace

bool restructure_signature(Module& m, Diagnostics& diags) {
    Function* entry = entry_function_mut(m);
    if (!entry) {
        diags.error("no-entry", Location{}, "no entry function to restructure");
        return false;
    }
    if (entry->params.empty()) return true;  // already standalone
    if (!is_three_role(*entry)) {
        Location loc;
        loc.function = entry->name;
        diags.error("roles-unidentifiable", loc,
                    "entry parameters are not the (params, temps, retval) triple");
        return false;
    }

    size_t before_errors = diags.error_count();
    std::vector<RoleSlot> slots = scan_role_slots(*entry, diags);
    if (diags.error_count() > before_errors) return false;

    // (role, slot) -> bank/type, recovered from the scan's naming.
    std::map<std::pair<int, int64_t>, SlotInfo> slot_info;
    for (const RoleSlot& s : slots) {
        int role = role_of_bank(s.bank);
        int64_t index = std::stoll(s.bank.substr(3));
        slot_info[{role, index}] = SlotInfo{s.bank, s.type};
    }

    // Walk the entry and dissolve the argument plumbing. Chase states:
    // Table = pointer into a role's slot table, Cell = untyped buffer
    // address loaded from a slot.
    struct Chase {
        int role = -1;
        int64_t slot = 0;
        bool is_cell = false;
    };
    std::unordered_map<std::string, Chase> chase;
    chase[entry->params[0].name] = Chase{0, 0, false};
    chase[entry->params[1].name] = Chase{1, 0, false};
    chase[entry->params[2].name] = Chase{2, 0, false};

    std::unordered_set<std::string> deleted;        // results of dissolved insts
    std::unordered_map<std::string, Value> alias;   // local -> global value
    std::unordered_map<std::string, std::string> scalar_base;  // local -> bank
    int fresh = 0;

    auto global_value = [&](const SlotInfo& info) {
        return Value::global(info.bank, Types::address(info.type));
    };

    for (Block& b : entry->blocks) {
        std::vector<Instruction> kept;
        for (Instruction& inst : b.insts) {
            const Value* base =
                inst.operands.empty() ? nullptr : &inst.operands[0];
            Chase c;
            bool chased = false;
            if (base && base->kind == Value::Kind::Local) {
                auto it = chase.find(base->name);
                if (it != chase.end()) {
                    c = it->second;
                    chased = true;
                }
            }
            if (chased && !c.is_cell) {
                // Pointer into a slot table.
                if (inst.op == Opcode::Gep) {
                    chase[inst.result] =
                        Chase{c.role, c.slot + inst.operands[1].ival, false};
                    deleted.insert(inst.result);
                    continue;
                }
                if (inst.op == Opcode::Bitcast) {
                    chase[inst.result] = c;
                    deleted.insert(inst.result);
                    continue;
                }
                if (inst.op == Opcode::Load) {
                    deleted.insert(inst.result);
                    if (inst.type->is_address() &&
                        inst.type->elem() == Types::i8()) {
                        chase[inst.result] = Chase{c.role, c.slot, true};
                        continue;
                    }
                    auto info = slot_info.find({c.role, c.slot});
                    if (info != slot_info.end()) {
                        const Type* revealed = inst.type->elem();
                        if (revealed == info->second.type)
                            alias[inst.result] = global_value(info->second);
                        else
                            scalar_base[inst.result] = info->second.bank;
                    }
                    continue;
                }
            } else if (chased && c.is_cell) {
                if (inst.op == Opcode::Bitcast && inst.type->is_address()) {
                    deleted.insert(inst.result);
                    auto info = slot_info.find({c.role, c.slot});
                    if (info != slot_info.end()) {
                        const Type* revealed = inst.type->elem();
                        if (revealed == info->second.type)
                            alias[inst.result] = global_value(info->second);
                        else
                            scalar_base[inst.result] = info->second.bank;
                    }
                    continue;
                }
            }
            // Scalar view of an array bank: fold the bank back into the
            // addressing so the global's array type is used directly.
            if (base && base->kind == Value::Kind::Local &&
                scalar_base.count(base->name)) {
                const std::string& bank = scalar_base[base->name];
                const Type* bank_type = nullptr;
                for (const auto& [key, info] : slot_info)
                    if (info.bank == bank) bank_type = info.type;
                Value gv = Value::global(bank, Types::address(bank_type));
                if (inst.op == Opcode::Gep && inst.operands.size() == 2 &&
                    bank_type->is_array()) {
                    Instruction g2 = inst;
                    g2.operands = {gv, Value::const_int(0, Types::i64()),
                                   inst.operands[1]};
                    g2.pointee = bank_type;
                    kept.push_back(std::move(g2));
                    continue;
                }
                if ((inst.op == Opcode::Load || inst.op == Opcode::Store ||
                     inst.op == Opcode::Gep) &&
                    bank_type->is_array()) {
                    // Address the first element explicitly, then reuse it.
                    Instruction addr;
                    addr.op = Opcode::Gep;
                    addr.result = "rs" + std::to_string(fresh++);
                    addr.type = Types::address(bank_type->elem());
                    addr.pointee = bank_type;
                    addr.inbounds = true;
                    addr.operands = {gv, Value::const_int(0, Types::i64()),
                                     Value::const_int(0, Types::i64())};
                    Value av = Value::local(addr.result, addr.type);
                    kept.push_back(std::move(addr));
                    Instruction fixed = inst;
                    size_t pos = inst.op == Opcode::Store ? 1 : 0;
                    fixed.operands[pos] = av;
                    kept.push_back(std::move(fixed));
                    continue;
                }
            }
            kept.push_back(std::move(inst));
        }
        b.insts = std::move(kept);
    }

    substitute_uses(*entry, alias);

    // Anything still reaching the old arguments or a dissolved local is a
    // pattern we cannot size or rewrite.
    std::unordered_set<std::string> param_names;
    for (const Param& p : entry->params) param_names.insert(p.name);
    bool escaped = false;
    for (const Block& b : entry->blocks)
        for (size_t ii = 0; ii < b.insts.size() && !escaped; ii++)
            for (const Value& v : b.insts[ii].operands) {
                if (v.kind != Value::Kind::Local) continue;
                if (!param_names.count(v.name) && !deleted.count(v.name) &&
                    !scalar_base.count(v.name))
                    continue;
                Location loc;
                loc.function = entry->name;
                loc.block = b.label;
                loc.inst_index = static_cast<int>(ii);
                bool cell = chase.count(v.name) && chase[v.name].is_cell;
                diags.error(cell ? "role-size-unknown" : "role-escape", loc,
                            cell ? "buffer %" + v.name +
                                       " has no sizing bitcast; its extent is"
                                       " unrecoverable"
                                 : "role argument escapes through %" + v.name);
                escaped = true;
                break;
            }
    if (escaped) return false;

    // Materialize the banks: inputs and the output are externally visible,
    // temporaries internal. Keep role-major, slot-minor order.
    std::vector<Global> created;
    std::unordered_set<std::string> inputs, outputs;
    for (int role : {0, 1, 2}) {
        for (const auto& [key, info] : slot_info) {
            if (key.first != role) continue;
            Global g;
            g.name = info.bank;
            g.type = info.type;
            g.init.zero = true;
            g.align = 8;
            g.internal = role == 1;
            created.push_back(std::move(g));
            if (role == 0) inputs.insert(info.bank);
            if (role == 2) outputs.insert(info.bank);
        }
    }
    m.globals.insert(m.globals.end(), created.begin(), created.end());

    // Volatile I/O marking, chasing addresses back to their root bank.
    std::unordered_map<std::string, const Instruction*> defs;
    for (const Block& b : entry->blocks)
        for (const Instruction& inst : b.insts)
            if (inst.has_result()) defs[inst.result] = &inst;
    auto root_of = [&](const Value& v) -> std::string {
        const Value* cur = &v;
        for (int guard = 0; guard < 64; guard++) {
            if (cur->kind == Value::Kind::Global) return cur->name;
            if (cur->kind != Value::Kind::Local) return "";
            auto it = defs.find(cur->name);
            if (it == defs.end()) return "";
            if (it->second->op != Opcode::Gep &&
                it->second->op != Opcode::Bitcast)
                return "";
            cur = &it->second->operands[0];
        }
        return "";
    };
    for (Block& b : entry->blocks)
        for (Instruction& inst : b.insts) {
            if (inst.op == Opcode::Load &&
                inputs.count(root_of(inst.operands[0])))
                inst.is_volatile = true;
            if (inst.op == Opcode::Store &&
                outputs.count(root_of(inst.operands[1])))
                inst.is_volatile = true;
        }

    entry->params.clear();
    renumber_locals(*entry);

    Diagnostics post = validate(m);
    if (post.has_errors()) {
        diags.append(post);
        return false;
    }
    return true;
}

Diagnostics check_legality(const Module& m) {
    Diagnostics diags;
    for (const Global& g : m.globals) {
        if (g.type->has_vector()) {
            Location loc;
            loc.global = g.name;
            diags.error("unsupported-kernel", loc,
                        "vector-typed global @" + g.name);
        }
    }
    for (const Function& f : m.functions) {
        Location floc;
        floc.function = f.name;
        for (const Param& p : f.params)
            if (p.type->has_vector())
                diags.error("unsupported-kernel", floc,
                            "vector-typed parameter %" + p.name);
        if (f.ret && f.ret->has_vector())
            diags.error("unsupported-kernel", floc, "vector return type");
        for (const Block& b : f.blocks) {
            for (size_t ii = 0; ii < b.insts.size(); ii++) {
                const Instruction& inst = b.insts[ii];
                Location loc;
                loc.function = f.name;
                loc.block = b.label;
                loc.inst_index = static_cast<int>(ii);
                bool vec = (inst.type && inst.type->has_vector()) ||
                           (inst.pointee && inst.pointee->has_vector());
                for (const Value& v : inst.operands)
                    if (v.type && v.type->has_vector()) vec = true;
                if (vec) {
                    diags.error("unsupported-kernel", loc,
                                std::string("vector-typed ") +
                                    opcode_name(inst.op) + " instruction");
                    continue;
                }
                if (inst.op == Opcode::Call) {
                    const Function* callee = m.find_function(inst.callee);
                    bool defined = callee && callee->defined;
                    if (!defined && !is_intrinsic(inst.callee))
                        diags.error("unsupported-kernel", loc,
                                    "call to unsupported function @" +
                                        inst.callee);
                }
            }
        }
    }
    return diags;
}

namespace {

using PassFn = std::function<bool(Module&, const PassConfig&, Diagnostics&)>;

const std::map<std::string, PassFn>& pass_registry() {
    static const std::map<std::string, PassFn> registry = {
        {"restructure-signature",
         [](Module& m, const PassConfig&, Diagnostics& d) {
             return restructure_signature(m, d);
         }},
        {"check-legality",
         [](Module& m, const PassConfig&, Diagnostics& d) {
             Diagnostics found = check_legality(m);
             d.append(found);
             return !found.has_errors();
         }},
        {"inline-calls",
         [](Module& m, const PassConfig& cfg, Diagnostics&) {
             inline_calls(m, cfg.inline_threshold);
             return true;
         }},
        {"unroll-loops",
         [](Module& m, const PassConfig& cfg, Diagnostics&) {
             unroll_loops(m, cfg.unroll_threshold);
             return true;
         }},
        {"simplify",
         [](Module& m, const PassConfig&, Diagnostics&) {
             simplify(m);
             return true;
         }},
        // Registered so the denylist mechanism has a real target, but
        // permanently barred: run_pipeline rejects any pipeline naming it.
        {"licm",
         [](Module&, const PassConfig&, Diagnostics&) { return true; }},
    };
    return registry;
}

}  // namespace

std::vector<std::string> registered_passes() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : pass_registry()) names.push_back(name);
    return names;
}

std::optional<Module> run_pipeline(const Module& m, const PassConfig& cfg,
                                   Diagnostics& diags, std::string* log) {
    for (const std::string& name : cfg.pipeline) {
        if (name == "licm") {
            diags.error("denylisted-pass", Location{},
                        "'licm' is permanently denylisted and cannot be"
                        " scheduled");
            return std::nullopt;
        }
        if (!pass_registry().count(name)) {
            diags.error("unknown-pass", Location{},
                        "unknown pass '" + name + "'");
            return std::nullopt;
        }
    }
    Module out = m;
    for (const std::string& name : cfg.pipeline) {
        if (cfg.denylist.count(name)) {
            diags.warning("denylisted-pass", Location{},
                          "skipping denylisted pass '" + name + "'");
            continue;
        }
        size_t before = out.inst_count();
        if (!pass_registry().at(name)(out, cfg, diags)) return std::nullopt;
        if (log)
            *log += "pass=" + name + " before=" + std::to_string(before) +
                    " after=" + std::to_string(out.inst_count()) + "\n";
    }
    return out;
}

}  // namespace lf
