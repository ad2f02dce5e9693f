#pragma once

// Internal rewrite helpers shared by the transform passes.

#include <string>
#include <unordered_map>

#include "lfir/ir.hpp"

namespace lf {

/// Replace every operand that is a local named in `values` with the mapped
/// value, across the whole function. Phi incoming labels are untouched.
inline void substitute_uses(Function& f,
                            const std::unordered_map<std::string, Value>& values) {
    if (values.empty()) return;
    for (Block& b : f.blocks)
        for (Instruction& inst : b.insts)
            for (Value& v : inst.operands) {
                if (v.kind != Value::Kind::Local) continue;
                auto it = values.find(v.name);
                if (it != values.end()) v = it->second;
            }
}

/// Clone an instruction for splicing into another context: the result (if
/// any) is renamed through `names`, operands are first looked up in
/// `values` (full replacement) and otherwise renamed through `names`, and
/// branch/phi labels are remapped through `labels` when present.
inline Instruction clone_inst(
    const Instruction& inst,
    const std::unordered_map<std::string, std::string>& names,
    const std::unordered_map<std::string, Value>& values,
    const std::unordered_map<std::string, std::string>& labels) {
    Instruction out = inst;
    if (!out.result.empty()) {
        auto it = names.find(out.result);
        if (it != names.end()) out.result = it->second;
    }
    for (Value& v : out.operands) {
        if (v.kind != Value::Kind::Local) continue;
        if (auto it = values.find(v.name); it != values.end()) {
            v = it->second;
        } else if (auto nit = names.find(v.name); nit != names.end()) {
            v.name = nit->second;
        }
    }
    for (std::string& lbl : out.labels) {
        auto it = labels.find(lbl);
        if (it != labels.end()) lbl = it->second;
    }
    return out;
}

}  // namespace lf
