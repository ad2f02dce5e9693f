#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lfir/transform.hpp"
#include "subst.hpp"

namespace lf {
namespace {

// Functions on a call-graph cycle (self-calls included) stay calls.
std::unordered_set<std::string> recursive_functions(const Module& m) {
    std::unordered_map<std::string, std::vector<std::string>> callees;
    for (const Function& f : m.functions) {
        if (!f.defined) continue;
        auto& out = callees[f.name];
        for (const Block& b : f.blocks)
            for (const Instruction& inst : b.insts)
                if (inst.op == Opcode::Call) out.push_back(inst.callee);
    }
    std::unordered_set<std::string> recursive;
    for (const auto& [root, _] : callees) {
        std::vector<std::string> stack = callees[root];
        std::unordered_set<std::string> seen;
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            if (cur == root) {
                recursive.insert(root);
                break;
            }
            if (!seen.insert(cur).second) continue;
            auto it = callees.find(cur);
            if (it != callees.end())
                stack.insert(stack.end(), it->second.begin(), it->second.end());
        }
    }
    return recursive;
}

// Inline the first eligible call site in f. Returns false when none exists.
bool inline_one(Module& m, Function& f,
                const std::unordered_set<std::string>& recursive,
                int64_t threshold, int& counter) {
    for (size_t bi = 0; bi < f.blocks.size(); bi++) {
        Block& b = f.blocks[bi];
        for (size_t ii = 0; ii < b.insts.size(); ii++) {
            const Instruction& call = b.insts[ii];
            if (call.op != Opcode::Call) continue;
            const Function* callee = m.find_function(call.callee);
            if (!callee || !callee->defined) continue;
            if (recursive.count(callee->name)) continue;
            if (static_cast<int64_t>(callee->inst_count()) > threshold) continue;

            std::string tag = ".i" + std::to_string(counter++);
            std::unordered_map<std::string, std::string> names, labels;
            std::unordered_map<std::string, Value> values;
            for (size_t k = 0; k < callee->params.size(); k++)
                values[callee->params[k].name] = call.operands[k];
            for (const Block& cb : callee->blocks) {
                labels[cb.label] = cb.label + tag;
                for (const Instruction& inst : cb.insts)
                    if (inst.has_result()) names[inst.result] = inst.result + tag;
            }

            if (callee->blocks.size() == 1) {
                // Straight splice: callee body minus its ret.
                const Block& cb = callee->blocks[0];
                std::vector<Instruction> spliced;
                Value ret_value;
                bool has_ret_value = false;
                for (const Instruction& inst : cb.insts) {
                    Instruction cloned = clone_inst(inst, names, values, labels);
                    if (cloned.op == Opcode::Ret) {
                        if (!cloned.operands.empty()) {
                            ret_value = cloned.operands[0];
                            has_ret_value = true;
                        }
                        continue;
                    }
                    spliced.push_back(std::move(cloned));
                }
                std::string result = call.result;
                b.insts.erase(b.insts.begin() + static_cast<long>(ii));
                b.insts.insert(b.insts.begin() + static_cast<long>(ii),
                               spliced.begin(), spliced.end());
                if (!result.empty() && has_ret_value)
                    substitute_uses(f, {{result, ret_value}});
                return true;
            }

            // Multi-block callee: split the caller block around the call.
            std::string tail_label = b.label + tag + ".r";
            Block tail;
            tail.label = tail_label;
            tail.insts.assign(b.insts.begin() + static_cast<long>(ii) + 1,
                              b.insts.end());
            std::string result = call.result;
            const Type* result_type = call.type;
            b.insts.erase(b.insts.begin() + static_cast<long>(ii),
                          b.insts.end());

            std::vector<Block> body;
            std::vector<std::pair<Value, std::string>> returns;
            for (const Block& cb : callee->blocks) {
                Block nb;
                nb.label = labels[cb.label];
                for (const Instruction& inst : cb.insts) {
                    Instruction cloned = clone_inst(inst, names, values, labels);
                    if (cloned.op == Opcode::Ret) {
                        if (!cloned.operands.empty())
                            returns.emplace_back(cloned.operands[0], nb.label);
                        else
                            returns.emplace_back(Value{}, nb.label);
                        Instruction br;
                        br.op = Opcode::Br;
                        br.type = Types::void_ty();
                        br.labels = {tail_label};
                        nb.insts.push_back(std::move(br));
                        continue;
                    }
                    nb.insts.push_back(std::move(cloned));
                }
                body.push_back(std::move(nb));
            }

            Instruction enter;
            enter.op = Opcode::Br;
            enter.type = Types::void_ty();
            enter.labels = {labels[callee->blocks[0].label]};
            b.insts.push_back(std::move(enter));

            if (!result.empty()) {
                if (returns.size() == 1) {
                    substitute_uses(f, {{result, returns[0].first}});
                } else {
                    Instruction phi;
                    phi.op = Opcode::Phi;
                    phi.result = result;
                    phi.type = result_type;
                    for (auto& [val, lbl] : returns) {
                        phi.operands.push_back(val);
                        phi.labels.push_back(lbl);
                    }
                    tail.insts.insert(tail.insts.begin(), std::move(phi));
                }
            }

            // Successor phis that named this block as a predecessor are now
            // reached through the tail.
            std::string old_label = b.label;
            for (Block& other : f.blocks)
                for (Instruction& inst : other.insts) {
                    if (inst.op != Opcode::Phi) continue;
                    for (std::string& lbl : inst.labels)
                        if (lbl == old_label) lbl = tail_label;
                }

            auto at = f.blocks.begin() + static_cast<long>(bi) + 1;
            std::vector<Block> insertion = std::move(body);
            insertion.push_back(std::move(tail));
            f.blocks.insert(at, std::make_move_iterator(insertion.begin()),
                            std::make_move_iterator(insertion.end()));
            return true;
        }
    }
    return false;
}

}  // namespace

bool inline_calls(Module& m, int64_t threshold) {
    if (threshold <= 0) return false;
    std::unordered_set<std::string> recursive = recursive_functions(m);
    bool changed = false;
    for (Function& f : m.functions) {
        if (!f.defined) continue;
        int counter = 0;
        for (int guard = 0; guard < 100000; guard++) {
            if (!inline_one(m, f, recursive, threshold, counter)) break;
            changed = true;
        }
    }
    return changed;
}

}  // namespace lf
