#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lfir/cfg.hpp"
#include "lfir/transform.hpp"
#include "subst.hpp"

namespace lf {
namespace {

int64_t wrap_to(const Type* t, int64_t v) {
    if (t->is_int() && t->bits() == 32)
        return static_cast<int32_t>(static_cast<uint64_t>(v));
    return v;
}

bool eval_int_cmp(Cmp pred, int64_t a, int64_t b) {
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

struct LoopShape {
    std::vector<int> body;
    int header = -1, latch = -1, preheader = -1;
    std::string exit_label;
    std::string iv_name;               // counted induction phi
    std::string step_name;             // its add/sub result
    const Type* iv_type = nullptr;
    std::vector<int64_t> iv_values;    // value of the IV per iteration
    int64_t trips = 0;
    int64_t body_size = 0;
};

// Identify a fully-analyzable counted loop: one latch that is the only
// exiting block, one outside predecessor, an integer induction phi with
// constant init and step, and a latch condition over {constant, IV, step}.
bool analyze(const Function& f, const Cfg& cfg, const NaturalLoop& loop,
             const std::vector<NaturalLoop>& all, int64_t threshold,
             LoopShape& out) {
    for (const NaturalLoop& other : all)
        if (&other != &loop && other.header == loop.header)
            return false;  // multiple back edges
    out.body = loop.body;
    out.header = loop.header;
    out.latch = loop.latch;

    auto in_body = [&](int b) { return loop.contains(b); };
    for (int b : loop.body) {
        for (int s : cfg.succs[b])
            if (!in_body(s) && b != loop.latch) return false;  // early exit
        out.body_size += static_cast<int64_t>(f.blocks[b].insts.size());
    }
    if (out.body_size <= 0 || out.body_size > threshold) return false;

    // Latch: conditional branch, one target the header, one outside.
    const Instruction* term = f.blocks[loop.latch].terminator();
    if (!term || term->op != Opcode::Br || term->labels.size() != 2) return false;
    int t0 = cfg.block_of(term->labels[0]), t1 = cfg.block_of(term->labels[1]);
    bool header_on_true;
    if (t0 == loop.header && !in_body(t1)) {
        header_on_true = true;
        out.exit_label = term->labels[1];
    } else if (t1 == loop.header && !in_body(t0)) {
        header_on_true = false;
        out.exit_label = term->labels[0];
    } else {
        return false;
    }

    int outside_preds = 0;
    for (int p : cfg.preds[loop.header])
        if (!in_body(p)) {
            outside_preds++;
            out.preheader = p;
        }
    if (outside_preds != 1) return false;

    // Induction phi: integer, constant init, add/sub by constant in-loop.
    const Block& hb = f.blocks[loop.header];
    const std::string pre_label = f.blocks[out.preheader].label;
    const std::string latch_label = f.blocks[loop.latch].label;
    int64_t init = 0, step = 0;
    bool found = false;
    for (const Instruction& inst : hb.insts) {
        if (inst.op != Opcode::Phi) break;
        if (!inst.type->is_int()) continue;
        if (inst.labels.size() != 2) return false;
        int pre_idx = inst.labels[0] == pre_label ? 0 : 1;
        if (inst.labels[pre_idx] != pre_label) continue;
        const Value& init_v = inst.operands[pre_idx];
        const Value& next_v = inst.operands[1 - pre_idx];
        if (inst.labels[1 - pre_idx] != latch_label) continue;
        if (init_v.kind != Value::Kind::ConstInt) continue;
        if (next_v.kind != Value::Kind::Local) continue;
        // Find the defining add/sub.
        for (int b : loop.body) {
            for (const Instruction& d : f.blocks[b].insts) {
                if (d.result != next_v.name) continue;
                if (d.op != Opcode::Add && d.op != Opcode::Sub) continue;
                const Value &x = d.operands[0], &y = d.operands[1];
                if (d.op == Opcode::Add && x.kind == Value::Kind::Local &&
                    x.name == inst.result && y.kind == Value::Kind::ConstInt)
                    step = y.ival;
                else if (d.op == Opcode::Add &&
                         y.kind == Value::Kind::Local &&
                         y.name == inst.result &&
                         x.kind == Value::Kind::ConstInt)
                    step = x.ival;
                else if (d.op == Opcode::Sub && x.kind == Value::Kind::Local &&
                         x.name == inst.result &&
                         y.kind == Value::Kind::ConstInt)
                    step = -y.ival;
                else
                    continue;
                out.iv_name = inst.result;
                out.step_name = next_v.name;
                out.iv_type = inst.type;
                init = init_v.ival;
                found = true;
            }
        }
        if (found) break;
    }
    if (!found || step == 0) return false;

    // Latch condition: icmp over {constant, IV, IV step}.
    if (term->operands.empty() ||
        term->operands[0].kind != Value::Kind::Local)
        return false;
    const Instruction* cond = nullptr;
    for (int b : loop.body)
        for (const Instruction& d : f.blocks[b].insts)
            if (d.result == term->operands[0].name) cond = &d;
    if (!cond || cond->op != Opcode::ICmp) return false;
    for (const Value& v : cond->operands) {
        if (v.kind == Value::Kind::ConstInt) continue;
        if (v.kind == Value::Kind::Local &&
            (v.name == out.iv_name || v.name == out.step_name))
            continue;
        return false;
    }

    // Simulate the exit test.
    int64_t max_trips = threshold / out.body_size + 1;
    if (max_trips > (1 << 20)) max_trips = 1 << 20;
    int64_t iv = init;
    while (true) {
        out.iv_values.push_back(iv);
        out.trips++;
        if (out.trips > max_trips) return false;
        int64_t next = wrap_to(out.iv_type, iv + step);
        auto value_of = [&](const Value& v) {
            if (v.kind == Value::Kind::ConstInt) return v.ival;
            return v.name == out.iv_name ? iv : next;
        };
        bool taken = eval_int_cmp(cond->pred, value_of(cond->operands[0]),
                                  value_of(cond->operands[1]));
        bool back = taken == header_on_true;
        if (!back) break;
        iv = next;
    }
    return out.trips * out.body_size <= threshold;
}

bool unroll_one(Function& f, int64_t threshold) {
    Cfg cfg = Cfg::build(f);
    std::vector<int> rpo = reverse_post_order(cfg);
    std::vector<int> idom = immediate_dominators(cfg, rpo);
    std::vector<NaturalLoop> loops = natural_loops(cfg, idom);
    if (loops.empty()) return false;

    // Innermost first.
    std::vector<const NaturalLoop*> order;
    for (const NaturalLoop& l : loops) order.push_back(&l);
    std::sort(order.begin(), order.end(),
              [](const NaturalLoop* a, const NaturalLoop* b) {
                  return a->depth > b->depth;
              });

    LoopShape shape;
    bool have = false;
    for (const NaturalLoop* l : order) {
        shape = LoopShape{};
        if (analyze(f, cfg, *l, loops, threshold, shape)) {
            have = true;
            break;
        }
    }
    if (!have) return false;
    std::sort(shape.body.begin(), shape.body.end());  // stable layout order

    const std::string header_label = f.blocks[shape.header].label;
    const std::string latch_label = f.blocks[shape.latch].label;
    const std::string pre_label = f.blocks[shape.preheader].label;

    std::unordered_set<std::string> body_labels;
    std::unordered_map<std::string, const Type*> def_types;
    std::vector<std::string> header_phis;
    std::unordered_map<std::string, Value> latch_incoming;  // phi -> next value
    std::unordered_map<std::string, Value> init_incoming;   // phi -> entry value
    for (int b : shape.body) {
        body_labels.insert(f.blocks[b].label);
        for (const Instruction& inst : f.blocks[b].insts)
            if (inst.has_result()) def_types[inst.result] = inst.type;
    }
    for (const Instruction& inst : f.blocks[shape.header].insts) {
        if (inst.op != Opcode::Phi) break;
        header_phis.push_back(inst.result);
        for (size_t k = 0; k < inst.labels.size(); k++) {
            if (inst.labels[k] == pre_label)
                init_incoming[inst.result] = inst.operands[k];
            else
                latch_incoming[inst.result] = inst.operands[k];
        }
    }

    auto suffix = [](const std::string& s, int64_t k) {
        return s + ".u" + std::to_string(k);
    };

    // carry[phi] = the value that phi holds during the current iteration.
    std::unordered_map<std::string, Value> carry;
    for (const std::string& p : header_phis) carry[p] = init_incoming[p];

    std::vector<Block> clones;
    for (int64_t k = 0; k < shape.trips; k++) {
        std::unordered_map<std::string, std::string> names, labels;
        std::unordered_map<std::string, Value> values;
        for (const auto& [name, type] : def_types) names[name] = suffix(name, k);
        for (const std::string& lbl : body_labels) labels[lbl] = suffix(lbl, k);
        for (const std::string& p : header_phis) values[p] = carry[p];
        values[shape.iv_name] =
            Value::const_int(shape.iv_values[k], shape.iv_type);

        for (int b : shape.body) {
            const Block& src = f.blocks[b];
            Block nb;
            nb.label = labels[src.label];
            for (const Instruction& inst : src.insts) {
                if (b == shape.header && inst.op == Opcode::Phi)
                    continue;  // value-substituted
                nb.insts.push_back(clone_inst(inst, names, values, labels));
            }
            if (b == shape.latch) {
                // The exit test is decided: fall through to the next
                // iteration or leave the loop.
                Instruction br;
                br.op = Opcode::Br;
                br.type = Types::void_ty();
                br.labels = {k + 1 < shape.trips ? suffix(header_label, k + 1)
                                                 : shape.exit_label};
                nb.insts.back() = std::move(br);
            }
            clones.push_back(std::move(nb));
        }

        // Advance the phis for the next iteration.
        std::unordered_map<std::string, Value> next_carry;
        for (const std::string& p : header_phis) {
            const Value& v = latch_incoming[p];
            if (v.kind == Value::Kind::Local) {
                if (carry.count(v.name) &&
                    std::find(header_phis.begin(), header_phis.end(), v.name) !=
                        header_phis.end())
                    next_carry[p] = carry[v.name];
                else if (def_types.count(v.name))
                    next_carry[p] =
                        Value::local(names[v.name], def_types[v.name]);
                else
                    next_carry[p] = v;  // defined outside the loop
            } else {
                next_carry[p] = v;
            }
        }
        carry = std::move(next_carry);
        carry[shape.iv_name] = Value::const_int(
            k + 1 < shape.trips
                ? shape.iv_values[k + 1]
                : wrap_to(shape.iv_type,
                          shape.iv_values[k] +
                              (shape.iv_values.size() > 1
                                   ? shape.iv_values[1] - shape.iv_values[0]
                                   : 0)),
            shape.iv_type);
    }

    // Values visible after the loop: non-phi defs resolve to their last
    // clone; header phis to the value they held in the final iteration.
    std::unordered_map<std::string, Value> final_values;
    for (const auto& [name, type] : def_types) {
        if (std::find(header_phis.begin(), header_phis.end(), name) !=
            header_phis.end())
            continue;  // resolved below from the final iteration's carry
        final_values[name] = Value::local(suffix(name, shape.trips - 1), type);
    }
    // A header phi's final value is what it held during the last iteration.
    {
        std::unordered_map<std::string, std::string> last_names;
        for (const auto& [name, type] : def_types)
            last_names[name] = suffix(name, shape.trips - 1);
        std::unordered_map<std::string, Value> last_carry;
        for (const std::string& p : header_phis) last_carry[p] = init_incoming[p];
        for (int64_t k = 0; k + 1 < shape.trips; k++) {
            std::unordered_map<std::string, Value> next;
            for (const std::string& p : header_phis) {
                const Value& v = latch_incoming[p];
                if (v.kind == Value::Kind::Local) {
                    if (std::find(header_phis.begin(), header_phis.end(),
                                  v.name) != header_phis.end())
                        next[p] = last_carry[v.name];
                    else if (def_types.count(v.name))
                        next[p] = Value::local(suffix(v.name, k),
                                               def_types[v.name]);
                    else
                        next[p] = v;
                } else {
                    next[p] = v;
                }
            }
            last_carry = std::move(next);
        }
        for (const std::string& p : header_phis)
            final_values[p] = p == shape.iv_name
                                  ? Value::const_int(
                                        shape.iv_values[shape.trips - 1],
                                        shape.iv_type)
                                  : last_carry[p];
    }

    // Splice: replace the loop blocks with the clones at the header's slot.
    std::unordered_set<int> body_set(shape.body.begin(), shape.body.end());
    std::vector<Block> rebuilt;
    for (int b = 0; b < static_cast<int>(f.blocks.size()); b++) {
        if (b == shape.header) {
            for (Block& nb : clones) rebuilt.push_back(std::move(nb));
            continue;
        }
        if (body_set.count(b)) continue;
        rebuilt.push_back(std::move(f.blocks[b]));
    }
    f.blocks = std::move(rebuilt);

    // Re-aim the rest of the function: branches into the loop go to the
    // first copy, phi edges out of the loop come from the last copy, and
    // loop-defined values resolve to their final incarnation.
    const std::string first_header = suffix(header_label, 0);
    const std::string last_latch = suffix(latch_label, shape.trips - 1);
    std::unordered_set<std::string> clone_labels;
    for (const std::string& lbl : body_labels)
        for (int64_t k = 0; k < shape.trips; k++)
            clone_labels.insert(suffix(lbl, k));
    for (Block& b : f.blocks) {
        for (Instruction& inst : b.insts) {
            if (inst.op == Opcode::Phi) {
                for (std::string& lbl : inst.labels)
                    if (lbl == latch_label) lbl = last_latch;
            } else {
                for (std::string& lbl : inst.labels)
                    if (lbl == header_label) lbl = first_header;
            }
        }
        if (clone_labels.count(b.label)) continue;
        for (Instruction& inst : b.insts)
            for (Value& v : inst.operands) {
                if (v.kind != Value::Kind::Local) continue;
                auto it = final_values.find(v.name);
                if (it != final_values.end()) v = it->second;
            }
    }
    return true;
}

}  // namespace

bool unroll_loops(Module& m, int64_t threshold) {
    if (threshold <= 0) return false;
    bool changed = false;
    for (Function& f : m.functions) {
        if (!f.defined) continue;
        for (int guard = 0; guard < 4096; guard++) {
            if (!unroll_one(f, threshold)) break;
            changed = true;
        }
    }
    return changed;
}

}  // namespace lf
