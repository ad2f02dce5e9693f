#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lfir/printer.hpp"
#include "lfir/schedule.hpp"

namespace lf {

OpClass classify(const Instruction& inst) {
    switch (inst.op) {
        case Opcode::Load: return OpClass::Load;
        case Opcode::Store: return OpClass::Store;
        case Opcode::Add:
        case Opcode::Sub:
        case Opcode::ICmp:
        case Opcode::Select: return OpClass::IntAlu;
        case Opcode::Mul: return OpClass::IntMul;
        case Opcode::SDiv:
        case Opcode::SRem: return OpClass::IntDiv;
        case Opcode::FAdd:
        case Opcode::FSub: return OpClass::FAddSub;
        case Opcode::FMul: return OpClass::FMul;
        case Opcode::FDiv: return OpClass::FDiv;
        case Opcode::FCmp: return OpClass::FCmpCls;
        case Opcode::SIToFP:
        case Opcode::FPToSI: return OpClass::FCast;
        case Opcode::Call: return OpClass::CallCls;
        case Opcode::Gep:
        case Opcode::Bitcast:
        case Opcode::Phi:
        case Opcode::ZExt:
        case Opcode::SExt:
        case Opcode::Trunc:
        case Opcode::Br:
        case Opcode::Ret: return OpClass::Wire;
    }
    return OpClass::Wire;
}

const char* opclass_name(OpClass c) {
    switch (c) {
        case OpClass::Load: return "load";
        case OpClass::Store: return "store";
        case OpClass::IntAlu: return "ialu";
        case OpClass::IntMul: return "imul";
        case OpClass::IntDiv: return "idiv";
        case OpClass::FAddSub: return "fadd";
        case OpClass::FMul: return "fmul";
        case OpClass::FDiv: return "fdiv";
        case OpClass::FCmpCls: return "fcmp";
        case OpClass::FCast: return "fcast";
        case OpClass::CallCls: return "call";
        case OpClass::Wire: return "wire";
    }
    return "?";
}

std::optional<OpClass> opclass_by_name(const std::string& name) {
    for (OpClass c : {OpClass::Load, OpClass::Store, OpClass::IntAlu,
                      OpClass::IntMul, OpClass::IntDiv, OpClass::FAddSub,
                      OpClass::FMul, OpClass::FDiv, OpClass::FCmpCls,
                      OpClass::FCast, OpClass::CallCls, OpClass::Wire})
        if (name == opclass_name(c)) return c;
    return std::nullopt;
}

int64_t ResourceModel::latency_of(OpClass c) const {
    auto it = latency.find(c);
    return it == latency.end() ? 0 : it->second;
}

namespace {

bool is_memory(const Instruction& inst) {
    return inst.op == Opcode::Load || inst.op == Opcode::Store;
}

// Root global bank of a memory access, chasing address definitions across
// the whole function. "?" when the root is not a global (e.g. role
// parameters before restructuring): all unknowns share one pseudo-bank,
// which is conservative.
std::string bank_of(const Function& f, const Instruction& access) {
    std::unordered_map<std::string, const Instruction*> defs;
    for (const Block& b : f.blocks)
        for (const Instruction& inst : b.insts)
            if (inst.has_result()) defs[inst.result] = &inst;
    const Value* p = access.op == Opcode::Load ? &access.operands[0]
                                               : &access.operands[1];
    for (int guard = 0; guard < 1024; guard++) {
        if (p->kind == Value::Kind::Global) return p->name;
        if (p->kind != Value::Kind::Local) return "?";
        auto it = defs.find(p->name);
        if (it == defs.end()) return "?";
        const Instruction* d = it->second;
        if (d->op != Opcode::Gep && d->op != Opcode::Bitcast) return "?";
        p = &d->operands[0];
    }
    return "?";
}

}  // namespace

DepGraph build_dfg(const Function& f, const Block& b, const ResourceModel& r) {
    DepGraph g;
    size_t n = b.insts.size();
    if (n && b.insts.back().is_terminator()) n--;
    for (size_t i = 0; i < n; i++) g.nodes.push_back(i);
    g.bank.assign(n, "");
    g.succs.assign(n, {});
    g.pred_count.assign(n, 0);

    std::unordered_map<std::string, size_t> def_node;
    for (size_t i = 0; i < n; i++)
        if (b.insts[i].has_result()) def_node[b.insts[i].result] = i;
    for (size_t i = 0; i < n; i++)
        if (is_memory(b.insts[i])) g.bank[i] = bank_of(f, b.insts[i]);

    std::map<std::pair<size_t, size_t>, int64_t> edges;
    auto add = [&](size_t u, size_t v, int64_t w) {
        auto [it, fresh] = edges.insert({{u, v}, w});
        if (!fresh) it->second = std::max(it->second, w);
    };
    auto lat = [&](size_t u) { return r.latency_of(classify(b.insts[u])); };

    for (size_t v = 0; v < n; v++) {
        const Instruction& inst = b.insts[v];
        if (inst.op != Opcode::Phi)  // phis read their preds' edges, not ours
            for (const Value& op : inst.operands)
                if (op.kind == Value::Kind::Local) {
                    auto it = def_node.find(op.name);
                    if (it != def_node.end() && it->second != v)
                        add(it->second, v, lat(it->second));
                }
    }

    // Same-bank pairs where at least one side writes, in program order.
    for (size_t v = 0; v < n; v++) {
        if (!is_memory(b.insts[v])) continue;
        for (size_t u = 0; u < v; u++) {
            if (!is_memory(b.insts[u]) || g.bank[u] != g.bank[v]) continue;
            if (b.insts[u].op == Opcode::Store ||
                b.insts[v].op == Opcode::Store)
                add(u, v, lat(u));
        }
    }

    // Volatile accesses to one bank keep program order (same cycle allowed);
    // distinct banks stay independent so partitioning can overlap I/O.
    {
        std::unordered_map<std::string, size_t> prev_vol;
        for (size_t v = 0; v < n; v++) {
            if (!is_memory(b.insts[v]) || !b.insts[v].is_volatile) continue;
            auto it = prev_vol.find(g.bank[v]);
            if (it != prev_vol.end()) add(it->second, v, 0);
            prev_vol[g.bank[v]] = v;
        }
    }

    // Calls to defined functions may touch any memory: full barrier.
    for (size_t v = 0; v < n; v++) {
        bool barrier_v = b.insts[v].op == Opcode::Call &&
                         !is_intrinsic(b.insts[v].callee);
        if (!barrier_v) continue;
        for (size_t u = 0; u < n; u++) {
            if (u == v) continue;
            bool other = is_memory(b.insts[u]) ||
                         (b.insts[u].op == Opcode::Call &&
                          !is_intrinsic(b.insts[u].callee));
            if (!other) continue;
            if (u < v) add(u, v, lat(u));
            else add(v, u, lat(v));
        }
    }

    for (const auto& [uv, w] : edges) {
        g.succs[uv.first].push_back({uv.second, w});
        g.pred_count[uv.second]++;
    }
    return g;
}

BlockSchedule schedule_block(const Function& f, const Block& b,
                             const ResourceModel& r) {
    BlockSchedule out;
    out.fn = f.name;
    out.block = b.label;
    DepGraph g = build_dfg(f, b, r);
    size_t n = g.nodes.size();
    if (n == 0) return out;

    auto cls = [&](size_t v) { return classify(b.insts[g.nodes[v]]); };
    auto lat = [&](size_t v) { return r.latency_of(cls(v)); };

    // Priority: longest path to the block exit.
    std::vector<int64_t> lp(n, 0);
    for (size_t v = n; v-- > 0;) {
        lp[v] = lat(v);
        for (const DepGraph::Edge& e : g.succs[v])
            lp[v] = std::max(lp[v], e.weight + lp[e.to]);
    }

    std::vector<int64_t> est(n, 0), start(n, -1), depth(n, 0);
    std::vector<int64_t> preds_left(n);
    for (size_t v = 0; v < n; v++) preds_left[v] = g.pred_count[v];
    std::vector<size_t> order(n);
    for (size_t v = 0; v < n; v++) order[v] = v;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t c) {
        return lp[a] > lp[c];
    });

    // In-edges for chain-depth accounting.
    std::vector<std::vector<size_t>> ins(n);
    for (size_t u = 0; u < n; u++)
        for (const DepGraph::Edge& e : g.succs[u]) ins[e.to].push_back(u);

    size_t placed = 0;
    int64_t guard = 16;
    for (size_t v = 0; v < n; v++) guard += lat(v) + 1;
    for (int64_t c = 0; placed < n && c <= guard; c++) {
        std::map<std::string, int64_t> port_use;
        std::map<OpClass, int64_t> unit_use;
        bool progress = true;
        while (progress) {
            progress = false;
            for (size_t v : order) {
                if (start[v] >= 0 || preds_left[v] > 0 || est[v] > c) continue;
                OpClass oc = cls(v);
                auto cap = r.units.find(oc);
                if (cap != r.units.end() && unit_use[oc] >= cap->second)
                    continue;
                const std::string& bank = g.bank[v];
                if (!bank.empty() && port_use[bank] >= r.ports) continue;
                int64_t d = 0;
                if (r.chainable(oc)) {
                    d = 1;
                    for (size_t u : ins[v])
                        if (start[u] == c && r.chainable(cls(u)))
                            d = std::max(d, depth[u] + 1);
                    if (d > r.chain_depth) continue;
                }
                start[v] = c;
                depth[v] = d;
                if (!bank.empty()) port_use[bank]++;
                unit_use[oc]++;
                placed++;
                progress = true;
                for (const DepGraph::Edge& e : g.succs[v]) {
                    preds_left[e.to]--;
                    est[e.to] = std::max(est[e.to], c + e.weight);
                }
            }
        }
    }

    for (size_t v = 0; v < n; v++) {
        InstSlot slot;
        slot.inst = g.nodes[v];
        slot.start = start[v];
        slot.lat = lat(v);
        slot.bank = g.bank[v];
        out.slots.push_back(slot);
        out.latency = std::max(out.latency, start[v] + lat(v));
    }
    return out;
}

ScheduleResult schedule_module(const Module& m, const ResourceModel& r) {
    ScheduleResult res;
    for (const Function& f : m.functions) {
        if (!f.defined) continue;
        for (const Block& b : f.blocks)
            res.blocks.push_back(schedule_block(f, b, r));
    }
    return res;
}

const BlockSchedule* ScheduleResult::find(const std::string& fn,
                                          const std::string& block) const {
    for (const BlockSchedule& bs : blocks)
        if (bs.fn == fn && bs.block == block) return &bs;
    return nullptr;
}

Diagnostics check_schedule(const Module& m, const ScheduleResult& s,
                           const ResourceModel& r) {
    Diagnostics diags;
    auto complain = [&](const std::string& fn, const std::string& blk,
                        const std::string& code, const std::string& msg) {
        Location loc;
        loc.function = fn;
        loc.block = blk;
        diags.error(code, loc, msg);
    };
    for (const Function& f : m.functions) {
        if (!f.defined) continue;
        for (const Block& b : f.blocks) {
            const BlockSchedule* bs = s.find(f.name, b.label);
            if (!bs) {
                complain(f.name, b.label, "sched-missing-block",
                         "no schedule for this block");
                continue;
            }
            DepGraph g = build_dfg(f, b, r);
            size_t n = g.nodes.size();
            if (bs->slots.size() != n) {
                complain(f.name, b.label, "sched-shape",
                         "slot count does not match the block");
                continue;
            }
            std::vector<int64_t> start(n);
            int64_t makespan = 0;
            for (size_t v = 0; v < n; v++) {
                if (bs->slots[v].inst != g.nodes[v] || bs->slots[v].start < 0) {
                    complain(f.name, b.label, "sched-shape",
                             "slot order or start is invalid");
                    start[v] = 0;
                    continue;
                }
                start[v] = bs->slots[v].start;
                makespan = std::max(
                    makespan, start[v] + r.latency_of(classify(b.insts[v])));
            }
            for (size_t u = 0; u < n; u++)
                for (const DepGraph::Edge& e : g.succs[u])
                    if (start[e.to] < start[u] + e.weight)
                        complain(f.name, b.label, "sched-dependence",
                                 "instruction " + std::to_string(e.to) +
                                     " starts before its dependence");
            std::map<std::pair<int64_t, std::string>, int64_t> ports;
            std::map<std::pair<int64_t, OpClass>, int64_t> units;
            for (size_t v = 0; v < n; v++) {
                if (!g.bank[v].empty() &&
                    ++ports[{start[v], g.bank[v]}] > r.ports)
                    complain(f.name, b.label, "sched-ports",
                             "bank '" + g.bank[v] + "' over port budget at cycle " +
                                 std::to_string(start[v]));
                OpClass oc = classify(b.insts[v]);
                auto cap = r.units.find(oc);
                if (cap != r.units.end() &&
                    ++units[{start[v], oc}] > cap->second)
                    complain(f.name, b.label, "sched-units",
                             std::string("class '") + opclass_name(oc) +
                                 "' over unit budget");
            }
            // Combinational chain depth.
            std::vector<std::vector<size_t>> ins(n);
            for (size_t u = 0; u < n; u++)
                for (const DepGraph::Edge& e : g.succs[u])
                    ins[e.to].push_back(u);
            std::vector<int64_t> depth(n, 0);
            for (size_t v = 0; v < n; v++) {  // program order = topo order
                OpClass oc = classify(b.insts[v]);
                if (!r.chainable(oc)) continue;
                depth[v] = 1;
                for (size_t u : ins[v])
                    if (start[u] == start[v] && r.chainable(classify(b.insts[u])))
                        depth[v] = std::max(depth[v], depth[u] + 1);
                if (depth[v] > r.chain_depth)
                    complain(f.name, b.label, "sched-chain",
                             "combinational chain exceeds depth limit");
            }
            if (bs->latency != makespan)
                complain(f.name, b.label, "sched-latency",
                         "recorded latency " + std::to_string(bs->latency) +
                             " != recomputed " + std::to_string(makespan));
        }
    }
    return diags;
}

std::optional<int64_t> count_cycles(const Module& m, const ResourceModel& r,
                                    const MemoryImage& img, Diagnostics& diags,
                                    ScheduleResult* sched_out,
                                    ExecTrace* trace_out) {
    auto result = run(m, "", img, kDefaultFuel, diags);
    if (!result) return std::nullopt;
    ScheduleResult sched = schedule_module(m, r);

    // Latency lookup aligned with the trace's (function, block) indices.
    std::unordered_map<uint64_t, int64_t> lat;
    for (size_t fi = 0; fi < m.functions.size(); fi++) {
        const Function& f = m.functions[fi];
        if (!f.defined) continue;
        for (size_t bi = 0; bi < f.blocks.size(); bi++) {
            const BlockSchedule* bs = sched.find(f.name, f.blocks[bi].label);
            lat[(uint64_t(fi) << 32) | bi] = bs ? bs->latency : 0;
        }
    }
    int64_t total = 0;
    for (const auto& [fi, bi] : result->trace.visits)
        total += lat[(uint64_t(fi) << 32) | uint64_t(bi)];
    total += static_cast<int64_t>(result->trace.branch_transitions());
    if (sched_out) *sched_out = std::move(sched);
    if (trace_out) *trace_out = result->trace;
    return total;
}

std::string render_schedule(const Module& m, const ScheduleResult& s,
                            std::optional<int64_t> total) {
    (void)m;
    std::ostringstream os;
    for (const BlockSchedule& bs : s.blocks)
        for (const InstSlot& slot : bs.slots)
            os << "sched fn=" << bs.fn << " block=" << bs.block
               << " inst=" << slot.inst << " start=" << slot.start
               << " lat=" << slot.lat
               << " bank=" << (slot.bank.empty() ? "-" : slot.bank) << "\n";
    if (total) os << "cycles total=" << *total << "\n";
    return os.str();
}

std::optional<ScheduleResult> parse_schedule_report(
    const std::string& text, std::optional<int64_t>* total) {
    ScheduleResult res;
    if (total) *total = std::nullopt;
    std::istringstream is(text);
    std::string line;
    auto field = [](const std::string& l, const std::string& key)
        -> std::optional<std::string> {
        std::string pat = key + "=";
        size_t at = l.find(pat);
        if (at == std::string::npos) return std::nullopt;
        size_t from = at + pat.size();
        size_t to = l.find(' ', from);
        if (to == std::string::npos) to = l.size();
        return l.substr(from, to - from);
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("cycles ", 0) == 0) {
            auto t = field(line, "total");
            if (!t) return std::nullopt;
            try {
                int64_t v = std::stoll(*t);
                if (total) *total = v;
            } catch (...) {
                return std::nullopt;
            }
            continue;
        }
        if (line.rfind("sched ", 0) != 0) return std::nullopt;
        auto fn = field(line, "fn"), blk = field(line, "block"),
             inst = field(line, "inst"), start = field(line, "start"),
             lat = field(line, "lat"), bank = field(line, "bank");
        if (!fn || !blk || !inst || !start || !lat || !bank)
            return std::nullopt;
        InstSlot slot;
        try {
            slot.inst = static_cast<size_t>(std::stoull(*inst));
            slot.start = std::stoll(*start);
            slot.lat = std::stoll(*lat);
        } catch (...) {
            return std::nullopt;
        }
        slot.bank = *bank == "-" ? "" : *bank;
        if (res.blocks.empty() || res.blocks.back().fn != *fn ||
            res.blocks.back().block != *blk) {
            BlockSchedule bs;
            bs.fn = *fn;
            bs.block = *blk;
            res.blocks.push_back(bs);
        }
        BlockSchedule& bs = res.blocks.back();
        bs.slots.push_back(slot);
        bs.latency = std::max(bs.latency, slot.start + slot.lat);
    }
    return res;
}

std::string render_gantt(const Module& m, const ScheduleResult& s) {
    std::ostringstream os;
    for (const BlockSchedule& bs : s.blocks) {
        const Function* f = m.find_function(bs.fn);
        const Block* b = f ? f->find_block(bs.block) : nullptr;
        os << "fn=" << bs.fn << " block=" << bs.block
           << " latency=" << bs.latency << "\n";
        int64_t width = std::max<int64_t>(bs.latency, 1);
        for (const InstSlot& slot : bs.slots) {
            std::string label;
            if (b && slot.inst < b->insts.size()) {
                const Instruction& inst = b->insts[slot.inst];
                label = inst.has_result() ? "%" + inst.result
                                          : opcode_name(inst.op);
            } else {
                label = "#" + std::to_string(slot.inst);
            }
            if (label.size() > 14) label.resize(14);
            os << "  " << label << std::string(15 - label.size(), ' ') << "|";
            for (int64_t c = 0; c < width; c++) {
                if (slot.lat == 0)
                    os << (c == slot.start ? '+' : '.');
                else
                    os << (c >= slot.start && c < slot.start + slot.lat ? '#'
                                                                        : '.');
            }
            os << "|\n";
        }
    }
    return os.str();
}

}  // namespace lf
