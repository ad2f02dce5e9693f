#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lfir/diagnostics.hpp"
#include "lfir/image.hpp"
#include "lfir/interp.hpp"
#include "lfir/ir.hpp"

namespace lf {

/// Functional-unit classes for latency/limit assignment. Wire covers
/// address math and value plumbing that synthesizes to wiring.
enum class OpClass {
    Load, Store, IntAlu, IntMul, IntDiv,
    FAddSub, FMul, FDiv, FCmpCls, FCast, CallCls, Wire,
};

OpClass classify(const Instruction& inst);
const char* opclass_name(OpClass c);
std::optional<OpClass> opclass_by_name(const std::string& name);

/// Latency, port, and chaining assumptions. Zero-latency classes chain
/// combinationally up to `chain_depth` per cycle. Memory is the only
/// bounded resource by default: `ports` simultaneous accesses per bank
/// per cycle. `units` caps per-cycle issue for a class when present.
struct ResourceModel {
    int64_t ports = 2;
    int64_t chain_depth = 3;
    std::map<OpClass, int64_t> latency = {
        {OpClass::Load, 2},   {OpClass::Store, 1},  {OpClass::IntAlu, 0},
        {OpClass::IntMul, 1}, {OpClass::IntDiv, 8}, {OpClass::FAddSub, 5},
        {OpClass::FMul, 4},   {OpClass::FDiv, 16},  {OpClass::FCmpCls, 1},
        {OpClass::FCast, 2},  {OpClass::CallCls, 10}, {OpClass::Wire, 0},
    };
    std::map<OpClass, int64_t> units;  // absent = unbounded

    int64_t latency_of(OpClass c) const;
    bool chainable(OpClass c) const { return latency_of(c) == 0; }
};

/// Intra-block dependences. Node k refers to block instruction
/// `nodes[k]`; the terminator is never a node. Edges carry minimum start
/// separations: start(to) >= start(from) + weight.
struct DepGraph {
    struct Edge {
        size_t to;
        int64_t weight;
    };
    std::vector<size_t> nodes;              // instruction indices, program order
    std::vector<std::string> bank;          // accessed bank, "" if none
    std::vector<std::vector<Edge>> succs;
    std::vector<int64_t> pred_count;
};

/// Build the dependence graph for one block: SSA def-use edges, same-bank
/// pairs with at least one store (program order, weight = producer
/// latency), and order-preserving weight-0 edges between volatile
/// accesses to the same bank. Distinct banks carry no cross-bank memory
/// edges. `f` supplies cross-block address definitions for bank
/// resolution.
DepGraph build_dfg(const Function& f, const Block& b, const ResourceModel& r);

struct InstSlot {
    size_t inst;        // index into the block's instruction list
    int64_t start = 0;
    int64_t lat = 0;
    std::string bank;   // empty when the instruction touches no memory
};

struct BlockSchedule {
    std::string fn;
    std::string block;
    std::vector<InstSlot> slots;  // program order
    int64_t latency = 0;          // entry to last completion
};

struct ScheduleResult {
    std::vector<BlockSchedule> blocks;
    const BlockSchedule* find(const std::string& fn,
                              const std::string& block) const;
};

/// Resource-constrained list schedule of one block: priority is longest
/// path to the block exit, ties broken by program order. Deterministic.
BlockSchedule schedule_block(const Function& f, const Block& b,
                             const ResourceModel& r);

/// Every block of every defined function.
ScheduleResult schedule_module(const Module& m, const ResourceModel& r);

/// Re-check a schedule against the dependence and resource rules.
Diagnostics check_schedule(const Module& m, const ScheduleResult& s,
                           const ResourceModel& r);

/// Execute the module on `img` and price the trace: the sum of visited
/// blocks' scheduled latencies plus one cycle per taken branch
/// transition. Interpreter failures surface as diagnostics.
std::optional<int64_t> count_cycles(const Module& m, const ResourceModel& r,
                                    const MemoryImage& img, Diagnostics& diags,
                                    ScheduleResult* sched_out = nullptr,
                                    ExecTrace* trace_out = nullptr);

/// One `sched fn=<f> block=<b> inst=<i> start=<c> lat=<l> bank=<name|->`
/// line per slot; with `total`, a final `cycles total=<n>` line.
std::string render_schedule(const Module& m, const ScheduleResult& s,
                            std::optional<int64_t> total = std::nullopt);

/// Parse render_schedule output back (instruction text is not recovered,
/// only positions). Returns nullopt on malformed input.
std::optional<ScheduleResult> parse_schedule_report(const std::string& text,
                                                    std::optional<int64_t>* total
                                                    = nullptr);

/// Per-block Gantt chart: one row per instruction, one column per cycle.
std::string render_gantt(const Module& m, const ScheduleResult& s);

}  // namespace lf
