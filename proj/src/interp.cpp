#include "lfir/interp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

namespace lf {
namespace {

struct Addr {
    int bank = -1;
    int64_t off = 0;
};

struct RtValue {
    enum class Tag : uint8_t { None, I1, I32, I64, F32, Ptr };
    Tag tag = Tag::None;
    int64_t i = 0;
    float f = 0.0f;
    Addr a;

    static RtValue of_i1(bool v) { return {Tag::I1, v ? 1 : 0, 0.0f, {}}; }
    static RtValue of_int(Tag t, int64_t v) { return {t, v, 0.0f, {}}; }
    static RtValue of_f32(float v) { return {Tag::F32, 0, v, {}}; }
    static RtValue of_ptr(Addr a) { return {Tag::Ptr, 0, 0.0f, a}; }
};

RtValue::Tag tag_for_type(const Type* t) {
    if (t->is_address()) return RtValue::Tag::Ptr;
    if (t->is_float()) return RtValue::Tag::F32;
    if (t->is_int()) {
        switch (t->bits()) {
            case 1: return RtValue::Tag::I1;
            case 32: return RtValue::Tag::I32;
            case 64: return RtValue::Tag::I64;
        }
    }
    return RtValue::Tag::None;
}

struct RtBank {
    std::string name;       // empty for role tables
    bool is_table = false;
    Word::Tag tag = Word::Tag::F32;
    std::vector<Word> data;
    std::vector<Addr> cells;

    size_t size() const { return is_table ? cells.size() : data.size(); }
};

// ---- role-slot discovery -------------------------------------------------

constexpr int kRoleParams = 0, kRoleTemps = 1, kRoleRetval = 2;

const char* role_prefix(int role) {
    switch (role) {
        case kRoleParams: return "arg";
        case kRoleTemps: return "tmp";
        default: return "ret";
    }
}

struct RoleScan {
    // (role, slot) -> revealed element type (array or scalar)
    std::map<std::pair<int, int64_t>, const Type*> slot_types;
    int64_t extent[3] = {0, 0, 0};  // table length per role
    bool ok = true;
};

// Follows the value chains that XLA-style preludes build over the three
// role arguments: gep over the slot table, bitcast, load of a slot cell,
// bitcast of the cell to the buffer's array type.
RoleScan scan_roles(const Function& f, Diagnostics& diags) {
    RoleScan scan;
    struct Chase {
        int role = -1;
        int64_t slot = 0;
        enum class Kind { Table, Cell, Base } kind = Kind::Table;
    };
    std::unordered_map<std::string, Chase> chase;
    for (int r = 0; r < 3; r++)
        chase[f.params[r].name] = Chase{r, 0, Chase::Kind::Table};

    auto touch = [&](int role, int64_t slot) {
        if (slot + 1 > scan.extent[role]) scan.extent[role] = slot + 1;
    };
    auto reveal = [&](const Function& fn, int role, int64_t slot, const Type* t,
                      int inst_index, const std::string& block) {
        touch(role, slot);
        auto key = std::make_pair(role, slot);
        auto it = scan.slot_types.find(key);
        if (it == scan.slot_types.end()) {
            scan.slot_types[key] = t;
            return;
        }
        if (it->second == t) return;
        // A narrower cast of an already-typed buffer is a refinement, not a
        // conflict; two distinct array types are irreconcilable.
        if (it->second->is_array() && !t->is_array()) return;
        if (!it->second->is_array() && t->is_array()) {
            it->second = t;
            return;
        }
        Location loc;
        loc.function = fn.name;
        loc.block = block;
        loc.inst_index = inst_index;
        diags.error("role-slot-conflict", loc,
                    std::string(role_prefix(role)) + std::to_string(slot) +
                        " revealed as both " + it->second->to_string() + " and " +
                        t->to_string());
        scan.ok = false;
    };

    for (const Block& b : f.blocks) {
        for (size_t ii = 0; ii < b.insts.size(); ii++) {
            const Instruction& inst = b.insts[ii];
            if (!inst.has_result() || inst.operands.empty()) continue;
            const Value& base = inst.operands[0];
            if (base.kind != Value::Kind::Local) continue;
            auto it = chase.find(base.name);
            if (it == chase.end()) continue;
            Chase c = it->second;
            switch (inst.op) {
                case Opcode::Gep: {
                    if (c.kind != Chase::Kind::Table) break;  // address math past the table
                    if (inst.operands.size() != 2 ||
                        inst.operands[1].kind != Value::Kind::ConstInt) {
                        Location loc;
                        loc.function = f.name;
                        loc.block = b.label;
                        loc.inst_index = static_cast<int>(ii);
                        diags.error("role-dynamic-slot", loc,
                                    "role table must be indexed by one constant");
                        scan.ok = false;
                        break;
                    }
                    chase[inst.result] =
                        Chase{c.role, c.slot + inst.operands[1].ival, Chase::Kind::Table};
                    touch(c.role, c.slot + inst.operands[1].ival);
                    break;
                }
                case Opcode::Bitcast: {
                    if (c.kind == Chase::Kind::Table) {
                        chase[inst.result] = c;  // retyped table view, same slot
                    } else if (c.kind == Chase::Kind::Cell) {
                        if (inst.type->is_address()) {
                            reveal(f, c.role, c.slot, inst.type->elem(),
                                   static_cast<int>(ii), b.label);
                            chase[inst.result] = Chase{c.role, c.slot, Chase::Kind::Base};
                        }
                    }
                    break;
                }
                case Opcode::Load: {
                    if (c.kind != Chase::Kind::Table) break;
                    touch(c.role, c.slot);
                    if (inst.type->is_address() &&
                        inst.type->elem() == Types::i8()) {
                        chase[inst.result] = Chase{c.role, c.slot, Chase::Kind::Cell};
                    } else if (inst.type->is_address()) {
                        reveal(f, c.role, c.slot, inst.type->elem(),
                               static_cast<int>(ii), b.label);
                        chase[inst.result] = Chase{c.role, c.slot, Chase::Kind::Base};
                    }
                    break;
                }
                default:
                    break;
            }
        }
    }
    return scan;
}

// ---- prepared program ----------------------------------------------------

struct POp {
    enum class Kind : uint8_t { Slot, ConstI, ConstF, Bank };
    Kind kind = Kind::Slot;
    RtValue::Tag tag = RtValue::Tag::None;
    int slot = -1;
    int64_t i = 0;
    float f = 0.0f;
    int bank = -1;
};

enum Intrinsic { kNone = -1, kExpf = 0, kTanhf, kLogf, kMaxnum };

struct PInst {
    Opcode op;
    const Instruction* src = nullptr;
    int result_slot = -1;
    RtValue::Tag result_tag = RtValue::Tag::None;
    std::vector<POp> ops;
    std::vector<int> blocks;  // br targets / phi incoming blocks
    int callee_fn = -1;
    int intrinsic = kNone;
    const Type* pointee = nullptr;
    bool is_volatile = false;
    Cmp pred = Cmp::Eq;
};

struct PBlock {
    std::vector<PInst> insts;
    size_t phi_count = 0;
};

struct PFunc {
    std::vector<PBlock> blocks;
    int nslots = 0;
    std::vector<int> param_slots;
};

class Interp {
public:
    Interp(const Module& m, Diagnostics& diags, uint64_t fuel)
        : m_(m), diags_(diags), fuel_(fuel) {}

    bool setup(const Function& entry, const MemoryImage& img);
    bool prepare();
    bool exec_entry(const Function& entry);

    RunResult take_result() {
        RunResult r;
        for (RtBank& b : banks_)
            if (!b.is_table) r.image.banks[b.name] = std::move(b.data);
        r.trace = std::move(trace_);
        return r;
    }

private:
    int add_data_bank(const std::string& name, Word::Tag tag, std::vector<Word> data) {
        RtBank b;
        b.name = name;
        b.tag = tag;
        b.data = std::move(data);
        banks_.push_back(std::move(b));
        bank_index_[name] = static_cast<int>(banks_.size()) - 1;
        return static_cast<int>(banks_.size()) - 1;
    }

    bool error(const std::string& code, const std::string& msg) {
        if (!failed_) diags_.error(code, cur_loc_, msg);
        failed_ = true;
        return false;
    }

    bool eval(const POp& op, std::vector<RtValue>& regs, RtValue& out) {
        switch (op.kind) {
            case POp::Kind::Slot: out = regs[op.slot]; return true;
            case POp::Kind::ConstI: out = RtValue::of_int(op.tag, op.i); return true;
            case POp::Kind::ConstF: out = RtValue::of_f32(op.f); return true;
            case POp::Kind::Bank: out = RtValue::of_ptr(Addr{op.bank, 0}); return true;
        }
        return false;
    }

    bool exec_function(int fi, const std::vector<RtValue>& args, RtValue& ret);

    const Module& m_;
    Diagnostics& diags_;
    uint64_t fuel_;
    std::vector<RtBank> banks_;
    std::unordered_map<std::string, int> bank_index_;
    std::vector<PFunc> pfuncs_;
    ExecTrace trace_;
    bool failed_ = false;
    Location cur_loc_;
    std::vector<RtValue> entry_args_;
    int call_depth_ = 0;
};

bool Interp::setup(const Function& entry, const MemoryImage& img) {
    for (const Global& g : m_.globals) {
        Word::Tag tag = Word::tag_for(g.type->scalar());
        std::vector<Word> data(g.type->flat_size(), Word::from_bits(tag, 0));
        if (!g.init.zero) {
            for (size_t i = 0; i < g.init.elems.size() && i < data.size(); i++) {
                const Value& v = g.init.elems[i];
                data[i] = (v.kind == Value::Kind::ConstFloat)
                              ? Word::f32(v.fval)
                              : Word::from_bits(tag, static_cast<uint64_t>(v.ival));
            }
        }
        if (const std::vector<Word>* supplied = img.find(g.name)) {
            if (supplied->size() != data.size()) {
                cur_loc_ = Location{};
                cur_loc_.global = g.name;
                return error("image-shape", "supplied bank @" + g.name + " has " +
                                                std::to_string(supplied->size()) +
                                                " words, global needs " +
                                                std::to_string(data.size()));
            }
            data = *supplied;
        }
        add_data_bank(g.name, tag, std::move(data));
    }

    if (is_three_role(entry)) {
        RoleScan scan = scan_roles(entry, diags_);
        if (!scan.ok) {
            failed_ = true;
            return false;
        }
        // Data banks for every typed slot.
        std::map<std::pair<int, int64_t>, int> slot_bank;
        for (const auto& [key, type] : scan.slot_types) {
            std::string name =
                std::string(role_prefix(key.first)) + std::to_string(key.second);
            Word::Tag tag = Word::tag_for(type->scalar());
            std::vector<Word> data(type->flat_size(), Word::from_bits(tag, 0));
            if (const std::vector<Word>* supplied = img.find(name)) {
                if (supplied->size() != data.size()) {
                    cur_loc_ = Location{};
                    cur_loc_.global = name;
                    return error("image-shape",
                                 "supplied bank @" + name + " has wrong size");
                }
                data = *supplied;
            }
            slot_bank[key] = add_data_bank(name, tag, std::move(data));
        }
        // Slot tables, one per role; untyped slots stay null.
        for (int role = 0; role < 3; role++) {
            RtBank table;
            table.is_table = true;
            table.cells.assign(static_cast<size_t>(scan.extent[role]), Addr{});
            for (const auto& [key, bank] : slot_bank)
                if (key.first == role)
                    table.cells[static_cast<size_t>(key.second)] = Addr{bank, 0};
            banks_.push_back(std::move(table));
            entry_args_.push_back(
                RtValue::of_ptr(Addr{static_cast<int>(banks_.size()) - 1, 0}));
        }
    } else if (!entry.params.empty()) {
        cur_loc_ = Location{};
        cur_loc_.function = entry.name;
        return error("entry-params",
                     "entry @" + entry.name + " takes parameters and is not"
                     " in three-role form; cannot supply arguments");
    }
    return true;
}

bool Interp::prepare() {
    pfuncs_.resize(m_.functions.size());
    for (size_t fi = 0; fi < m_.functions.size(); fi++) {
        const Function& f = m_.functions[fi];
        if (!f.defined) continue;
        PFunc& pf = pfuncs_[fi];
        std::unordered_map<std::string, int> slot;
        std::unordered_map<std::string, int> block_index;
        for (const Param& p : f.params) {
            pf.param_slots.push_back(pf.nslots);
            slot[p.name] = pf.nslots++;
        }
        for (const Block& b : f.blocks)
            for (const Instruction& inst : b.insts)
                if (inst.has_result()) slot[inst.result] = pf.nslots++;
        for (size_t bi = 0; bi < f.blocks.size(); bi++)
            block_index[f.blocks[bi].label] = static_cast<int>(bi);

        for (const Block& b : f.blocks) {
            PBlock pb;
            for (const Instruction& inst : b.insts) {
                PInst pi;
                pi.op = inst.op;
                pi.src = &inst;
                pi.pointee = inst.pointee;
                pi.is_volatile = inst.is_volatile;
                pi.pred = inst.pred;
                pi.result_tag = tag_for_type(inst.type);
                if (inst.has_result()) pi.result_slot = slot[inst.result];
                for (const Value& v : inst.operands) {
                    POp op;
                    switch (v.kind) {
                        case Value::Kind::Local:
                            op.kind = POp::Kind::Slot;
                            op.slot = slot.count(v.name) ? slot[v.name] : -1;
                            break;
                        case Value::Kind::Global: {
                            op.kind = POp::Kind::Bank;
                            auto it = bank_index_.find(v.name);
                            op.bank = it == bank_index_.end() ? -1 : it->second;
                            break;
                        }
                        case Value::Kind::ConstInt:
                            op.kind = POp::Kind::ConstI;
                            op.tag = tag_for_type(v.type);
                            op.i = v.ival;
                            break;
                        case Value::Kind::ConstFloat:
                            op.kind = POp::Kind::ConstF;
                            op.f = v.fval;
                            break;
                    }
                    pi.ops.push_back(op);
                }
                for (const std::string& lbl : inst.labels)
                    pi.blocks.push_back(block_index.count(lbl) ? block_index[lbl] : -1);
                if (inst.op == Opcode::Call) {
                    pi.callee_fn = -1;
                    for (size_t cj = 0; cj < m_.functions.size(); cj++) {
                        if (m_.functions[cj].name == inst.callee &&
                            m_.functions[cj].defined) {
                            pi.callee_fn = static_cast<int>(cj);
                            break;
                        }
                    }
                    if (pi.callee_fn < 0) {
                        if (inst.callee == "expf") pi.intrinsic = kExpf;
                        else if (inst.callee == "tanhf") pi.intrinsic = kTanhf;
                        else if (inst.callee == "logf") pi.intrinsic = kLogf;
                        else if (inst.callee == "maxnum.f32") pi.intrinsic = kMaxnum;
                    }
                }
                if (inst.op == Opcode::Phi) pb.phi_count++;
                pb.insts.push_back(std::move(pi));
            }
            pf.blocks.push_back(std::move(pb));
        }
    }
    return true;
}

bool Interp::exec_entry(const Function& entry) {
    int fi = -1;
    for (size_t i = 0; i < m_.functions.size(); i++)
        if (&m_.functions[i] == &entry) fi = static_cast<int>(i);
    RtValue ret;
    return exec_function(fi, entry_args_, ret);
}

bool Interp::exec_function(int fi, const std::vector<RtValue>& args, RtValue& ret) {
    if (++call_depth_ > 512) {
        --call_depth_;
        return error("call-depth", "call depth limit exceeded (recursion?)");
    }
    const PFunc& pf = pfuncs_[fi];
    const Function& f = m_.functions[fi];
    std::vector<RtValue> regs(static_cast<size_t>(pf.nslots));
    for (size_t i = 0; i < args.size() && i < pf.param_slots.size(); i++)
        regs[pf.param_slots[i]] = args[i];

    int cur = 0, prev = -1;
    std::vector<RtValue> phi_vals;
    while (true) {
        trace_.visits.emplace_back(fi, cur);
        const PBlock& pb = pf.blocks[cur];

        // Phis read their inputs on the edge, before any assignment lands.
        if (pb.phi_count > 0) {
            phi_vals.clear();
            for (size_t ii = 0; ii < pb.phi_count; ii++) {
                const PInst& pi = pb.insts[ii];
                cur_loc_.function = f.name;
                cur_loc_.block = f.blocks[cur].label;
                cur_loc_.inst_index = static_cast<int>(ii);
                int which = -1;
                for (size_t k = 0; k < pi.blocks.size(); k++)
                    if (pi.blocks[k] == prev) which = static_cast<int>(k);
                if (which < 0) {
                    --call_depth_;
                    return error("phi-edge", "phi has no entry for the taken edge");
                }
                RtValue v;
                if (!eval(pi.ops[which], regs, v)) {
                    --call_depth_;
                    return false;
                }
                phi_vals.push_back(v);
            }
            for (size_t ii = 0; ii < pb.phi_count; ii++)
                regs[pb.insts[ii].result_slot] = phi_vals[ii];
            if (fuel_ < pb.phi_count) {
                --call_depth_;
                return error("fuel-exhausted", "execution exceeded the step budget");
            }
            fuel_ -= pb.phi_count;
            trace_.steps += pb.phi_count;
        }

        for (size_t ii = pb.phi_count; ii < pb.insts.size(); ii++) {
            const PInst& pi = pb.insts[ii];
            cur_loc_.function = f.name;
            cur_loc_.block = f.blocks[cur].label;
            cur_loc_.inst_index = static_cast<int>(ii);
            if (fuel_ == 0) {
                --call_depth_;
                return error("fuel-exhausted", "execution exceeded the step budget");
            }
            fuel_--;
            trace_.steps++;

            RtValue a, b, c;
            auto arg = [&](size_t k, RtValue& out) { return eval(pi.ops[k], regs, out); };
            auto set = [&](RtValue v) {
                if (pi.result_slot >= 0) regs[pi.result_slot] = v;
            };

            switch (pi.op) {
                case Opcode::Add:
                case Opcode::Sub:
                case Opcode::Mul: {
                    if (!arg(0, a) || !arg(1, b)) goto fail;
                    uint64_t x = static_cast<uint64_t>(a.i),
                             y = static_cast<uint64_t>(b.i), r = 0;
                    if (pi.op == Opcode::Add) r = x + y;
                    else if (pi.op == Opcode::Sub) r = x - y;
                    else r = x * y;
                    int64_t sr = static_cast<int64_t>(r);
                    if (a.tag == RtValue::Tag::I32)
                        sr = static_cast<int32_t>(static_cast<uint32_t>(r));
                    if (a.tag == RtValue::Tag::I1) sr &= 1;
                    set(RtValue::of_int(a.tag, sr));
                    break;
                }
                case Opcode::SDiv:
                case Opcode::SRem: {
                    if (!arg(0, a) || !arg(1, b)) goto fail;
                    if (b.i == 0) {
                        --call_depth_;
                        return error("division-by-zero", "sdiv/srem by zero");
                    }
                    if (a.i == std::numeric_limits<int64_t>::min() && b.i == -1) {
                        --call_depth_;
                        return error("division-overflow", "sdiv/srem overflow");
                    }
                    int64_t r = (pi.op == Opcode::SDiv) ? a.i / b.i : a.i % b.i;
                    if (a.tag == RtValue::Tag::I32)
                        r = static_cast<int32_t>(r);
                    set(RtValue::of_int(a.tag, r));
                    break;
                }
                case Opcode::FAdd:
                case Opcode::FSub:
                case Opcode::FMul:
                case Opcode::FDiv: {
                    if (!arg(0, a) || !arg(1, b)) goto fail;
                    float r = 0;
                    if (pi.op == Opcode::FAdd) r = a.f + b.f;
                    else if (pi.op == Opcode::FSub) r = a.f - b.f;
                    else if (pi.op == Opcode::FMul) r = a.f * b.f;
                    else r = a.f / b.f;
                    set(RtValue::of_f32(r));
                    break;
                }
                case Opcode::ICmp: {
                    if (!arg(0, a) || !arg(1, b)) goto fail;
                    bool r = false;
                    if (a.tag == RtValue::Tag::Ptr) {
                        bool eq = a.a.bank == b.a.bank && a.a.off == b.a.off;
                        if (pi.pred == Cmp::Eq) r = eq;
                        else if (pi.pred == Cmp::Ne) r = !eq;
                        else {
                            --call_depth_;
                            return error("pointer-compare",
                                         "relational compare on addresses");
                        }
                    } else {
                        switch (pi.pred) {
                            case Cmp::Eq: r = a.i == b.i; break;
                            case Cmp::Ne: r = a.i != b.i; break;
                            case Cmp::Slt: r = a.i < b.i; break;
                            case Cmp::Sle: r = a.i <= b.i; break;
                            case Cmp::Sgt: r = a.i > b.i; break;
                            case Cmp::Sge: r = a.i >= b.i; break;
                            default: break;
                        }
                    }
                    set(RtValue::of_i1(r));
                    break;
                }
                case Opcode::FCmp: {
                    if (!arg(0, a) || !arg(1, b)) goto fail;
                    bool un = std::isnan(a.f) || std::isnan(b.f);
                    bool r = false;
                    switch (pi.pred) {
                        case Cmp::Oeq: r = !un && a.f == b.f; break;
                        case Cmp::One: r = !un && a.f != b.f; break;
                        case Cmp::Olt: r = !un && a.f < b.f; break;
                        case Cmp::Ole: r = !un && a.f <= b.f; break;
                        case Cmp::Ogt: r = !un && a.f > b.f; break;
                        case Cmp::Oge: r = !un && a.f >= b.f; break;
                        case Cmp::Ueq: r = un || a.f == b.f; break;
                        case Cmp::Une: r = un || a.f != b.f; break;
                        case Cmp::Ult: r = un || a.f < b.f; break;
                        case Cmp::Ule: r = un || a.f <= b.f; break;
                        case Cmp::Ugt: r = un || a.f > b.f; break;
                        case Cmp::Uge: r = un || a.f >= b.f; break;
                        default: break;
                    }
                    set(RtValue::of_i1(r));
                    break;
                }
                case Opcode::Select: {
                    if (!arg(0, a) || !arg(1, b) || !arg(2, c)) goto fail;
                    set(a.i ? b : c);
                    break;
                }
                case Opcode::ZExt: {
                    if (!arg(0, a)) goto fail;
                    uint64_t raw = static_cast<uint64_t>(a.i);
                    if (a.tag == RtValue::Tag::I1) raw &= 1;
                    if (a.tag == RtValue::Tag::I32) raw &= 0xFFFFFFFFull;
                    set(RtValue::of_int(pi.result_tag, static_cast<int64_t>(raw)));
                    break;
                }
                case Opcode::SExt: {
                    if (!arg(0, a)) goto fail;
                    int64_t v = a.i;
                    if (a.tag == RtValue::Tag::I1) v = (a.i & 1) ? -1 : 0;
                    set(RtValue::of_int(pi.result_tag, v));
                    break;
                }
                case Opcode::Trunc: {
                    if (!arg(0, a)) goto fail;
                    int64_t v = a.i;
                    if (pi.result_tag == RtValue::Tag::I32)
                        v = static_cast<int32_t>(static_cast<uint64_t>(v));
                    if (pi.result_tag == RtValue::Tag::I1) v &= 1;
                    set(RtValue::of_int(pi.result_tag, v));
                    break;
                }
                case Opcode::SIToFP: {
                    if (!arg(0, a)) goto fail;
                    set(RtValue::of_f32(static_cast<float>(a.i)));
                    break;
                }
                case Opcode::FPToSI: {
                    if (!arg(0, a)) goto fail;
                    if (std::isnan(a.f) || a.f >= 9.2233720368547758e18f ||
                        a.f < -9.2233720368547758e18f) {
                        --call_depth_;
                        return error("fptosi-range", "float out of integer range");
                    }
                    int64_t v = static_cast<int64_t>(a.f);
                    if (pi.result_tag == RtValue::Tag::I32) {
                        if (v > std::numeric_limits<int32_t>::max() ||
                            v < std::numeric_limits<int32_t>::min()) {
                            --call_depth_;
                            return error("fptosi-range", "float out of i32 range");
                        }
                    }
                    set(RtValue::of_int(pi.result_tag, v));
                    break;
                }
                case Opcode::Bitcast: {
                    if (!arg(0, a)) goto fail;
                    set(a);
                    break;
                }
                case Opcode::Gep: {
                    if (!arg(0, a)) goto fail;
                    if (a.tag != RtValue::Tag::Ptr || a.a.bank < 0) {
                        --call_depth_;
                        return error("null-address", "getelementptr on a null address");
                    }
                    Addr addr = a.a;
                    const Type* cur_ty = pi.pointee;
                    for (size_t k = 1; k < pi.ops.size(); k++) {
                        if (!arg(k, b)) goto fail;
                        if (k == 1) {
                            addr.off += b.i * static_cast<int64_t>(cur_ty->flat_size());
                        } else {
                            addr.off +=
                                b.i * static_cast<int64_t>(cur_ty->elem()->flat_size());
                            cur_ty = cur_ty->elem();
                        }
                    }
                    set(RtValue::of_ptr(addr));
                    break;
                }
                case Opcode::Load: {
                    if (!arg(0, a)) goto fail;
                    if (a.tag != RtValue::Tag::Ptr || a.a.bank < 0) {
                        --call_depth_;
                        return error("null-address", "load from a null address");
                    }
                    RtBank& bank = banks_[a.a.bank];
                    if (a.a.off < 0 || static_cast<uint64_t>(a.a.off) >= bank.size()) {
                        --call_depth_;
                        return error("out-of-bounds",
                                     "load at offset " + std::to_string(a.a.off) +
                                         " of a " + std::to_string(bank.size()) +
                                         "-word bank");
                    }
                    if (pi.is_volatile) trace_.volatile_count++;
                    if (bank.is_table) {
                        set(RtValue::of_ptr(bank.cells[a.a.off]));
                    } else {
                        const Word& w = bank.data[a.a.off];
                        switch (w.tag) {
                            case Word::Tag::F32: set(RtValue::of_f32(w.f)); break;
                            case Word::Tag::I1:
                                set(RtValue::of_int(RtValue::Tag::I1, w.i));
                                break;
                            case Word::Tag::I32:
                                set(RtValue::of_int(RtValue::Tag::I32, w.i));
                                break;
                            case Word::Tag::I64:
                                set(RtValue::of_int(RtValue::Tag::I64, w.i));
                                break;
                        }
                    }
                    break;
                }
                case Opcode::Store: {
                    if (!arg(0, a) || !arg(1, b)) goto fail;
                    if (b.tag != RtValue::Tag::Ptr || b.a.bank < 0) {
                        --call_depth_;
                        return error("null-address", "store to a null address");
                    }
                    RtBank& bank = banks_[b.a.bank];
                    if (bank.is_table) {
                        --call_depth_;
                        return error("store-to-table", "store into a role slot table");
                    }
                    if (b.a.off < 0 || static_cast<uint64_t>(b.a.off) >= bank.size()) {
                        --call_depth_;
                        return error("out-of-bounds",
                                     "store at offset " + std::to_string(b.a.off) +
                                         " of a " + std::to_string(bank.size()) +
                                         "-word bank");
                    }
                    Word w;
                    switch (a.tag) {
                        case RtValue::Tag::F32: w = Word::f32(a.f); break;
                        case RtValue::Tag::I1: w = Word::i1(a.i != 0); break;
                        case RtValue::Tag::I32:
                            w = Word::i32(static_cast<int32_t>(a.i));
                            break;
                        case RtValue::Tag::I64: w = Word::i64(a.i); break;
                        default: {
                            --call_depth_;
                            return error("store-type", "cannot store this value kind");
                        }
                    }
                    if (w.tag != bank.tag) {
                        --call_depth_;
                        return error("store-type", "stored tag differs from bank tag");
                    }
                    if (pi.is_volatile) trace_.volatile_count++;
                    bank.data[b.a.off] = w;
                    break;
                }
                case Opcode::Call: {
                    std::vector<RtValue> cargs;
                    cargs.reserve(pi.ops.size());
                    for (size_t k = 0; k < pi.ops.size(); k++) {
                        if (!arg(k, a)) goto fail;
                        cargs.push_back(a);
                    }
                    if (pi.callee_fn >= 0) {
                        RtValue r;
                        if (!exec_function(pi.callee_fn, cargs, r)) {
                            --call_depth_;
                            return false;
                        }
                        set(r);
                    } else if (pi.intrinsic != kNone) {
                        float r = 0;
                        switch (pi.intrinsic) {
                            case kExpf: r = std::exp(cargs[0].f); break;
                            case kTanhf: r = std::tanh(cargs[0].f); break;
                            case kLogf: r = std::log(cargs[0].f); break;
                            case kMaxnum: r = std::fmax(cargs[0].f, cargs[1].f); break;
                        }
                        set(RtValue::of_f32(r));
                    } else {
                        --call_depth_;
                        return error("call-undefined",
                                     "call to undefined non-intrinsic function");
                    }
                    break;
                }
                case Opcode::Br: {
                    int target;
                    if (pi.ops.empty()) {
                        target = pi.blocks[0];
                    } else {
                        if (!arg(0, a)) goto fail;
                        target = a.i ? pi.blocks[0] : pi.blocks[1];
                    }
                    prev = cur;
                    cur = target;
                    goto next_block;
                }
                case Opcode::Ret: {
                    if (!pi.ops.empty()) {
                        if (!arg(0, a)) goto fail;
                        ret = a;
                    }
                    --call_depth_;
                    return true;
                }
                case Opcode::Phi:
                    break;  // handled at block entry
            }
            continue;
        fail:
            --call_depth_;
            return error("operand-eval", "could not evaluate an operand");
        }
    next_block:;
    }
}

}  // namespace

bool is_three_role(const Function& f) {
    if (f.params.size() != 3) return false;
    const Type* p = Types::address(Types::address(Types::i8()));
    for (const Param& param : f.params)
        if (param.type != p) return false;
    return true;
}

std::vector<RoleSlot> scan_role_slots(const Function& f, Diagnostics& diags) {
    std::vector<RoleSlot> out;
    if (!is_three_role(f)) return out;
    RoleScan scan = scan_roles(f, diags);
    if (!scan.ok) return out;
    for (const auto& [key, type] : scan.slot_types)
        out.push_back(RoleSlot{
            std::string(role_prefix(key.first)) + std::to_string(key.second), type});
    return out;
}

MemoryImage image_for(const Module& m, Diagnostics& diags) {
    MemoryImage img = MemoryImage::for_module(m);
    const Function* entry = m.entry_function();
    if (entry && entry->defined && is_three_role(*entry)) {
        for (const RoleSlot& slot : scan_role_slots(*entry, diags)) {
            Word::Tag tag = Word::tag_for(slot.type->scalar());
            img.banks[slot.bank] =
                std::vector<Word>(slot.type->flat_size(), Word::from_bits(tag, 0));
        }
    }
    return img;
}

std::vector<std::string> output_banks(const Module& m) {
    std::vector<std::string> out;
    const Function* entry = m.entry_function();
    if (entry && entry->defined && is_three_role(*entry)) {
        Diagnostics diags;
        for (const RoleSlot& slot : scan_role_slots(*entry, diags))
            if (slot.bank.rfind("ret", 0) == 0) out.push_back(slot.bank);
        return out;
    }
    // Standalone: non-internal globals that some store targets, chasing
    // gep/bitcast chains back to their root global.
    std::vector<std::string> stored;
    for (const Function& f : m.functions) {
        if (!f.defined) continue;
        std::unordered_map<std::string, const Instruction*> defs;
        for (const Block& b : f.blocks)
            for (const Instruction& inst : b.insts)
                if (inst.has_result()) defs[inst.result] = &inst;
        auto root_global = [&](const Value& v) -> std::string {
            const Value* cur = &v;
            for (int guard = 0; guard < 64; guard++) {
                if (cur->kind == Value::Kind::Global) return cur->name;
                if (cur->kind != Value::Kind::Local) return "";
                auto it = defs.find(cur->name);
                if (it == defs.end()) return "";
                const Instruction* d = it->second;
                if (d->op != Opcode::Gep && d->op != Opcode::Bitcast) return "";
                cur = &d->operands[0];
            }
            return "";
        };
        for (const Block& b : f.blocks)
            for (const Instruction& inst : b.insts) {
                if (inst.op != Opcode::Store) continue;
                std::string g = root_global(inst.operands[1]);
                if (g.empty()) continue;
                const Global* gd = m.find_global(g);
                if (gd && !gd->internal &&
                    std::find(stored.begin(), stored.end(), g) == stored.end())
                    stored.push_back(g);
            }
    }
    return stored;
}

std::optional<RunResult> run(const Module& m, const std::string& entry,
                             const MemoryImage& img, uint64_t fuel,
                             Diagnostics& diags) {
    const Function* f =
        entry.empty() ? m.entry_function() : m.find_function(entry);
    if (!f || !f->defined) {
        Location loc;
        loc.function = entry;
        diags.error("no-entry", loc, "entry function not found or not defined");
        return std::nullopt;
    }
    Interp interp(m, diags, fuel);
    if (!interp.setup(*f, img)) return std::nullopt;
    if (!interp.prepare()) return std::nullopt;
    if (!interp.exec_entry(*f)) return std::nullopt;
    return interp.take_result();
}

}  // namespace lf
