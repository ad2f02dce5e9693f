#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lfir/partition.hpp"
#include "lfir/validate.hpp"

namespace lf {
namespace {

std::vector<int64_t> type_dims(const Type* t) {
    std::vector<int64_t> dims;
    while (t->is_array()) {
        dims.push_back(static_cast<int64_t>(t->count()));
        t = t->elem();
    }
    return dims;
}

Word zero_word(const Type* scalar) {
    if (scalar && scalar->is_float()) return Word::f32(0.0f);
    if (scalar && scalar->is_int() && scalar->bits() == 1) return Word::i1(false);
    if (scalar && scalar->is_int() && scalar->bits() == 64) return Word::i64(0);
    return Word::i32(0);
}

Value zero_value(const Type* scalar) {
    if (scalar && scalar->is_float()) return Value::const_float(0.0f);
    return Value::const_int(0, scalar);
}

Location global_loc(const std::string& name) {
    Location loc;
    loc.global = name;
    return loc;
}

}  // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Block: return "block";
        case Scheme::Cyclic: return "cyclic";
        case Scheme::Complete: return "complete";
    }
    return "?";
}

std::optional<PartitionSpec> parse_partition_spec(const std::string& text,
                                                  Diagnostics& diags) {
    auto fail = [&](const std::string& msg) -> std::optional<PartitionSpec> {
        diags.error("partition-spec", Location{}, msg + ": '" + text + "'");
        return std::nullopt;
    };
    std::vector<std::string> parts;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t colon = text.find(':', pos);
        if (colon == std::string::npos) colon = text.size();
        parts.push_back(text.substr(pos, colon - pos));
        pos = colon + 1;
    }
    if (parts.size() < 2) return fail("expected <array>:<scheme>");
    PartitionSpec spec;
    spec.array = parts[0];
    if (spec.array.empty()) return fail("empty array name");
    if (parts[1] == "block") spec.scheme = Scheme::Block;
    else if (parts[1] == "cyclic") spec.scheme = Scheme::Cyclic;
    else if (parts[1] == "complete") spec.scheme = Scheme::Complete;
    else return fail("unknown scheme '" + parts[1] + "'");
    for (size_t i = 2; i < parts.size(); i++) {
        const std::string& p = parts[i];
        size_t eq = p.find('=');
        if (eq == std::string::npos) return fail("expected key=value");
        std::string key = p.substr(0, eq), val = p.substr(eq + 1);
        int64_t n = 0;
        try {
            size_t used = 0;
            n = std::stoll(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (...) {
            return fail("bad number '" + val + "'");
        }
        if (key == "factor") spec.factor = n;
        else if (key == "dim") spec.dim = n;
        else return fail("unknown key '" + key + "'");
    }
    return spec;
}

std::pair<int64_t, int64_t> BankLayout::map(int64_t i) const {
    switch (scheme) {
        case Scheme::Block: return {i / chunk, i % chunk};
        case Scheme::Cyclic: {
            int64_t f = factor;
            return {i % f, i / f};
        }
        case Scheme::Complete: return {i, 0};
    }
    return {0, 0};
}

int64_t BankLayout::bank_dim_size(int64_t k) const {
    int64_t n = dim_size();
    switch (scheme) {
        case Scheme::Block:
            return std::min(chunk, n - k * chunk);
        case Scheme::Cyclic:
            return n / factor + (k < n % factor ? 1 : 0);
        case Scheme::Complete:
            return 1;
    }
    return 0;
}

std::pair<int64_t, int64_t> BankLayout::flat_map(int64_t flat) const {
    // Decompose row-major, remap the partitioned coordinate, recompose
    // against the bank's dimension sizes.
    size_t r = dims.size();
    std::vector<int64_t> idx(r);
    int64_t rest = flat;
    for (size_t d = r; d-- > 0;) {
        idx[d] = rest % dims[d];
        rest /= dims[d];
    }
    auto [bank, local] = map(idx[static_cast<size_t>(dim)]);
    int64_t out = 0;
    for (size_t d = 0; d < r; d++) {
        if (static_cast<int64_t>(d) == dim) {
            if (scheme == Scheme::Complete) continue;  // dimension dropped
            out = out * bank_dim_size(bank) + local;
        } else {
            out = out * dims[d] + idx[d];
        }
    }
    return {bank, out};
}

std::string BankLayout::bank_name(int64_t k) const {
    return array + "_p" + std::to_string(k);
}

const Type* BankLayout::bank_type(int64_t k) const {
    const Type* t = scalar;
    for (size_t d = dims.size(); d-- > 0;) {
        if (static_cast<int64_t>(d) == dim) {
            if (scheme == Scheme::Complete) continue;
            t = Types::array(t, static_cast<uint64_t>(bank_dim_size(k)));
        } else {
            t = Types::array(t, static_cast<uint64_t>(dims[d]));
        }
    }
    return t;
}

uint64_t BankLayout::bank_flat_size(int64_t k) const {
    return bank_type(k)->flat_size();
}

std::optional<BankLayout> compute_layout(const Type* array_type,
                                         const PartitionSpec& spec,
                                         Diagnostics& diags) {
    if (!array_type || !array_type->is_array()) {
        diags.error("partition-dim", global_loc(spec.array),
                    "'" + spec.array + "' is not an array");
        return std::nullopt;
    }
    BankLayout lay;
    lay.scheme = spec.scheme;
    lay.dim = spec.dim;
    lay.dims = type_dims(array_type);
    lay.scalar = array_type->scalar();
    lay.array = spec.array;
    if (spec.dim < 0 || spec.dim >= static_cast<int64_t>(lay.dims.size())) {
        diags.error("partition-dim", global_loc(spec.array),
                    "dim " + std::to_string(spec.dim) + " out of range for " +
                        array_type->to_string());
        return std::nullopt;
    }
    int64_t n = lay.dim_size();
    if (spec.scheme == Scheme::Complete) {
        lay.factor = n;
        lay.chunk = 1;
        return lay;
    }
    if (spec.factor < 2) {
        diags.error("partition-factor", global_loc(spec.array),
                    "factor must be at least 2");
        return std::nullopt;
    }
    if (spec.factor > n) {
        diags.error("partition-factor", global_loc(spec.array),
                    "factor " + std::to_string(spec.factor) +
                        " exceeds dimension size " + std::to_string(n));
        return std::nullopt;
    }
    if (spec.scheme == Scheme::Cyclic) {
        lay.factor = spec.factor;
        lay.chunk = (n + spec.factor - 1) / spec.factor;
    } else {
        lay.chunk = (n + spec.factor - 1) / spec.factor;
        lay.factor = (n + lay.chunk - 1) / lay.chunk;  // effective banks
    }
    return lay;
}

namespace {

struct Rewriter {
    Module& m;
    const BankLayout& lay;
    Diagnostics& diags;
    int counter = 0;

    Value bank_base(int64_t k) const {
        return Value::global(lay.bank_name(k), Types::address(lay.bank_type(k)));
    }

    // Rewrite a gep in place for a known bank/local.
    void retarget(Instruction& gep, int64_t bank, const Value& local) const {
        gep.operands[0] = bank_base(bank);
        gep.pointee = lay.bank_type(bank);
        gep.folded_offset.reset();  // recomputed by the next simplify
        size_t at = static_cast<size_t>(lay.dim) + 2;
        if (lay.scheme == Scheme::Complete)
            gep.operands.erase(gep.operands.begin() + static_cast<long>(at));
        else
            gep.operands[at] = local;
    }
};

void rename_phi_edges(Function& f, const std::string& from,
                      const std::string& to,
                      const std::unordered_set<std::string>& only_blocks) {
    for (Block& b : f.blocks) {
        if (!only_blocks.empty() && !only_blocks.count(b.label)) continue;
        for (Instruction& inst : b.insts) {
            if (inst.op != Opcode::Phi) break;
            for (std::string& lbl : inst.labels)
                if (lbl == from) lbl = to;
        }
    }
}

}  // namespace

bool apply_partition(Module& m, const PartitionSpec& spec, Diagnostics& diags) {
    if (m.find_global(spec.array + "_p0")) {
        diags.error("partition-double", global_loc(spec.array),
                    "'" + spec.array + "' is already partitioned");
        return false;
    }
    Global* g = m.find_global(spec.array);
    if (!g) {
        diags.error("partition-array-not-found", global_loc(spec.array),
                    "no global named '" + spec.array + "'");
        return false;
    }
    auto lay_opt = compute_layout(g->type, spec, diags);
    if (!lay_opt) return false;
    const BankLayout lay = *lay_opt;
    const size_t dim_at = static_cast<size_t>(lay.dim) + 2;

    // Pre-flight: every reference to the array must be a gep we know how
    // to retarget, and every gep result may feed only load/store
    // addresses. Nothing is mutated until this is known to hold.
    for (const Function& f : m.functions) {
        std::unordered_set<std::string> gep_results;
        for (const Block& b : f.blocks)
            for (const Instruction& inst : b.insts)
                for (size_t oi = 0; oi < inst.operands.size(); oi++) {
                    const Value& v = inst.operands[oi];
                    if (v.kind == Value::Kind::Global && v.name == spec.array) {
                        Location loc;
                        loc.function = f.name;
                        loc.block = b.label;
                        if (inst.op != Opcode::Gep || oi != 0) {
                            diags.error("partition-escape", loc,
                                        "'" + spec.array +
                                            "' is used outside gep addressing");
                            return false;
                        }
                        if (inst.operands.size() < dim_at + 1) {
                            diags.error("partition-escape", loc,
                                        "gep does not reach dimension " +
                                            std::to_string(lay.dim) + " of '" +
                                            spec.array + "'");
                            return false;
                        }
                        if (inst.operands[1].kind != Value::Kind::ConstInt ||
                            inst.operands[1].ival != 0) {
                            diags.error("partition-escape", loc,
                                        "gep with a non-zero leading index");
                            return false;
                        }
                        gep_results.insert(inst.result);
                    }
                }
        for (const Block& b : f.blocks)
            for (const Instruction& inst : b.insts)
                for (size_t oi = 0; oi < inst.operands.size(); oi++) {
                    const Value& v = inst.operands[oi];
                    if (v.kind != Value::Kind::Local || !gep_results.count(v.name))
                        continue;
                    bool ok = (inst.op == Opcode::Load && oi == 0) ||
                              (inst.op == Opcode::Store && oi == 1);
                    if (!ok) {
                        Location loc;
                        loc.function = f.name;
                        loc.block = b.label;
                        diags.error("partition-escape", loc,
                                    "address of '" + spec.array +
                                        "' escapes into " +
                                        opcode_name(inst.op));
                        return false;
                    }
                }
    }

    // Bank globals, with the initializer scattered per the index mapping.
    {
        std::vector<Global> banks(static_cast<size_t>(lay.bank_count()));
        for (int64_t k = 0; k < lay.bank_count(); k++) {
            Global& nb = banks[static_cast<size_t>(k)];
            nb.name = lay.bank_name(k);
            nb.type = lay.bank_type(k);
            nb.align = g->align;
            nb.internal = g->internal;
            nb.init.zero = true;
        }
        if (!g->init.zero) {
            for (auto& nb : banks) {
                nb.init.zero = false;
                nb.init.elems.assign(nb.type->flat_size(),
                                     zero_value(lay.scalar));
            }
            for (size_t i = 0; i < g->init.elems.size(); i++) {
                auto [bank, local] = lay.flat_map(static_cast<int64_t>(i));
                banks[static_cast<size_t>(bank)]
                    .init.elems[static_cast<size_t>(local)] = g->init.elems[i];
            }
        }
        size_t at = static_cast<size_t>(g - m.globals.data());
        m.globals.erase(m.globals.begin() + static_cast<long>(at));
        m.globals.insert(m.globals.begin() + static_cast<long>(at),
                         banks.begin(), banks.end());
        g = nullptr;  // container shifted
    }

    Rewriter rw{m, lay, diags, 0};

    for (Function& f : m.functions) {
        // Collect this function's geps on the array before rewriting.
        std::unordered_map<std::string, Instruction> geps;
        for (Block& b : f.blocks)
            for (Instruction& inst : b.insts)
                if (inst.op == Opcode::Gep &&
                    inst.operands[0].kind == Value::Kind::Global &&
                    inst.operands[0].name == spec.array)
                    geps.emplace(inst.result, inst);

        // Constant indices: retarget in place.
        for (Block& b : f.blocks)
            for (Instruction& inst : b.insts) {
                if (inst.op != Opcode::Gep) continue;
                if (inst.operands[0].kind != Value::Kind::Global ||
                    inst.operands[0].name != spec.array)
                    continue;
                const Value& iv = inst.operands[dim_at];
                if (iv.kind != Value::Kind::ConstInt) continue;
                auto [bank, local] = lay.map(iv.ival);
                rw.retarget(inst, bank, Value::const_int(local, iv.type));
            }

        // Dynamic indices: one dispatch ladder per load/store site. Block
        // surgery invalidates iterators, so restart the scan after each.
        for (bool again = true; again;) {
            again = false;
            for (size_t bi = 0; bi < f.blocks.size() && !again; bi++) {
                Block& b = f.blocks[bi];
                for (size_t ii = 0; ii < b.insts.size(); ii++) {
                    Instruction& inst = b.insts[ii];
                    size_t ptr_at;
                    if (inst.op == Opcode::Load) ptr_at = 0;
                    else if (inst.op == Opcode::Store) ptr_at = 1;
                    else continue;
                    const Value& ptr = inst.operands[ptr_at];
                    if (ptr.kind != Value::Kind::Local || !geps.count(ptr.name))
                        continue;
                    const Instruction& gep = geps.at(ptr.name);
                    if (gep.operands[dim_at].kind == Value::Kind::ConstInt)
                        continue;  // already retargeted in place

                    // ---- build the ladder ----
                    const bool is_load = inst.op == Opcode::Load;
                    const Value idx = gep.operands[dim_at];
                    const std::string tag =
                        lay.array + ".bd" + std::to_string(rw.counter++);
                    const std::string tail_label = b.label + "." + tag + ".t";
                    const int64_t nbanks = lay.bank_count();

                    Value bank_v = idx, local_v;
                    std::vector<Instruction> head_extra;
                    if (lay.scheme != Scheme::Complete) {
                        Instruction bi_inst;
                        bi_inst.op = lay.scheme == Scheme::Cyclic ? Opcode::SRem
                                                                  : Opcode::SDiv;
                        bi_inst.result = tag + ".b";
                        bi_inst.type = idx.type;
                        int64_t div = lay.scheme == Scheme::Cyclic ? lay.factor
                                                                   : lay.chunk;
                        bi_inst.operands = {idx, Value::const_int(div, idx.type)};
                        Instruction li_inst;
                        li_inst.op = lay.scheme == Scheme::Cyclic ? Opcode::SDiv
                                                                  : Opcode::SRem;
                        li_inst.result = tag + ".l";
                        li_inst.type = idx.type;
                        li_inst.operands = {idx, Value::const_int(div, idx.type)};
                        head_extra = {bi_inst, li_inst};
                        bank_v = Value::local(bi_inst.result, idx.type);
                        local_v = Value::local(li_inst.result, idx.type);
                    }

                    Instruction access = inst;  // copy before surgery
                    Block tail;
                    tail.label = tail_label;
                    tail.insts.assign(b.insts.begin() + static_cast<long>(ii) + 1,
                                      b.insts.end());
                    b.insts.erase(b.insts.begin() + static_cast<long>(ii),
                                  b.insts.end());
                    for (Instruction& he : head_extra) b.insts.push_back(he);

                    std::vector<Block> arms;
                    std::vector<std::string> arm_labels, check_labels;
                    for (int64_t k = 0; k < nbanks; k++)
                        arm_labels.push_back(b.label + "." + tag + ".a" +
                                             std::to_string(k));
                    for (int64_t k = 1; k < nbanks; k++)
                        check_labels.push_back(b.label + "." + tag + ".c" +
                                               std::to_string(k));

                    auto emit_check = [&](Block& into, int64_t k) {
                        Instruction cmp;
                        cmp.op = Opcode::ICmp;
                        cmp.pred = Cmp::Eq;
                        cmp.result = tag + ".c" + std::to_string(k);
                        cmp.type = Types::i1();
                        cmp.operands = {bank_v, Value::const_int(k, idx.type)};
                        Instruction br;
                        br.op = Opcode::Br;
                        br.type = Types::void_ty();
                        br.operands = {Value::local(cmp.result, Types::i1())};
                        br.labels = {arm_labels[static_cast<size_t>(k)],
                                     k + 2 < nbanks
                                         ? check_labels[static_cast<size_t>(k)]
                                         : arm_labels[static_cast<size_t>(k + 1)]};
                        into.insts.push_back(cmp);
                        into.insts.push_back(br);
                    };

                    if (nbanks == 1) {
                        Instruction br;
                        br.op = Opcode::Br;
                        br.type = Types::void_ty();
                        br.labels = {arm_labels[0]};
                        b.insts.push_back(br);
                    } else {
                        emit_check(b, 0);
                    }
                    for (int64_t k = 1; k + 1 < nbanks; k++) {
                        Block cb;
                        cb.label = check_labels[static_cast<size_t>(k - 1)];
                        emit_check(cb, k);
                        arms.push_back(std::move(cb));
                    }

                    Instruction merge;
                    if (is_load && !access.result.empty()) {
                        merge.op = Opcode::Phi;
                        merge.result = access.result;
                        merge.type = access.type;
                    }
                    for (int64_t k = 0; k < nbanks; k++) {
                        Block arm;
                        arm.label = arm_labels[static_cast<size_t>(k)];
                        Instruction ag = gep;
                        ag.result = tag + ".p" + std::to_string(k);
                        rw.retarget(ag, k,
                                    lay.scheme == Scheme::Complete
                                        ? Value()
                                        : local_v);
                        Instruction acc = access;
                        acc.operands[ptr_at] =
                            Value::local(ag.result, Types::address(acc.pointee));
                        if (is_load && !access.result.empty()) {
                            acc.result = tag + ".v" + std::to_string(k);
                            merge.operands.push_back(
                                Value::local(acc.result, acc.type));
                            merge.labels.push_back(arm.label);
                        }
                        Instruction br;
                        br.op = Opcode::Br;
                        br.type = Types::void_ty();
                        br.labels = {tail_label};
                        arm.insts = {ag, acc, br};
                        arms.push_back(std::move(arm));
                    }
                    if (!merge.result.empty())
                        tail.insts.insert(tail.insts.begin(), merge);

                    // Edges that left the original block now leave the tail.
                    std::unordered_set<std::string> succs;
                    if (const Instruction* t = tail.terminator())
                        for (const std::string& lbl : t->labels)
                            succs.insert(lbl);
                    rename_phi_edges(f, b.label, tail_label, succs);

                    arms.push_back(std::move(tail));
                    f.blocks.insert(f.blocks.begin() + static_cast<long>(bi) + 1,
                                    arms.begin(), arms.end());
                    again = true;
                    break;
                }
            }
        }

        // Original geps with dynamic indices are now unreferenced.
        std::unordered_map<std::string, int> uses;
        for (const Block& b : f.blocks)
            for (const Instruction& inst : b.insts)
                for (const Value& v : inst.operands)
                    if (v.kind == Value::Kind::Local) uses[v.name]++;
        for (Block& b : f.blocks) {
            std::vector<Instruction> kept;
            for (Instruction& inst : b.insts) {
                bool stale = inst.op == Opcode::Gep &&
                             inst.operands[0].kind == Value::Kind::Global &&
                             inst.operands[0].name == spec.array;
                if (stale && uses[inst.result] == 0) continue;
                kept.push_back(std::move(inst));
            }
            b.insts = std::move(kept);
        }
    }

    Diagnostics post = validate(m);
    if (post.has_errors()) {
        diags.append(post);
        return false;
    }
    return true;
}

bool slice_bank(MemoryImage& img, const BankLayout& lay) {
    auto it = img.banks.find(lay.array);
    std::vector<Word> src;
    uint64_t total = 1;
    for (int64_t d : lay.dims) total *= static_cast<uint64_t>(d);
    if (it != img.banks.end()) {
        src = it->second;
        if (src.size() != total) return false;
        img.banks.erase(it);
    } else {
        src.assign(total, zero_word(lay.scalar));
    }
    std::vector<std::vector<Word>> banks(static_cast<size_t>(lay.bank_count()));
    for (int64_t k = 0; k < lay.bank_count(); k++)
        banks[static_cast<size_t>(k)].assign(lay.bank_flat_size(k),
                                             zero_word(lay.scalar));
    for (uint64_t i = 0; i < total; i++) {
        auto [bank, local] = lay.flat_map(static_cast<int64_t>(i));
        banks[static_cast<size_t>(bank)][static_cast<size_t>(local)] = src[i];
    }
    for (int64_t k = 0; k < lay.bank_count(); k++)
        img.banks[lay.bank_name(k)] = std::move(banks[static_cast<size_t>(k)]);
    return true;
}

bool unslice_bank(MemoryImage& img, const BankLayout& lay) {
    uint64_t total = 1;
    for (int64_t d : lay.dims) total *= static_cast<uint64_t>(d);
    std::vector<std::vector<Word>> banks(static_cast<size_t>(lay.bank_count()));
    for (int64_t k = 0; k < lay.bank_count(); k++) {
        auto it = img.banks.find(lay.bank_name(k));
        if (it != img.banks.end()) {
            if (it->second.size() != lay.bank_flat_size(k)) return false;
            banks[static_cast<size_t>(k)] = std::move(it->second);
            img.banks.erase(it);
        } else {
            banks[static_cast<size_t>(k)].assign(lay.bank_flat_size(k),
                                                 zero_word(lay.scalar));
        }
    }
    std::vector<Word> out(total, zero_word(lay.scalar));
    for (uint64_t i = 0; i < total; i++) {
        auto [bank, local] = lay.flat_map(static_cast<int64_t>(i));
        out[i] = banks[static_cast<size_t>(bank)][static_cast<size_t>(local)];
    }
    img.banks[lay.array] = std::move(out);
    return true;
}

}  // namespace lf
