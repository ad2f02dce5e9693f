// End-to-end acceptance checks. Each check prints exactly one
// [PASS]/[FAIL] line; the process exits nonzero if any check fails.
// These run the public entry points only -- no test framework, no
// internal shortcuts -- so a green run means the shipped toolchain
// behaves as promised.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lfir/bench.hpp"
#include "lfir/diagnostics.hpp"
#include "lfir/image.hpp"
#include "lfir/ir.hpp"
#include "lfir/mif.hpp"
#include "lfir/parser.hpp"
#include "lfir/partition.hpp"
#include "lfir/printer.hpp"
#include "lfir/schedule.hpp"
#include "lfir/transform.hpp"
#include "lfir/type.hpp"
#include "lfir/validate.hpp"

#include "bnb.hpp"

namespace {

using namespace lf;

std::string brief(const Diagnostics& d) {
    std::string out;
    size_t shown = 0;
    for (const auto& item : d.items()) {
        if (shown++ == 3) { out += " ..."; break; }
        if (!out.empty()) out += "; ";
        out += item.to_string();
    }
    return out.empty() ? "no diagnostics" : out;
}

Module parse_or_throw(const std::string& text) {
    Diagnostics d;
    auto m = parse_module(text, d);
    if (!m || d.has_errors()) throw std::runtime_error("parse: " + brief(d));
    Diagnostics v = validate(*m);
    if (v.has_errors()) throw std::runtime_error("validate: " + brief(v));
    return *m;
}

Module pipeline_or_throw(const Module& m, const PassConfig& cfg) {
    Diagnostics d;
    auto out = run_pipeline(m, cfg, d);
    if (!out) throw std::runtime_error("pipeline: " + brief(d));
    return *out;
}

Module generate_or_throw(const bench::BenchmarkCase& c) {
    Diagnostics d;
    auto m = bench::generate(c, d);
    if (!m) throw std::runtime_error(c.name + ": generate: " + brief(d));
    return *m;
}

// ---------------------------------------------------------------------------
// 1. Restructuring a role-parameter module yields the self-contained form:
//    zero-argument entry, zero-initialized globals, volatile scalar access.

const char kRolePre[] = R"(define void @main(i8** %params, i8** %temps, i8** %retval) {
  %0 = bitcast i8** %params to [2 x float]**
  %arg0 = load [2 x float]** %0, align 8
  %1 = load i8** %temps, align 8
  %2 = getelementptr inbounds [2 x float]* %arg0, i64 0, i64 0
  %3 = getelementptr inbounds [2 x float]* %arg0, i64 0, i64 1
  %4 = load float* %2, align 8
  %5 = load float* %3, align 8
  ret void
}
)";

const char kRolePost[] = R"(@arg0 = global [2 x float] zeroinitializer, align 8

define void @main() {
  %0 = getelementptr inbounds [2 x float]* @arg0, i64 0, i64 0
  %1 = getelementptr inbounds [2 x float]* @arg0, i64 0, i64 1
  %2 = load volatile float* %0, align 8
  %3 = load volatile float* %1, align 8
  ret void
}
)";

bool c01_restructure(std::string& why) {
    Module got = pipeline_or_throw(parse_or_throw(kRolePre), PassConfig{});
    Module want = parse_or_throw(kRolePost);
    if (!structurally_equal(got, want)) {
        why = "transformed module differs from the expected form:\n" +
              print_module(got);
        return false;
    }
    const Function* f = got.find_function("main");
    if (!f || !f->params.empty()) { why = "entry still takes parameters"; return false; }
    const Global* g = got.find_global("arg0");
    if (!g || g->type != Types::array(Types::f32(), 2) || !g->init.zero) {
        why = "@arg0 is not a zero-initialized [2 x float]";
        return false;
    }
    int volatile_loads = 0;
    for (const auto& b : f->blocks)
        for (const auto& i : b.insts)
            if (i.op == Opcode::Load && i.is_volatile) ++volatile_loads;
    if (volatile_loads != 2) { why = "expected exactly two volatile loads"; return false; }
    return true;
}

// ---------------------------------------------------------------------------
// 2. The benchmark suite agrees with the independent golden models on
//    three random input images per case at rel 1e-5 / abs 1e-7.

const char* kCoreCases[] = {
    "vecmul_a",  "vecmul_b", "vecmul_b_u", "dense_a",  "dense_b",
    "softmax_a", "softmax_b", "softmax_b_u", "conv2d_a", "conv2d_a_u",
    "conv2d_b",  "maxp_a",   "maxp_b",     "maxp_b_u", "thxprlsg",
};

bool c02_suite_oracle(std::string& why) {
    bench::SuiteOptions opt;  // 3 images, rel 1e-5, abs 1e-7
    auto results = bench::run_suite(opt);
    for (const char* name : kCoreCases) {
        const bench::CaseResult* r = nullptr;
        for (const auto& cr : results)
            if (cr.name == name) { r = &cr; break; }
        if (!r) { why = std::string(name) + ": missing from suite"; return false; }
        if (!r->pass) {
            why = std::string(name) + ": " + r->detail;
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 3. Inputs are generated, not baked in: each case sees at least two
//    distinct images, and every case still validates on both.

bool c03_distinct_images(std::string& why) {
    bench::SuiteOptions opt;
    opt.images = 2;
    for (const auto& c : bench::registry()) {
        auto a = bench::random_inputs(c, opt.seed, 0);
        auto b = bench::random_inputs(c, opt.seed, 1);
        if (a == b) { why = c.name + ": images 0 and 1 identical"; return false; }
    }
    for (const auto& r : bench::run_suite(opt)) {
        if (!r.pass) { why = r.name + ": " + r.detail; return false; }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 4. Banking pays: the unrolled vector product's makespan strictly
//    shrinks as its arrays are cyclically split 1 -> 2 -> 4 ways.

int64_t vecmul_makespan(int64_t banks) {
    const bench::BenchmarkCase* c = bench::find_case("vecmul_a");
    if (!c) throw std::runtime_error("vecmul_a not registered");
    PassConfig cfg;
    cfg.unroll_threshold = 1'000'000;  // flatten the loop completely
    Module m = pipeline_or_throw(generate_or_throw(*c), cfg);
    if (banks > 1) {
        for (const char* arr : {"arg0", "arg1", "ret0"}) {
            Diagnostics d;
            PartitionSpec spec;
            spec.array = arr;
            spec.scheme = Scheme::Cyclic;
            spec.factor = banks;
            if (!apply_partition(m, spec, d))
                throw std::runtime_error(std::string(arr) + ": " + brief(d));
        }
    }
    ResourceModel r;
    auto sched = schedule_module(m, r);
    int64_t worst = 0;
    for (const auto& b : sched.blocks) worst = std::max(worst, b.latency);
    return worst;
}

bool c04_banking_makespan(std::string& why) {
    int64_t m1 = vecmul_makespan(1);
    int64_t m2 = vecmul_makespan(2);
    int64_t m4 = vecmul_makespan(4);
    if (!(m1 > m2 && m2 > m4 && m4 > 0)) {
        why = "makespans not strictly decreasing: " + std::to_string(m1) + " / " +
              std::to_string(m2) + " / " + std::to_string(m4);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 5. Straight-line variants beat their rolled counterparts on cycles,
//    for all four rolled/unrolled pairs in the registry.

bool c05_unrolled_cheaper(std::string& why) {
    bench::SuiteOptions opt;
    opt.images = 1;
    auto cycles_of = [&](const char* name) -> int64_t {
        const bench::BenchmarkCase* c = bench::find_case(name);
        if (!c) throw std::runtime_error(std::string(name) + " not registered");
        auto r = bench::run_case(*c, opt);
        if (!r.pass) throw std::runtime_error(r.name + ": " + r.detail);
        return r.cycles;
    };
    const std::pair<const char*, const char*> pairs[] = {
        {"vecmul_b_u", "vecmul_b"},
        {"softmax_b_u", "softmax_b"},
        {"conv2d_a_u", "conv2d_a"},
        {"maxp_b_u", "maxp_b"},
    };
    for (auto [fast, slow] : pairs) {
        int64_t cf = cycles_of(fast), cs = cycles_of(slow);
        if (!(cf > 0 && cf < cs)) {
            why = std::string(fast) + "=" + std::to_string(cf) + " not below " +
                  slow + "=" + std::to_string(cs);
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 6. Raising the unroll threshold on a 32x32 convolution strictly
//    reduces counted cycles against the rolled default.

bool c06_threshold_unroll(std::string& why) {
    bench::BenchmarkCase c;
    c.name = "conv2d_acc";
    c.kind = "conv2d";
    c.params.h = 32;
    c.params.w = 32;
    c.params.channels = 2;
    Module base = generate_or_throw(c);

    PassConfig rolled;  // default threshold keeps every loop intact
    PassConfig raised;
    raised.unroll_threshold = 300;

    Module mr = pipeline_or_throw(base, rolled);
    Module mu = pipeline_or_throw(base, raised);
    if (mu.inst_count() <= mr.inst_count()) {
        why = "raised threshold did not unroll anything";
        return false;
    }

    ResourceModel r;
    auto cycles = [&](const Module& m) -> int64_t {
        Diagnostics d;
        auto n = count_cycles(m, r, MemoryImage::for_module(m), d);
        if (!n) throw std::runtime_error("count_cycles: " + brief(d));
        return *n;
    };
    int64_t base_cycles = cycles(mr);
    int64_t fast_cycles = cycles(mu);
    if (!(fast_cycles > 0 && fast_cycles < base_cycles)) {
        why = "unrolled " + std::to_string(fast_cycles) + " not below rolled " +
              std::to_string(base_cycles);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// 7. Every partition layout is a bijection: all schemes, lengths up to
//    4096, factors 2..min(N,64). Verified element by element.

bool layout_bijective(const BankLayout& lay, int64_t n,
                      std::vector<int32_t>& stamp, int32_t gen,
                      std::string& why) {
    const int64_t banks = lay.bank_count();
    std::vector<int64_t> off(static_cast<size_t>(banks) + 1, 0);
    for (int64_t k = 0; k < banks; ++k) {
        int64_t sz = lay.bank_dim_size(k);
        if (sz < 0) { why = "negative bank size"; return false; }
        off[static_cast<size_t>(k) + 1] = off[static_cast<size_t>(k)] + sz;
    }
    if (off[static_cast<size_t>(banks)] != n) {
        why = "bank sizes sum to " + std::to_string(off[static_cast<size_t>(banks)]) +
              ", want " + std::to_string(n);
        return false;
    }
    for (int64_t i = 0; i < n; ++i) {
        auto [b, local] = lay.map(i);
        if (b < 0 || b >= banks || local < 0 || local >= lay.bank_dim_size(b)) {
            why = "index " + std::to_string(i) + " maps out of range";
            return false;
        }
        size_t slot = static_cast<size_t>(off[static_cast<size_t>(b)] + local);
        if (stamp[slot] == gen) {
            why = "index " + std::to_string(i) + " collides in bank " +
                  std::to_string(b);
            return false;
        }
        stamp[slot] = gen;
    }
    return true;
}

bool c07_partition_bijection(std::string& why) {
    Diagnostics d;
    std::vector<int32_t> stamp(4096, -1);
    int32_t gen = 0;
    for (int64_t n = 1; n <= 4096; ++n) {
        const Type* arr = Types::array(Types::f32(), static_cast<uint64_t>(n));
        auto try_one = [&](Scheme s, int64_t f) -> bool {
            PartitionSpec spec;
            spec.array = "a";
            spec.scheme = s;
            spec.factor = f;
            auto lay = compute_layout(arr, spec, d);
            if (!lay) {
                why = "n=" + std::to_string(n) + " f=" + std::to_string(f) +
                      ": " + brief(d);
                return false;
            }
            if (!layout_bijective(*lay, n, stamp, ++gen, why)) {
                why = "n=" + std::to_string(n) + " f=" + std::to_string(f) +
                      " scheme=" + std::to_string(static_cast<int>(s)) + ": " + why;
                return false;
            }
            return true;
        };
        if (!try_one(Scheme::Complete, 2)) return false;
        for (int64_t f = 2; f <= std::min<int64_t>(n, 64); ++f) {
            if (!try_one(Scheme::Block, f)) return false;
            if (!try_one(Scheme::Cyclic, f)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 8. Schedules are legal and optimal where provable: every suite
//    schedule re-checks clean, and on every block of at most 64
//    instructions the list schedule matches branch-and-bound.

bool c08_schedule_quality(std::string& why) {
    ResourceModel r;
    PassConfig cfg;
    for (const auto& c : bench::registry()) {
        Module m = pipeline_or_throw(generate_or_throw(c), cfg);
        auto sched = schedule_module(m, r);
        Diagnostics chk = check_schedule(m, sched, r);
        if (chk.has_errors()) {
            why = c.name + ": schedule re-check: " + brief(chk);
            return false;
        }
        for (const auto& f : m.functions) {
            for (const auto& b : f.blocks) {
                if (b.insts.empty() || b.insts.size() > 64) continue;
                const BlockSchedule* bs = sched.find(f.name, b.label);
                if (!bs) { why = c.name + ": missing block schedule"; return false; }
                uint64_t expansions = 0;
                bool exhausted = false;
                int64_t best =
                    lftest::bnb_optimal_makespan(f, b, r, &expansions, &exhausted);
                if (exhausted) {
                    why = c.name + "/" + b.label + ": search budget exhausted";
                    return false;
                }
                if (best != bs->latency) {
                    why = c.name + "/" + b.label + ": list " +
                          std::to_string(bs->latency) + " vs optimal " +
                          std::to_string(best);
                    return false;
                }
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 9. Exact round-trips: text for every generated, transformed, and
//    partitioned module; MIF payloads at widths 1, 32, and 64.

bool roundtrip_module(const Module& m, const std::string& tag, std::string& why) {
    std::string once = print_module(m);
    Module back = parse_or_throw(once);
    if (!structurally_equal(back, m)) {
        why = tag + ": reparse is not structurally identical";
        return false;
    }
    if (print_module(back) != once) {
        why = tag + ": second print differs";
        return false;
    }
    return true;
}

bool c09_roundtrips(std::string& why) {
    PassConfig cfg;
    for (const auto& c : bench::registry()) {
        Module raw = generate_or_throw(c);
        if (!roundtrip_module(raw, c.name + " (raw)", why)) return false;
        Module cooked = pipeline_or_throw(raw, cfg);
        if (!roundtrip_module(cooked, c.name + " (transformed)", why)) return false;
    }
    // A partitioned module exercises bank globals and dispatch ladders.
    Module part =
        pipeline_or_throw(generate_or_throw(*bench::find_case("vecmul_a")), cfg);
    Diagnostics d;
    PartitionSpec cyc;
    cyc.array = "arg0";
    cyc.scheme = Scheme::Cyclic;
    cyc.factor = 2;
    PartitionSpec blk;
    blk.array = "arg1";
    blk.scheme = Scheme::Block;
    blk.factor = 2;
    if (!apply_partition(part, cyc, d) || !apply_partition(part, blk, d)) {
        why = "partition for round-trip failed: " + brief(d);
        return false;
    }
    if (!roundtrip_module(part, "vecmul_a (partitioned)", why)) return false;

    std::mt19937_64 rng(7);
    for (int width : {1, 32, 64}) {
        MifImage img;
        img.width = width;
        img.words.resize(257);
        uint64_t mask = width == 64 ? ~0ull : ((1ull << width) - 1);
        for (auto& w : img.words) w = rng() & mask;
        std::string text = store_mif(img);
        Diagnostics md;
        auto back = load_mif(text, md);
        if (!back || back->width != img.width || back->words != img.words) {
            why = "width " + std::to_string(width) + ": payload not bit-exact: " +
                  brief(md);
            return false;
        }
        if (store_mif(*back) != text) {
            why = "width " + std::to_string(width) + ": second store differs";
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// 10. Volatile accesses pin I/O: a dead volatile load survives
//     simplification while its plain twin is removed.

const char kDeadVolatile[] = R"(@in = global [1 x float] zeroinitializer, align 8

define void @main() {
  %p = getelementptr inbounds [1 x float]* @in, i64 0, i64 0
  %v = load volatile float* %p, align 4
  ret void
}
)";

const char kDeadPlain[] = R"(@in = global [1 x float] zeroinitializer, align 8

define void @main() {
  %p = getelementptr inbounds [1 x float]* @in, i64 0, i64 0
  %v = load float* %p, align 4
  ret void
}
)";

int count_loads(const Module& m) {
    int n = 0;
    for (const auto& f : m.functions)
        for (const auto& b : f.blocks)
            for (const auto& i : b.insts)
                if (i.op == Opcode::Load) ++n;
    return n;
}

bool c10_volatile_pins(std::string& why) {
    Module keep = parse_or_throw(kDeadVolatile);
    simplify(keep);
    if (count_loads(keep) != 1) {
        why = "dead volatile load was removed";
        return false;
    }
    Module drop = parse_or_throw(kDeadPlain);
    simplify(drop);
    if (count_loads(drop) != 0) {
        why = "dead plain load survived";
        return false;
    }
    return true;
}

struct Check {
    int id;
    const char* label;
    bool (*fn)(std::string&);
};

const Check kChecks[] = {
    {1, "role-parameter entry restructures to the self-contained form", c01_restructure},
    {2, "benchmark suite matches golden models on three images", c02_suite_oracle},
    {3, "random images are distinct and validated per case", c03_distinct_images},
    {4, "makespan strictly improves with banking factor", c04_banking_makespan},
    {5, "unrolled variants cost strictly fewer cycles than rolled", c05_unrolled_cheaper},
    {6, "raised unroll threshold strictly reduces conv2d cycles", c06_threshold_unroll},
    {7, "partition index maps are bijective across schemes", c07_partition_bijection},
    {8, "schedules re-check clean and match branch-and-bound optima", c08_schedule_quality},
    {9, "text and MIF round-trips are exact", c09_roundtrips},
    {10, "volatile loads survive simplification, dead plain loads do not", c10_volatile_pins},
};

}  // namespace

int main() {
    bool all_ok = true;
    for (const auto& c : kChecks) {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        std::string why;
        try {
            ok = c.fn(why);
        } catch (const std::exception& e) {
            why = e.what();
        } catch (...) {
            why = "unexpected exception";
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (ok) {
            std::printf("[PASS] %2d %s (%.2fs)\n", c.id, c.label, secs);
        } else {
            std::printf("[FAIL] %2d %s (%.2fs) -- %s\n", c.id, c.label, secs,
                        why.c_str());
            all_ok = false;
        }
        std::fflush(stdout);
    }
    return all_ok ? 0 : 1;
}
