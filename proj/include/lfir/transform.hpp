#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lfir/diagnostics.hpp"
#include "lfir/ir.hpp"

namespace lf {

/// Knobs for run_pipeline. Immutable once built; share freely.
struct PassConfig {
    int64_t unroll_threshold = 20;   // max trip-count x body-size to fully unroll
    int64_t inline_threshold = 100;  // max callee instruction count to inline
    std::set<std::string> denylist = {"slp-vectorizer", "argpromotion", "licm"};
    std::vector<std::string> pipeline = {
        "restructure-signature", "check-legality", "inline-calls",
        "unroll-loops", "simplify"};
};

/// Rewrite a three-role entry (`void @main(i8** %params, i8** %temps,
/// i8** %retval)`) into standalone-hardware shape: zero-argument entry,
/// inputs as zero-initialized `@arg<k>` globals, the output as `@ret<k>`,
/// temporaries as internal `@tmp<k>` globals. Loads from input globals and
/// stores to output globals come back volatile; the argument-plumbing
/// prelude is dissolved and locals renumbered. Standalone entries pass
/// through untouched (idempotent). Returns false and reports when a role
/// buffer's size cannot be recovered or an argument escapes the known
/// addressing patterns.
bool restructure_signature(Module& m, Diagnostics& diags);

/// Hardware legality screen: one `unsupported-kernel` error per
/// vector-typed instruction or global and per call that reaches neither a
/// defined function nor a known intrinsic.
Diagnostics check_legality(const Module& m);

/// Fully unroll every natural counted loop whose trip count T and body
/// size B satisfy T*B <= threshold. Innermost loops go first so outer trip
/// products see the grown body. Loops with run-time trip counts, multiple
/// exits, or non-constant induction are left alone. Returns true when
/// anything changed.
bool unroll_loops(Module& m, int64_t threshold);

/// Inline every call to a non-recursive in-module callee of instruction
/// count <= threshold. Intrinsics and declared-only functions stay calls.
/// Returns true when anything changed.
bool inline_calls(Module& m, int64_t threshold);

/// Fixpoint cleanup: constant folding (integer ops wrap; division faults
/// are left to run time), branch and phi folding, unreachable-block
/// removal, block merging, dead-code elimination, and flat-offset
/// annotation of all-constant geps. Stores, calls to defined functions,
/// and volatile accesses are never removed. Idempotent. Returns true when
/// anything changed.
bool simplify(Module& m);

/// Names run_pipeline accepts, in no particular order.
std::vector<std::string> registered_passes();

/// Run cfg.pipeline over a copy of `m`. Denylisted pipeline entries are
/// skipped with a warning — except `licm`, which is permanently barred and
/// rejects the whole configuration. Unknown names reject. `check-legality`
/// failures abort. When `log` is given, each executed pass appends one
/// line `pass=<name> before=<n> after=<n>` (module instruction counts).
std::optional<Module> run_pipeline(const Module& m, const PassConfig& cfg,
                                   Diagnostics& diags,
                                   std::string* log = nullptr);

}  // namespace lf
