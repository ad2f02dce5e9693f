#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lfir/diagnostics.hpp"
#include "lfir/ir.hpp"
#include "lfir/partition.hpp"
#include "lfir/schedule.hpp"
#include "lfir/transform.hpp"

namespace lf::bench {

/// Shape knobs. Only the fields a kind reads are meaningful: n for the
/// vector kernels, h/w/channels for the image kernels.
struct CaseParams {
    int64_t n = 0;
    int64_t h = 0, w = 0;
    int64_t channels = 2;   // conv2d output channels
    bool unrolled = false;  // emit straight-line instead of loops
};

struct BenchmarkCase {
    std::string name;
    std::string kind;  // vecmul | dense | softmax | conv2d | maxp | thxprlsg | mnist_mlp
    CaseParams params;
};

/// The canonical micro-benchmark registry (15 cases plus the mnist_mlp
/// composite), in report order.
const std::vector<BenchmarkCase>& registry();
const BenchmarkCase* find_case(const std::string& name);

/// Emit the case as a role-parameter module (inputs behind %params slots,
/// scratch behind %temps, result behind %retval). The result parses and
/// validates; errors (bad shape parameters) are reported instead.
std::optional<Module> generate(const BenchmarkCase& c, Diagnostics& diags);

/// Flat element counts of the case's input buffers, in slot order, and of
/// its single output buffer.
std::vector<int64_t> input_sizes(const BenchmarkCase& c);
int64_t output_size(const BenchmarkCase& c);

/// Independent scalar reference in F32, plain nested loops over flat
/// row-major arrays. Throws std::invalid_argument on shape mismatch.
std::vector<float> golden_run(const BenchmarkCase& c,
                              const std::vector<std::vector<float>>& inputs);

/// Deterministic per-case input set: uniform [-1,1) floats seeded from the
/// case name, the suite seed, and the image ordinal. Softmax-bearing cases
/// stretch every second image to [-20,20) to exercise stabilization.
std::vector<std::vector<float>> random_inputs(const BenchmarkCase& c,
                                              uint32_t seed, int image);

struct CaseResult {
    std::string name;
    bool pass = false;
    double worst_rel_err = 0.0;
    int64_t cycles = -1;
    std::string detail;  // first failure reason, empty when pass
};

struct SuiteOptions {
    PassConfig pass_config;
    ResourceModel resources;
    std::vector<PartitionSpec> partitions;  // applied where the array exists
    int images = 3;
    uint32_t seed = 1;
    double rel_tol = 1e-5;
    double abs_tol = 1e-7;
    // Test hook: mutate a case's module after the pass pipeline (fault
    // injection for the suite's isolation guarantees).
    std::function<void(const std::string& name, Module& m)> post_pipeline_hook;
};

/// Generate, run the pass pipeline, partition, schedule (with legality
/// check), then compare `images` random runs against the golden model and
/// price the first one. Any stage error fails the case, never the suite.
CaseResult run_case(const BenchmarkCase& c, const SuiteOptions& opt);

/// Every registry case, in order, with per-case fault isolation.
std::vector<CaseResult> run_suite(const SuiteOptions& opt);

/// One `case=<name> status=pass|fail worst_rel_err=<e> cycles=<n>` line
/// per result.
std::string render_report(const std::vector<CaseResult>& results);

}  // namespace lf::bench
