#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lfir/diagnostics.hpp"
#include "lfir/image.hpp"
#include "lfir/ir.hpp"

namespace lf {

/// Ordered record of executed control flow, by module indices.
struct ExecTrace {
    std::vector<std::pair<int, int>> visits;  // (function index, block index)
    uint64_t steps = 0;
    uint64_t volatile_count = 0;

    uint64_t branch_transitions() const {
        return visits.empty() ? 0 : visits.size() - 1;
    }
    uint64_t visit_count(int fn, int block) const {
        uint64_t n = 0;
        for (const auto& [f, b] : visits)
            if (f == fn && b == block) n++;
        return n;
    }
};

struct RunResult {
    MemoryImage image;  // post-execution state of every data bank
    ExecTrace trace;
};

inline constexpr uint64_t kDefaultFuel = 100'000'000;

/// Entry functions shaped `void(i8** params, i8** temps, i8** retval)`
/// execute against synthetic role banks; standalone entries against module
/// globals.
bool is_three_role(const Function& f);

/// One discovered buffer behind a role-table slot: its logical bank name
/// ("arg<k>", "tmp<k>", "ret<k>") and its element array type.
struct RoleSlot {
    std::string bank;
    const Type* type = nullptr;
};

/// Scan a three-role entry for the slots it addresses and the array types
/// revealed by their bitcasts. Slots read but never typed are omitted.
/// Conflicting type evidence for one slot is an error.
std::vector<RoleSlot> scan_role_slots(const Function& f, Diagnostics& diags);

/// All banks run() will read or write for this module: module globals plus,
/// for a three-role entry, the role-slot banks. Zero/initializer-filled.
MemoryImage image_for(const Module& m, Diagnostics& diags);

/// Bank names holding the module's results: stored-to non-internal globals,
/// or ret<k> role banks for a three-role entry.
std::vector<std::string> output_banks(const Module& m);

/// Execute `entry` (empty = module entry function) against `img`. Banks the
/// module needs but `img` lacks start zeroed; extra banks are ignored.
/// Fails with a diagnostic on fuel exhaustion, out-of-bounds access,
/// division fault, or a call to an undefined non-intrinsic.
std::optional<RunResult> run(const Module& m, const std::string& entry,
                             const MemoryImage& img, uint64_t fuel,
                             Diagnostics& diags);

inline std::optional<RunResult> run(const Module& m, const MemoryImage& img,
                                    Diagnostics& diags) {
    return run(m, "", img, kDefaultFuel, diags);
}

}  // namespace lf
