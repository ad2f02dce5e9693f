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

enum class Scheme { Block, Cyclic, Complete };

const char* scheme_name(Scheme s);

/// What to split and how. `factor` is the requested bank count and is
/// ignored for complete partitioning; `dim` counts from the outermost
/// array dimension.
struct PartitionSpec {
    std::string array;
    Scheme scheme = Scheme::Cyclic;
    int64_t factor = 2;
    int64_t dim = 0;
};

/// CLI/config syntax: `<array>:<block|cyclic|complete>[:factor=<F>][:dim=<d>]`.
std::optional<PartitionSpec> parse_partition_spec(const std::string& text,
                                                  Diagnostics& diags);

/// The bank shapes and the index mapping for one partitioned array.
/// Block partitioning may produce fewer banks than requested when the
/// chunk rounding covers the dimension early; `bank_count()` is the
/// effective number.
struct BankLayout {
    Scheme scheme;
    int64_t factor = 0;     // effective bank count
    int64_t dim = 0;
    int64_t chunk = 0;      // block: ceil(N / requested factor)
    std::vector<int64_t> dims;       // original dimension sizes, outermost first
    const Type* scalar = nullptr;    // innermost element type
    std::string array;               // original global name

    int64_t bank_count() const { return factor; }
    int64_t dim_size() const { return dims[static_cast<size_t>(dim)]; }

    /// Index along `dim` -> (bank, local index along the shrunken dim).
    /// For complete partitioning the local index is always 0.
    std::pair<int64_t, int64_t> map(int64_t i) const;

    /// Elements along `dim` held by bank k (1 for complete).
    int64_t bank_dim_size(int64_t k) const;

    /// Row-major flat index in the original array -> (bank, row-major flat
    /// index inside that bank). Bijective over the original extent.
    std::pair<int64_t, int64_t> flat_map(int64_t flat) const;

    std::string bank_name(int64_t k) const;
    const Type* bank_type(int64_t k) const;
    uint64_t bank_flat_size(int64_t k) const;
};

/// Derive the layout for `spec` against an array type. Errors: non-array
/// type, dim out of range, factor < 2 (block/cyclic) or factor > dim size.
std::optional<BankLayout> compute_layout(const Type* array_type,
                                         const PartitionSpec& spec,
                                         Diagnostics& diags);

/// Replace the named global with its banks and rewrite every access.
/// Constant indices along the partitioned dim become direct bank
/// accesses; dynamic indices dispatch through a compare/branch ladder
/// (with a phi merge for loads). Volatile flags carry over. Fails (and
/// leaves the module untouched) when the array is missing, already
/// partitioned, the factor does not fit, or an access pattern is not
/// rewritable.
bool apply_partition(Module& m, const PartitionSpec& spec, Diagnostics& diags);

/// Move the `layout.array` bank of an image into per-bank entries
/// (original entry removed), or back. Banks missing from the image are
/// treated as zero-filled. Returns false when shapes do not line up.
bool slice_bank(MemoryImage& img, const BankLayout& layout);
bool unslice_bank(MemoryImage& img, const BankLayout& layout);

}  // namespace lf
