#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfir/diagnostics.hpp"
#include "lfir/image.hpp"

namespace lf {

/// Raw payload of one memory-initialization file: `depth` words of `width`
/// bits each, independent of any value interpretation.
struct MifImage {
    int width = 32;  // 1, 32, or 64
    std::vector<uint64_t> words;
};

/// Parse MIF text. Header lines DEPTH/WIDTH/ADDRESS_RADIX/DATA_RADIX in any
/// order, then `CONTENT BEGIN`, data lines `<addr> : <data>;` or
/// `[<lo>..<hi>] : <data>;`, then `END;`. `--` comments run to end of line.
/// Unlisted addresses stay zero. Errors: malformed header, unsupported
/// radix, data wider than WIDTH, address outside DEPTH.
std::optional<MifImage> load_mif(const std::string& text, Diagnostics& diags);

/// Canonical form: HEX radices, one zero-padded line per address.
/// load_mif(store_mif(x)) == x bit-exactly.
std::string store_mif(const MifImage& img);

/// Bridge a typed bank to/from raw MIF words.
MifImage mif_from_words(const std::vector<Word>& bank);
std::vector<Word> words_from_mif(const MifImage& img, Word::Tag tag);

}  // namespace lf
