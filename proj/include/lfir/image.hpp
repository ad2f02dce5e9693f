#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lfir/ir.hpp"

namespace lf {

/// One memory element. Integer tags are exact; F32 is IEEE-754 single.
struct Word {
    enum class Tag : uint8_t { I1, I32, I64, F32 };

    Tag tag = Tag::F32;
    int64_t i = 0;
    float f = 0.0f;

    static Word i1(bool v) { return {Tag::I1, v ? 1 : 0, 0.0f}; }
    static Word i32(int32_t v) { return {Tag::I32, v, 0.0f}; }
    static Word i64(int64_t v) { return {Tag::I64, v, 0.0f}; }
    static Word f32(float v) { return {Tag::F32, 0, v}; }

    /// Raw bit pattern at this tag's width (F32 = the 32 float bits).
    uint64_t bits() const;
    static Word from_bits(Tag tag, uint64_t bits);

    /// Element width in bits: 1, 32, or 64.
    int width() const;

    /// The tag for a scalar IR type (i1/i32/i64/float; i8 is out of dialect).
    static Tag tag_for(const Type* scalar);

    bool operator==(const Word& o) const;
};

/// Named banks of flat words — the interpreter's memory state and the unit
/// of MIF exchange. Nested arrays are flattened row-major.
struct MemoryImage {
    std::map<std::string, std::vector<Word>> banks;

    /// One zero/initializer-filled bank per module global.
    static MemoryImage for_module(const Module& m);

    std::vector<Word>* find(const std::string& name);
    const std::vector<Word>* find(const std::string& name) const;

    /// The sub-image holding only the named banks (missing names skipped).
    MemoryImage subset(const std::vector<std::string>& names) const;
};

/// Outcome of compare_images. `worst_rel_err` is scaled so that pass holds
/// exactly when worst_rel_err <= rel_tol: it is rel_tol times the largest
/// ratio |x-y| / (abs_tol + rel_tol*|y|) over all F32 elements.
struct CompareReport {
    bool pass = true;
    double worst_rel_err = 0.0;
    double worst_abs_err = 0.0;
    std::string worst_bank;
    size_t worst_index = 0;
    std::string message;  // set on shape/tag mismatch or integer mismatch

    std::string to_string() const;
};

/// Element-wise comparison: F32 passes iff |x-y| <= abs_tol + rel_tol*|y|
/// (y drawn from `want`); both-NaN passes; integers must match exactly.
CompareReport compare_images(const MemoryImage& got, const MemoryImage& want,
                             double rel_tol, double abs_tol);

}  // namespace lf
