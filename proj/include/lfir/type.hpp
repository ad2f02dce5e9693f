#pragma once

#include <cstdint>
#include <string>

namespace lf {

enum class TypeKind { Void, Int, Float, Array, Address, Vector };

/// Interned type node. Obtain instances through Types; pointer equality
/// is structural equality.
class Type {
public:
    TypeKind kind() const { return kind_; }
    bool is_void() const { return kind_ == TypeKind::Void; }
    bool is_int() const { return kind_ == TypeKind::Int; }
    bool is_float() const { return kind_ == TypeKind::Float; }
    bool is_array() const { return kind_ == TypeKind::Array; }
    bool is_address() const { return kind_ == TypeKind::Address; }
    bool is_vector() const { return kind_ == TypeKind::Vector; }
    bool is_scalar() const { return is_int() || is_float(); }

    /// Integer width in bits; 0 for non-int types.
    int bits() const { return bits_; }
    /// Array/vector element or address pointee.
    const Type* elem() const { return elem_; }
    /// Array length or vector lane count.
    uint64_t count() const { return count_; }

    /// Number of scalar words in a row-major flattening (arrays nest).
    uint64_t flat_size() const;
    /// Innermost scalar type of a (possibly nested) array, or this.
    const Type* scalar() const;
    /// Array nesting depth: float -> 0, [8 x float] -> 1, [2 x [8 x float]] -> 2.
    int rank() const;
    /// Contains a vector type anywhere in the nest.
    bool has_vector() const;

    std::string to_string() const;

private:
    friend class Types;
    friend struct TypeInterner;
    Type(TypeKind k, int bits, const Type* elem, uint64_t count)
        : kind_(k), bits_(bits), elem_(elem), count_(count) {}

    TypeKind kind_;
    int bits_;
    const Type* elem_;
    uint64_t count_;
};

/// Global interner. Thread-safe; returned pointers live for the process.
class Types {
public:
    static const Type* void_ty();
    static const Type* int_ty(int bits);  // 1, 8, 32, 64
    static const Type* i1() { return int_ty(1); }
    static const Type* i8() { return int_ty(8); }
    static const Type* i32() { return int_ty(32); }
    static const Type* i64() { return int_ty(64); }
    static const Type* f32();
    static const Type* array(const Type* elem, uint64_t n);
    static const Type* address(const Type* pointee);
    static const Type* vector(const Type* elem, uint64_t lanes);
};

}  // namespace lf
