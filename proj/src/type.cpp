#include "lfir/type.hpp"

#include <deque>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace lf {

uint64_t Type::flat_size() const {
    switch (kind_) {
        case TypeKind::Array:
        case TypeKind::Vector:
            return count_ * elem_->flat_size();
        case TypeKind::Void:
            return 0;
        default:
            return 1;
    }
}

const Type* Type::scalar() const {
    const Type* t = this;
    while (t->is_array() || t->is_vector()) t = t->elem();
    return t;
}

int Type::rank() const {
    int r = 0;
    for (const Type* t = this; t->is_array(); t = t->elem()) r++;
    return r;
}

bool Type::has_vector() const {
    for (const Type* t = this; t; ) {
        if (t->is_vector()) return true;
        if (t->is_array() || t->is_address()) { t = t->elem(); continue; }
        break;
    }
    return false;
}

std::string Type::to_string() const {
    switch (kind_) {
        case TypeKind::Void: return "void";
        case TypeKind::Int: return "i" + std::to_string(bits_);
        case TypeKind::Float: return "float";
        case TypeKind::Array: {
            std::ostringstream ss;
            ss << "[" << count_ << " x " << elem_->to_string() << "]";
            return ss.str();
        }
        case TypeKind::Vector: {
            std::ostringstream ss;
            ss << "<" << count_ << " x " << elem_->to_string() << ">";
            return ss.str();
        }
        case TypeKind::Address: return elem_->to_string() + "*";
    }
    return "?";
}

struct TypeInterner {
    std::mutex mu;
    std::deque<Type> pool;  // stable addresses
    std::map<std::tuple<int, int, const Type*, uint64_t>, const Type*> table;

    const Type* get(TypeKind k, int bits, const Type* elem, uint64_t count) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(static_cast<int>(k), bits, elem, count);
        auto it = table.find(key);
        if (it != table.end()) return it->second;
        pool.push_back(Type(k, bits, elem, count));
        const Type* t = &pool.back();
        table[key] = t;
        return t;
    }
};

namespace {

TypeInterner& interner() {
    static TypeInterner i;
    return i;
}

}  // namespace

const Type* Types::void_ty() { return interner().get(TypeKind::Void, 0, nullptr, 0); }

const Type* Types::int_ty(int bits) {
    if (bits != 1 && bits != 8 && bits != 32 && bits != 64)
        throw std::invalid_argument("unsupported integer width i" + std::to_string(bits));
    return interner().get(TypeKind::Int, bits, nullptr, 0);
}

const Type* Types::f32() { return interner().get(TypeKind::Float, 32, nullptr, 0); }

const Type* Types::array(const Type* elem, uint64_t n) {
    if (n == 0) throw std::invalid_argument("array length must be >= 1");
    return interner().get(TypeKind::Array, 0, elem, n);
}

const Type* Types::address(const Type* pointee) {
    return interner().get(TypeKind::Address, 0, pointee, 0);
}

const Type* Types::vector(const Type* elem, uint64_t lanes) {
    return interner().get(TypeKind::Vector, 0, elem, lanes);
}

}  // namespace lf
