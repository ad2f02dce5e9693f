#include "lfir/image.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lf {

uint64_t Word::bits() const {
    switch (tag) {
        case Tag::I1: return i ? 1 : 0;
        case Tag::I32: return static_cast<uint32_t>(static_cast<int32_t>(i));
        case Tag::I64: return static_cast<uint64_t>(i);
        case Tag::F32: return std::bit_cast<uint32_t>(f);
    }
    return 0;
}

Word Word::from_bits(Tag tag, uint64_t bits) {
    switch (tag) {
        case Tag::I1: return i1(bits & 1);
        case Tag::I32: return i32(static_cast<int32_t>(static_cast<uint32_t>(bits)));
        case Tag::I64: return i64(static_cast<int64_t>(bits));
        case Tag::F32: return f32(std::bit_cast<float>(static_cast<uint32_t>(bits)));
    }
    return {};
}

int Word::width() const {
    switch (tag) {
        case Tag::I1: return 1;
        case Tag::I64: return 64;
        default: return 32;
    }
}

Word::Tag Word::tag_for(const Type* scalar) {
    if (scalar->is_float()) return Tag::F32;
    if (scalar->is_int()) {
        switch (scalar->bits()) {
            case 1: return Tag::I1;
            case 32: return Tag::I32;
            case 64: return Tag::I64;
        }
    }
    throw std::invalid_argument("no memory word for type " + scalar->to_string());
}

bool Word::operator==(const Word& o) const {
    if (tag != o.tag) return false;
    if (tag == Tag::F32) return std::bit_cast<uint32_t>(f) == std::bit_cast<uint32_t>(o.f);
    return i == o.i;
}

MemoryImage MemoryImage::for_module(const Module& m) {
    MemoryImage img;
    for (const Global& g : m.globals) {
        Word::Tag tag = Word::tag_for(g.type->scalar());
        std::vector<Word> bank(g.type->flat_size(), Word::from_bits(tag, 0));
        if (!g.init.zero) {
            for (size_t i = 0; i < g.init.elems.size() && i < bank.size(); i++) {
                const Value& v = g.init.elems[i];
                if (v.kind == Value::Kind::ConstFloat)
                    bank[i] = Word::f32(v.fval);
                else
                    bank[i] = Word::from_bits(tag, static_cast<uint64_t>(v.ival));
            }
        }
        img.banks[g.name] = std::move(bank);
    }
    return img;
}

std::vector<Word>* MemoryImage::find(const std::string& name) {
    auto it = banks.find(name);
    return it == banks.end() ? nullptr : &it->second;
}

const std::vector<Word>* MemoryImage::find(const std::string& name) const {
    auto it = banks.find(name);
    return it == banks.end() ? nullptr : &it->second;
}

MemoryImage MemoryImage::subset(const std::vector<std::string>& names) const {
    MemoryImage out;
    for (const std::string& n : names) {
        auto it = banks.find(n);
        if (it != banks.end()) out.banks[n] = it->second;
    }
    return out;
}

std::string CompareReport::to_string() const {
    std::ostringstream os;
    os << (pass ? "pass" : "fail") << " worst_rel_err=" << worst_rel_err;
    if (!worst_bank.empty())
        os << " at @" << worst_bank << "[" << worst_index << "]"
           << " abs_err=" << worst_abs_err;
    if (!message.empty()) os << " (" << message << ")";
    return os.str();
}

CompareReport compare_images(const MemoryImage& got, const MemoryImage& want,
                             double rel_tol, double abs_tol) {
    CompareReport rep;
    if (got.banks.size() != want.banks.size()) {
        rep.pass = false;
        rep.message = "bank sets differ";
        return rep;
    }
    for (const auto& [name, wbank] : want.banks) {
        const std::vector<Word>* gbank = got.find(name);
        if (!gbank) {
            rep.pass = false;
            rep.message = "missing bank @" + name;
            return rep;
        }
        if (gbank->size() != wbank.size()) {
            rep.pass = false;
            rep.message = "shape mismatch on @" + name;
            return rep;
        }
        for (size_t i = 0; i < wbank.size(); i++) {
            const Word& x = (*gbank)[i];
            const Word& y = wbank[i];
            if (x.tag != y.tag) {
                rep.pass = false;
                rep.message = "tag mismatch on @" + name;
                return rep;
            }
            if (x.tag != Word::Tag::F32) {
                if (x.i != y.i) {
                    rep.pass = false;
                    rep.worst_bank = name;
                    rep.worst_index = i;
                    rep.worst_abs_err =
                        std::abs(static_cast<double>(x.i) - static_cast<double>(y.i));
                    rep.message = "integer mismatch on @" + name;
                    return rep;
                }
                continue;
            }
            if (std::bit_cast<uint32_t>(x.f) == std::bit_cast<uint32_t>(y.f))
                continue;
            if (std::isnan(x.f) && std::isnan(y.f)) continue;
            if (!std::isfinite(x.f) || !std::isfinite(y.f)) {
                // NaN or infinity on one side only (or differing infinities):
                // no tolerance can absorb that.
                rep.pass = false;
                rep.worst_rel_err = std::numeric_limits<double>::infinity();
                rep.worst_abs_err = std::numeric_limits<double>::infinity();
                rep.worst_bank = name;
                rep.worst_index = i;
                continue;
            }
            double err = std::abs(static_cast<double>(x.f) -
                                  static_cast<double>(y.f));
            double tol = abs_tol + rel_tol * std::abs(static_cast<double>(y.f));
            double scaled = (tol > 0) ? rel_tol * (err / tol) : err;
            if (scaled > rep.worst_rel_err) {
                rep.worst_rel_err = scaled;
                rep.worst_abs_err = err;
                rep.worst_bank = name;
                rep.worst_index = i;
            }
            if (err > tol) rep.pass = false;
        }
    }
    return rep;
}

}  // namespace lf
