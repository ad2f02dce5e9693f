#include "lfir/mif.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace lf {
namespace {

enum class Radix { Hex, Dec, Bin };

struct MifParser {
    const std::string& s;
    Diagnostics& diags;
    size_t pos = 0;
    int line = 1;
    bool failed = false;

    void err(const std::string& msg) {
        Location loc;
        loc.line = line;
        diags.error("mif-error", loc, msg);
        failed = true;
    }

    bool eof() const { return pos >= s.size(); }

    void skip_ws() {
        while (!eof()) {
            if (s[pos] == '-' && pos + 1 < s.size() && s[pos + 1] == '-') {
                while (!eof() && s[pos] != '\n') pos++;
            } else if (s[pos] == '%') {
                // percent comments also appear in vendor-emitted files
                pos++;
                while (!eof() && s[pos] != '%' && s[pos] != '\n') pos++;
                if (!eof() && s[pos] == '%') pos++;
            } else if (std::isspace(static_cast<unsigned char>(s[pos]))) {
                if (s[pos] == '\n') line++;
                pos++;
            } else {
                break;
            }
        }
    }

    std::string word() {
        skip_ws();
        std::string w;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                          s[pos] == '_'))
            w += s[pos++];
        return w;
    }

    bool punct(char c) {
        skip_ws();
        if (!eof() && s[pos] == c) {
            pos++;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return eof() ? '\0' : s[pos];
    }

    static std::string upper(std::string w) {
        for (char& c : w) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return w;
    }

    bool parse_number(Radix radix, int width_bits, uint64_t& out) {
        std::string w = word();
        if (w.empty()) {
            err("expected a number");
            return false;
        }
        uint64_t v = 0;
        int bits_seen = 0;
        switch (radix) {
            case Radix::Hex:
                for (char c : w) {
                    int d;
                    if (c >= '0' && c <= '9') d = c - '0';
                    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
                    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
                    else {
                        err("bad hex digit '" + std::string(1, c) + "'");
                        return false;
                    }
                    if (bits_seen + 4 > 64 && (v >> 60) != 0) {
                        err("number wider than 64 bits");
                        return false;
                    }
                    v = (v << 4) | static_cast<uint64_t>(d);
                    bits_seen += 4;
                }
                break;
            case Radix::Dec:
                for (char c : w) {
                    if (!std::isdigit(static_cast<unsigned char>(c))) {
                        err("bad decimal digit '" + std::string(1, c) + "'");
                        return false;
                    }
                    uint64_t nv = v * 10 + static_cast<uint64_t>(c - '0');
                    if (nv < v) {
                        err("number wider than 64 bits");
                        return false;
                    }
                    v = nv;
                }
                break;
            case Radix::Bin:
                for (char c : w) {
                    if (c != '0' && c != '1') {
                        err("bad binary digit '" + std::string(1, c) + "'");
                        return false;
                    }
                    v = (v << 1) | static_cast<uint64_t>(c - '0');
                    bits_seen++;
                }
                break;
        }
        if (width_bits > 0 && width_bits < 64 && (v >> width_bits) != 0) {
            err("value does not fit in WIDTH=" + std::to_string(width_bits) + " bits");
            return false;
        }
        out = v;
        return true;
    }
};

}  // namespace

std::optional<MifImage> load_mif(const std::string& text, Diagnostics& diags) {
    MifParser p{text, diags};
    int64_t depth = -1;
    int width = -1;
    Radix addr_radix = Radix::Hex;
    Radix data_radix = Radix::Hex;

    // header
    while (true) {
        std::string key = MifParser::upper(p.word());
        if (key.empty()) {
            p.err("unexpected end of file in header");
            return std::nullopt;
        }
        if (key == "CONTENT") break;
        if (!p.punct('=')) {
            p.err("expected '=' after " + key);
            return std::nullopt;
        }
        std::string val = MifParser::upper(p.word());
        if (!p.punct(';')) {
            p.err("expected ';' after header value");
            return std::nullopt;
        }
        auto radix_of = [&](const std::string& v, Radix& out) {
            if (v == "HEX") out = Radix::Hex;
            else if (v == "DEC" || v == "UNS") out = Radix::Dec;
            else if (v == "BIN") out = Radix::Bin;
            else {
                p.err("unsupported radix " + v);
                return false;
            }
            return true;
        };
        if (key == "DEPTH") {
            depth = std::strtoll(val.c_str(), nullptr, 10);
            if (depth <= 0) {
                p.err("bad DEPTH");
                return std::nullopt;
            }
        } else if (key == "WIDTH") {
            width = static_cast<int>(std::strtol(val.c_str(), nullptr, 10));
            if (width != 1 && width != 32 && width != 64) {
                p.err("unsupported WIDTH " + val + " (expected 1, 32, or 64)");
                return std::nullopt;
            }
        } else if (key == "ADDRESS_RADIX") {
            if (!radix_of(val, addr_radix)) return std::nullopt;
        } else if (key == "DATA_RADIX") {
            if (!radix_of(val, data_radix)) return std::nullopt;
        } else {
            p.err("unknown header key " + key);
            return std::nullopt;
        }
    }
    if (depth < 0 || width < 0) {
        p.err("header must set DEPTH and WIDTH before CONTENT");
        return std::nullopt;
    }
    if (MifParser::upper(p.word()) != "BEGIN") {
        p.err("expected BEGIN after CONTENT");
        return std::nullopt;
    }

    MifImage img;
    img.width = width;
    img.words.assign(static_cast<size_t>(depth), 0);

    while (true) {
        char c = p.peek();
        if (c == '\0') {
            p.err("missing END;");
            return std::nullopt;
        }
        uint64_t lo = 0, hi = 0;
        if (c == '[') {
            p.punct('[');
            if (!p.parse_number(addr_radix, 64, lo)) return std::nullopt;
            if (!p.punct('.') || !p.punct('.')) {
                p.err("expected '..' in address range");
                return std::nullopt;
            }
            if (!p.parse_number(addr_radix, 64, hi)) return std::nullopt;
            if (!p.punct(']')) {
                p.err("expected ']' after address range");
                return std::nullopt;
            }
        } else {
            size_t save_pos = p.pos;
            int save_line = p.line;
            std::string w = MifParser::upper(p.word());
            if (w == "END") {
                p.punct(';');
                break;
            }
            p.pos = save_pos;
            p.line = save_line;
            if (!p.parse_number(addr_radix, 64, lo)) return std::nullopt;
            hi = lo;
        }
        if (!p.punct(':')) {
            p.err("expected ':' after address");
            return std::nullopt;
        }
        uint64_t data = 0;
        if (!p.parse_number(data_radix, width, data)) return std::nullopt;
        if (!p.punct(';')) {
            p.err("expected ';' after data");
            return std::nullopt;
        }
        if (hi < lo || hi >= static_cast<uint64_t>(depth)) {
            p.err("address range outside DEPTH");
            return std::nullopt;
        }
        for (uint64_t a = lo; a <= hi; a++) img.words[a] = data;
    }
    return img;
}

std::string store_mif(const MifImage& img) {
    std::ostringstream os;
    os << "-- memory initialization data\n";
    os << "DEPTH=" << img.words.size() << ";\n";
    os << "WIDTH=" << img.width << ";\n";
    os << "ADDRESS_RADIX=HEX;\n";
    os << "DATA_RADIX=HEX;\n";
    os << "CONTENT BEGIN\n";
    int data_digits = img.width == 1 ? 1 : img.width / 4;
    char buf[32];
    for (size_t a = 0; a < img.words.size(); a++) {
        std::snprintf(buf, sizeof(buf), "%zX", a);
        os << buf << " : ";
        std::snprintf(buf, sizeof(buf), "%0*llX", data_digits,
                      static_cast<unsigned long long>(img.words[a]));
        os << buf << ";\n";
    }
    os << "END;\n";
    return os.str();
}

MifImage mif_from_words(const std::vector<Word>& bank) {
    MifImage img;
    img.width = bank.empty() ? 32 : bank[0].width();
    img.words.reserve(bank.size());
    for (const Word& w : bank) img.words.push_back(w.bits());
    return img;
}

std::vector<Word> words_from_mif(const MifImage& img, Word::Tag tag) {
    std::vector<Word> bank;
    bank.reserve(img.words.size());
    for (uint64_t bits : img.words) bank.push_back(Word::from_bits(tag, bits));
    return bank;
}

}  // namespace lf
