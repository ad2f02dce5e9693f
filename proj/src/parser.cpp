#include "lfir/parser.hpp"

#include <bit>
#include <cctype>
#include <cstdlib>
#include <unordered_set>

#include "lfir/validate.hpp"

namespace lf {
namespace {

enum class Tok {
    Ident,    // bare word: keywords, type names, predicates
    Local,    // %name
    GlobalN,  // @name
    AttrRef,  // #0
    MetaRef,  // !name or !0
    Int,
    Float,
    Str,      // "..."
    Punct,    // single char: ( ) [ ] { } < > = , * :
    Eof,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    int64_t ival = 0;
    double fval = 0.0;
    bool fval_from_hex = false;
    int line = 1;
    int col = 1;
};

bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == '-' || c == '$';
}

class Lexer {
public:
    Lexer(const std::string& text, Diagnostics& diags) : s_(text), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            Token t = next();
            out.push_back(t);
            if (t.kind == Tok::Eof) break;
        }
        return out;
    }

    bool failed = false;

private:
    Token next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (eof()) {
            t.kind = Tok::Eof;
            return t;
        }
        char c = peek();
        if (c == '%' || c == '@') {
            get();
            t.kind = (c == '%') ? Tok::Local : Tok::GlobalN;
            while (!eof() && name_char(peek())) t.text += get();
            if (t.text.empty()) err(t, "empty name after sigil");
            return t;
        }
        if (c == '#') {
            get();
            t.kind = Tok::AttrRef;
            while (!eof() && name_char(peek())) t.text += get();
            return t;
        }
        if (c == '!') {
            get();
            t.kind = Tok::MetaRef;
            while (!eof() && name_char(peek())) t.text += get();
            return t;
        }
        if (c == '"') {
            get();
            t.kind = Tok::Str;
            while (!eof() && peek() != '"') t.text += get();
            if (!eof()) get();
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            return lex_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Tok::Ident;
            while (!eof() && name_char(peek())) t.text += get();
            return t;
        }
        t.kind = Tok::Punct;
        t.text = std::string(1, get());
        return t;
    }

    Token lex_number() {
        Token t;
        t.line = line_;
        t.col = col_;
        std::string text;
        if (peek() == '-') text += get();
        if (peek() == '0' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'X')) {
            // hexadecimal double bits, the assembler's exact-float spelling
            get();
            get();
            std::string hex;
            while (!eof() && std::isxdigit(static_cast<unsigned char>(peek()))) hex += get();
            t.kind = Tok::Float;
            uint64_t bits = std::strtoull(hex.c_str(), nullptr, 16);
            t.fval = std::bit_cast<double>(bits);
            t.fval_from_hex = true;
            t.text = "0x" + hex;
            return t;
        }
        bool is_float = false;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) text += get();
        if (!eof() && peek() == '.') {
            is_float = true;
            text += get();
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) text += get();
        }
        if (!eof() && (peek() == 'e' || peek() == 'E')) {
            is_float = true;
            text += get();
            if (!eof() && (peek() == '+' || peek() == '-')) text += get();
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) text += get();
        }
        t.text = text;
        if (is_float) {
            t.kind = Tok::Float;
            t.fval = std::strtod(text.c_str(), nullptr);
        } else {
            t.kind = Tok::Int;
            t.ival = std::strtoll(text.c_str(), nullptr, 10);
        }
        return t;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == ';') {
                while (!eof() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    char get() {
        char c = s_[pos_++];
        if (c == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        return c;
    }

    void err(const Token& t, const std::string& msg) {
        Location loc;
        loc.line = t.line;
        loc.col = t.col;
        diags_.error("syntax-error", loc, msg);
        failed = true;
    }

    const std::string& s_;
    Diagnostics& diags_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Function attribute words we accept and drop (newer-assembler residue).
const std::unordered_set<std::string> kDroppedAttrs = {
    "norecurse", "nonrecurse", "nounwind", "speculatable", "speculable",
    "readnone", "readonly", "writeonly", "argmemonly", "alwaysinline",
    "noinline", "uwtable", "willreturn", "mustprogress", "nofree", "nosync",
    "optsize", "minsize", "cold", "hot",
};

// Parameter attribute words, likewise dropped.
const std::unordered_set<std::string> kDroppedParamAttrs = {
    "nocapture", "readonly", "readnone", "noalias", "nonnull", "writeonly",
    "dereferenceable", "align",
};

// Arithmetic flags accepted silently.
const std::unordered_set<std::string> kArithFlags = {
    "nsw", "nuw", "exact", "fast", "nnan", "ninf", "nsz", "arcp", "contract",
    "afn", "reassoc",
};

class Parser {
public:
    Parser(std::vector<Token> toks, Diagnostics& diags)
        : toks_(std::move(toks)), diags_(diags) {}

    std::optional<Module> run() {
        Module m;
        while (!at(Tok::Eof)) {
            if (!parse_top_level(m)) return std::nullopt;
        }
        return m;
    }

private:
    // ---- token helpers ----
    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(size_t n = 1) const {
        size_t i = pos_ + n;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_ident(const char* w) const { return at(Tok::Ident) && cur().text == w; }
    bool at_punct(char c) const { return at(Tok::Punct) && cur().text[0] == c; }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept_ident(const char* w) {
        if (at_ident(w)) {
            take();
            return true;
        }
        return false;
    }
    bool accept_punct(char c) {
        if (at_punct(c)) {
            take();
            return true;
        }
        return false;
    }
    bool expect_punct(char c, const char* what) {
        if (accept_punct(c)) return true;
        error(std::string("expected '") + c + "' " + what);
        return false;
    }
    bool expect_ident(const char* w) {
        if (accept_ident(w)) return true;
        error(std::string("expected '") + w + "'");
        return false;
    }

    void error(const std::string& msg) {
        Location loc;
        loc.line = cur().line;
        loc.col = cur().col;
        diags_.error("syntax-error", loc, msg + " (got '" + token_text() + "')");
        ok_ = false;
    }

    std::string token_text() const {
        switch (cur().kind) {
            case Tok::Eof: return "<eof>";
            case Tok::Local: return "%" + cur().text;
            case Tok::GlobalN: return "@" + cur().text;
            case Tok::MetaRef: return "!" + cur().text;
            case Tok::AttrRef: return "#" + cur().text;
            default: return cur().text;
        }
    }

    void warn_dropped(const std::string& code, const std::string& what) {
        Location loc;
        loc.line = cur().line;
        loc.col = cur().col;
        diags_.warning(code, loc, "dropped " + what);
    }

    void skip_line(Module* m = nullptr) {
        int line = cur().line;
        std::string residue;
        while (!at(Tok::Eof) && cur().line == line) {
            if (!residue.empty()) residue += " ";
            residue += token_text();
            take();
        }
        if (m) m->metadata.push_back(residue);
    }

    void skip_balanced_braces() {
        if (!at_punct('{')) return;
        int depth = 0;
        while (!at(Tok::Eof)) {
            if (at_punct('{')) depth++;
            if (at_punct('}')) {
                depth--;
                take();
                if (depth == 0) return;
                continue;
            }
            take();
        }
    }

    // ---- types ----
    const Type* parse_type() {
        const Type* base = nullptr;
        if (at(Tok::Ident)) {
            const std::string& w = cur().text;
            if (w == "void") {
                take();
                base = Types::void_ty();
            } else if (w == "float") {
                take();
                base = Types::f32();
            } else if (w.size() > 1 && w[0] == 'i') {
                bool numeric = true;
                for (size_t i = 1; i < w.size(); i++)
                    if (!std::isdigit(static_cast<unsigned char>(w[i]))) numeric = false;
                if (numeric) {
                    int bits = std::atoi(w.c_str() + 1);
                    if (bits != 1 && bits != 8 && bits != 32 && bits != 64) {
                        error("unsupported integer width " + w);
                        return nullptr;
                    }
                    take();
                    base = Types::int_ty(bits);
                }
            }
        } else if (at_punct('[')) {
            take();
            if (!at(Tok::Int)) {
                error("expected array length");
                return nullptr;
            }
            int64_t n = take().ival;
            if (n < 1) {
                error("array length must be >= 1");
                return nullptr;
            }
            if (!expect_ident("x")) return nullptr;
            const Type* elem = parse_type();
            if (!elem) return nullptr;
            if (!expect_punct(']', "after array type")) return nullptr;
            base = Types::array(elem, static_cast<uint64_t>(n));
        } else if (at_punct('<')) {
            take();
            if (!at(Tok::Int)) {
                error("expected vector lane count");
                return nullptr;
            }
            int64_t n = take().ival;
            if (!expect_ident("x")) return nullptr;
            const Type* elem = parse_type();
            if (!elem) return nullptr;
            if (!expect_punct('>', "after vector type")) return nullptr;
            base = Types::vector(elem, static_cast<uint64_t>(n));
        }
        if (!base) {
            error("expected type");
            return nullptr;
        }
        while (accept_punct('*')) base = Types::address(base);
        return base;
    }

    bool looks_like_type() const {
        if (at_punct('[') || at_punct('<')) return true;
        if (!at(Tok::Ident)) return false;
        const std::string& w = cur().text;
        if (w == "void" || w == "float") return true;
        if (w.size() > 1 && w[0] == 'i') {
            for (size_t i = 1; i < w.size(); i++)
                if (!std::isdigit(static_cast<unsigned char>(w[i]))) return false;
            return true;
        }
        return false;
    }

    // ---- operands ----
    std::optional<Value> parse_value(const Type* type) {
        if (at(Tok::Local)) return Value::local(take().text, type);
        if (at(Tok::GlobalN)) return Value::global(take().text, type);
        if (at(Tok::Int)) {
            Token t = take();
            if (type->is_float()) return Value::const_float(static_cast<float>(t.ival));
            if (!type->is_int()) {
                error("integer constant for non-integer type " + type->to_string());
                return std::nullopt;
            }
            return Value::const_int(t.ival, type);
        }
        if (at(Tok::Float)) {
            Token t = take();
            if (!type->is_float()) {
                error("float constant for non-float type " + type->to_string());
                return std::nullopt;
            }
            return Value::const_float(static_cast<float>(t.fval));
        }
        if (at_ident("true")) {
            take();
            return Value::const_int(1, Types::i1());
        }
        if (at_ident("false")) {
            take();
            return Value::const_int(0, Types::i1());
        }
        error("expected operand");
        return std::nullopt;
    }

    std::optional<Value> parse_typed_value() {
        const Type* t = parse_type();
        if (!t) return std::nullopt;
        return parse_value(t);
    }

    // ---- top level ----
    bool parse_top_level(Module& m) {
        if (at(Tok::GlobalN)) return parse_global(m);
        if (at_ident("define")) return parse_function(m, /*defined=*/true);
        if (at_ident("declare")) return parse_function(m, /*defined=*/false);
        if (at_ident("target") || at_ident("source_filename")) {
            skip_line(&m);
            return true;
        }
        if (at_ident("attributes")) {
            warn_dropped("dropped-attribute", "attribute group");
            take();
            while (!at(Tok::Eof) && !at_punct('{')) take();
            skip_balanced_braces();
            return true;
        }
        if (at(Tok::MetaRef)) {
            warn_dropped("dropped-metadata", "metadata node !" + cur().text);
            skip_line(&m);
            return true;
        }
        error("expected global, define, or declare at top level");
        return false;
    }

    bool parse_global(Module& m) {
        Global g;
        g.name = take().text;
        if (!expect_punct('=', "after global name")) return false;
        while (at(Tok::Ident) &&
               (cur().text == "internal" || cur().text == "private" ||
                cur().text == "external" || cur().text == "common" ||
                cur().text == "unnamed_addr" || cur().text == "local_unnamed_addr")) {
            if (cur().text == "internal" || cur().text == "private") g.internal = true;
            take();
        }
        if (!accept_ident("global") && !accept_ident("constant")) {
            error("expected 'global'");
            return false;
        }
        g.type = parse_type();
        if (!g.type) return false;
        if (accept_ident("zeroinitializer")) {
            g.init.zero = true;
        } else {
            g.init.zero = false;
            if (!parse_initializer(g.type, g.init.elems)) return false;
        }
        if (accept_punct(',')) {
            if (!expect_ident("align")) return false;
            if (!at(Tok::Int)) {
                error("expected alignment");
                return false;
            }
            g.align = static_cast<unsigned>(take().ival);
        }
        m.globals.push_back(std::move(g));
        return true;
    }

    // Flattens nested bracketed constant lists row-major.
    bool parse_initializer(const Type* type, std::vector<Value>& out) {
        if (type->is_array()) {
            if (accept_ident("zeroinitializer")) {
                for (uint64_t i = 0; i < type->flat_size(); i++)
                    out.push_back(zero_of(type->scalar()));
                return true;
            }
            if (!expect_punct('[', "to open constant array")) return false;
            for (uint64_t i = 0; i < type->count(); i++) {
                if (i > 0 && !expect_punct(',', "between array elements")) return false;
                const Type* et = parse_type();
                if (!et) return false;
                if (et != type->elem()) {
                    error("initializer element type mismatch");
                    return false;
                }
                if (!parse_initializer(et, out)) return false;
            }
            return expect_punct(']', "to close constant array");
        }
        auto v = parse_value(type);
        if (!v) return false;
        if (!v->is_const()) {
            error("global initializers must be constant");
            return false;
        }
        out.push_back(*v);
        return true;
    }

    static Value zero_of(const Type* scalar) {
        if (scalar->is_float()) return Value::const_float(0.0f);
        return Value::const_int(0, scalar);
    }

    bool parse_function(Module& m, bool defined) {
        take();  // define/declare
        Function f;
        f.defined = defined;
        f.ret = parse_type();
        if (!f.ret) return false;
        if (!at(Tok::GlobalN)) {
            error("expected function name");
            return false;
        }
        f.name = take().text;
        if (!expect_punct('(', "after function name")) return false;
        uint64_t unnamed = 0;
        while (!at_punct(')')) {
            if (!f.params.empty() && !expect_punct(',', "between parameters")) return false;
            Param p;
            p.type = parse_type();
            if (!p.type) return false;
            while (at(Tok::Ident) && kDroppedParamAttrs.count(cur().text)) {
                warn_dropped("dropped-attribute", "parameter attribute '" + cur().text + "'");
                take();
                if (at(Tok::Int)) take();  // dereferenceable(n)-style payloads
            }
            if (at(Tok::Local)) {
                p.name = take().text;
            } else {
                p.name = std::to_string(unnamed++);
            }
            f.params.push_back(std::move(p));
        }
        take();  // ')'
        // attribute residue between ')' and '{' (or end of a declare line)
        while (at(Tok::AttrRef) || (at(Tok::Ident) && !at_punct('{'))) {
            if (at(Tok::AttrRef)) {
                warn_dropped("dropped-attribute", "attribute group reference #" + cur().text);
                take();
                continue;
            }
            if (kDroppedAttrs.count(cur().text)) {
                warn_dropped("dropped-attribute", "function attribute '" + cur().text + "'");
                take();
                continue;
            }
            break;
        }
        if (!defined) {
            m.functions.push_back(std::move(f));
            return true;
        }
        if (!expect_punct('{', "to open function body")) return false;
        if (!parse_body(f)) return false;
        if (!expect_punct('}', "to close function body")) return false;
        m.functions.push_back(std::move(f));
        return true;
    }

    bool at_block_label() const {
        return (at(Tok::Ident) || at(Tok::Int)) && ahead().kind == Tok::Punct &&
               ahead().text == ":";
    }

    bool parse_body(Function& f) {
        while (!at_punct('}') && !at(Tok::Eof)) {
            Block b;
            if (at_block_label()) {
                b.label = at(Tok::Int) ? std::to_string(cur().ival) : cur().text;
                take();
                take();  // ':'
            } else if (f.blocks.empty()) {
                b.label = "entry";  // unlabeled entry block, the paper-style spelling
            } else {
                error("expected block label");
                return false;
            }
            while (!at_punct('}') && !at_block_label() && !at(Tok::Eof)) {
                std::optional<Instruction> inst = parse_instruction();
                if (!inst) return false;
                bool term = inst->is_terminator();
                b.insts.push_back(std::move(*inst));
                if (term) break;
            }
            f.blocks.push_back(std::move(b));
        }
        return true;
    }

    // ---- instructions ----
    std::optional<Instruction> parse_instruction() {
        std::string result;
        if (at(Tok::Local)) {
            result = take().text;
            if (!expect_punct('=', "after result name")) return std::nullopt;
        }
        if (!at(Tok::Ident)) {
            error("expected opcode");
            return std::nullopt;
        }
        std::string op = cur().text;
        if (op == "tail") {
            take();
            op = cur().text;
        }
        Instruction inst;
        inst.result = result;
        bool parsed = false;
        if (op == "load") parsed = parse_load(inst);
        else if (op == "store") parsed = parse_store(inst);
        else if (op == "getelementptr") parsed = parse_gep(inst);
        else if (op == "bitcast" || op == "zext" || op == "sext" || op == "trunc" ||
                 op == "sitofp" || op == "fptosi") parsed = parse_cast(inst, op);
        else if (op == "add" || op == "sub" || op == "mul" || op == "sdiv" ||
                 op == "srem" || op == "fadd" || op == "fsub" || op == "fmul" ||
                 op == "fdiv") parsed = parse_binop(inst, op);
        else if (op == "icmp" || op == "fcmp") parsed = parse_cmp(inst, op);
        else if (op == "select") parsed = parse_select(inst);
        else if (op == "phi") parsed = parse_phi(inst);
        else if (op == "br") parsed = parse_br(inst);
        else if (op == "ret") parsed = parse_ret(inst);
        else if (op == "call") parsed = parse_call(inst);
        else {
            error("unknown opcode '" + op + "'");
            return std::nullopt;
        }
        if (!parsed) return std::nullopt;
        skip_inst_tail(inst);
        if (!inst.has_result() && !result.empty()) {
            error("instruction does not produce a result");
            return std::nullopt;
        }
        return inst;
    }

    // `, align N` and `, !md !N` residue after an instruction.
    void skip_inst_tail(Instruction& inst) {
        while (at_punct(',')) {
            if (ahead().kind == Tok::Ident && ahead().text == "align") {
                take();
                take();
                if (at(Tok::Int)) inst.align = static_cast<unsigned>(take().ival);
            } else if (ahead().kind == Tok::MetaRef) {
                take();
                warn_dropped("dropped-metadata", "instruction metadata !" + cur().text);
                take();
                if (at(Tok::MetaRef)) take();
            } else {
                break;
            }
        }
    }

    bool parse_load(Instruction& inst) {
        take();  // load
        inst.op = Opcode::Load;
        if (accept_ident("volatile")) inst.is_volatile = true;
        const Type* first = parse_type();
        if (!first) return false;
        if (accept_punct(',')) {
            // modern: load T, T* %p
            const Type* ptr = parse_type();
            if (!ptr) return false;
            if (!ptr->is_address() || ptr->elem() != first) {
                error("load pointer type does not match value type");
                return false;
            }
            inst.pointee = first;
            auto v = parse_value(ptr);
            if (!v) return false;
            inst.operands.push_back(*v);
        } else {
            // legacy: load T* %p
            if (!first->is_address()) {
                error("load operand must have address type");
                return false;
            }
            inst.pointee = first->elem();
            auto v = parse_value(first);
            if (!v) return false;
            inst.operands.push_back(*v);
        }
        inst.type = inst.pointee;
        return true;
    }

    bool parse_store(Instruction& inst) {
        take();  // store
        inst.op = Opcode::Store;
        inst.type = Types::void_ty();
        if (accept_ident("volatile")) inst.is_volatile = true;
        auto v = parse_typed_value();
        if (!v) return false;
        if (!expect_punct(',', "after stored value")) return false;
        const Type* ptr = parse_type();
        if (!ptr) return false;
        if (!ptr->is_address() || ptr->elem() != v->type) {
            error("store pointer type does not match value type");
            return false;
        }
        auto p = parse_value(ptr);
        if (!p) return false;
        inst.pointee = v->type;
        inst.operands.push_back(*v);
        inst.operands.push_back(*p);
        return true;
    }

    bool parse_gep(Instruction& inst) {
        take();  // getelementptr
        inst.op = Opcode::Gep;
        if (accept_ident("inbounds")) inst.inbounds = true;
        const Type* first = parse_type();
        if (!first) return false;
        const Type* ptr_ty = nullptr;
        if (at_punct(',') && !first->is_address()) {
            // modern: getelementptr T, T* %base, idx...
            take();
            ptr_ty = parse_type();
            if (!ptr_ty) return false;
            if (!ptr_ty->is_address() || ptr_ty->elem() != first) {
                error("getelementptr pointer type does not match element type");
                return false;
            }
        } else if (at_punct(',') && first->is_address()) {
            // modern with address element type: getelementptr T*, T** %base, ...
            // Disambiguate: if the token after the comma is a type, treat as modern.
            size_t save = pos_;
            take();
            if (looks_like_type()) {
                ptr_ty = parse_type();
                if (!ptr_ty) return false;
                if (!ptr_ty->is_address() || ptr_ty->elem() != first) {
                    error("getelementptr pointer type does not match element type");
                    return false;
                }
            } else {
                pos_ = save;  // legacy after all; comma belongs to the index list
            }
        }
        if (!ptr_ty) {
            // legacy: getelementptr T* %base, idx...
            if (!first->is_address()) {
                error("getelementptr base must have address type");
                return false;
            }
            ptr_ty = first;
        }
        inst.pointee = ptr_ty->elem();
        auto base = parse_value(ptr_ty);
        if (!base) return false;
        inst.operands.push_back(*base);
        const Type* cur_ty = inst.pointee;
        bool leading = true;
        while (accept_punct(',')) {
            if (at(Tok::Ident) && cur().text == "align") {
                pos_--;  // let skip_inst_tail handle it
                break;
            }
            auto idx = parse_typed_value();
            if (!idx) return false;
            if (!idx->type->is_int()) {
                error("getelementptr index must be an integer");
                return false;
            }
            if (!leading) {
                if (!cur_ty->is_array() && !cur_ty->is_vector()) {
                    error("getelementptr index into non-aggregate type " + cur_ty->to_string());
                    return false;
                }
                cur_ty = cur_ty->elem();
            }
            leading = false;
            inst.operands.push_back(*idx);
        }
        if (inst.operands.size() < 2) {
            error("getelementptr requires at least one index");
            return false;
        }
        inst.type = Types::address(cur_ty);
        return true;
    }

    bool parse_cast(Instruction& inst, const std::string& op) {
        take();
        if (op == "bitcast") inst.op = Opcode::Bitcast;
        else if (op == "zext") inst.op = Opcode::ZExt;
        else if (op == "sext") inst.op = Opcode::SExt;
        else if (op == "trunc") inst.op = Opcode::Trunc;
        else if (op == "sitofp") inst.op = Opcode::SIToFP;
        else inst.op = Opcode::FPToSI;
        auto v = parse_typed_value();
        if (!v) return false;
        if (!expect_ident("to")) return false;
        const Type* dst = parse_type();
        if (!dst) return false;
        inst.operands.push_back(*v);
        inst.type = dst;
        return true;
    }

    bool parse_binop(Instruction& inst, const std::string& op) {
        take();
        if (op == "add") inst.op = Opcode::Add;
        else if (op == "sub") inst.op = Opcode::Sub;
        else if (op == "mul") inst.op = Opcode::Mul;
        else if (op == "sdiv") inst.op = Opcode::SDiv;
        else if (op == "srem") inst.op = Opcode::SRem;
        else if (op == "fadd") inst.op = Opcode::FAdd;
        else if (op == "fsub") inst.op = Opcode::FSub;
        else if (op == "fmul") inst.op = Opcode::FMul;
        else inst.op = Opcode::FDiv;
        while (at(Tok::Ident) && kArithFlags.count(cur().text)) take();
        const Type* t = parse_type();
        if (!t) return false;
        auto a = parse_value(t);
        if (!a) return false;
        if (!expect_punct(',', "between operands")) return false;
        auto b = parse_value(t);
        if (!b) return false;
        inst.type = t;
        inst.operands.push_back(*a);
        inst.operands.push_back(*b);
        return true;
    }

    bool parse_cmp(Instruction& inst, const std::string& op) {
        take();
        inst.op = (op == "icmp") ? Opcode::ICmp : Opcode::FCmp;
        while (at(Tok::Ident) && kArithFlags.count(cur().text)) take();
        if (!at(Tok::Ident)) {
            error("expected comparison predicate");
            return false;
        }
        std::string p = take().text;
        static const std::pair<const char*, Cmp> preds[] = {
            {"eq", Cmp::Eq},   {"ne", Cmp::Ne},   {"slt", Cmp::Slt},
            {"sle", Cmp::Sle}, {"sgt", Cmp::Sgt}, {"sge", Cmp::Sge},
            {"oeq", Cmp::Oeq}, {"one", Cmp::One}, {"olt", Cmp::Olt},
            {"ole", Cmp::Ole}, {"ogt", Cmp::Ogt}, {"oge", Cmp::Oge},
            {"ueq", Cmp::Ueq}, {"une", Cmp::Une}, {"ult", Cmp::Ult},
            {"ule", Cmp::Ule}, {"ugt", Cmp::Ugt}, {"uge", Cmp::Uge},
        };
        bool found = false;
        for (auto& [name, val] : preds) {
            if (p == name) {
                inst.pred = val;
                found = true;
                break;
            }
        }
        if (!found) {
            error("unknown predicate '" + p + "'");
            return false;
        }
        const Type* t = parse_type();
        if (!t) return false;
        auto a = parse_value(t);
        if (!a) return false;
        if (!expect_punct(',', "between operands")) return false;
        auto b = parse_value(t);
        if (!b) return false;
        inst.type = Types::i1();
        inst.operands.push_back(*a);
        inst.operands.push_back(*b);
        return true;
    }

    bool parse_select(Instruction& inst) {
        take();
        inst.op = Opcode::Select;
        auto c = parse_typed_value();
        if (!c) return false;
        if (!expect_punct(',', "after select condition")) return false;
        auto a = parse_typed_value();
        if (!a) return false;
        if (!expect_punct(',', "between select arms")) return false;
        auto b = parse_typed_value();
        if (!b) return false;
        inst.type = a->type;
        inst.operands = {*c, *a, *b};
        return true;
    }

    bool parse_phi(Instruction& inst) {
        take();
        inst.op = Opcode::Phi;
        const Type* t = parse_type();
        if (!t) return false;
        inst.type = t;
        do {
            if (!expect_punct('[', "to open phi incoming")) return false;
            auto v = parse_value(t);
            if (!v) return false;
            if (!expect_punct(',', "inside phi incoming")) return false;
            if (!at(Tok::Local)) {
                error("expected incoming block label");
                return false;
            }
            inst.operands.push_back(*v);
            inst.labels.push_back(take().text);
            if (!expect_punct(']', "to close phi incoming")) return false;
        } while (accept_punct(','));
        return true;
    }

    bool parse_br(Instruction& inst) {
        take();
        inst.op = Opcode::Br;
        inst.type = Types::void_ty();
        if (accept_ident("label")) {
            if (!at(Tok::Local)) {
                error("expected branch target");
                return false;
            }
            inst.labels.push_back(take().text);
            return true;
        }
        auto c = parse_typed_value();
        if (!c) return false;
        inst.operands.push_back(*c);
        for (int i = 0; i < 2; i++) {
            if (!expect_punct(',', "before branch target")) return false;
            if (!expect_ident("label")) return false;
            if (!at(Tok::Local)) {
                error("expected branch target");
                return false;
            }
            inst.labels.push_back(take().text);
        }
        return true;
    }

    bool parse_ret(Instruction& inst) {
        take();
        inst.op = Opcode::Ret;
        inst.type = Types::void_ty();
        if (accept_ident("void")) return true;
        auto v = parse_typed_value();
        if (!v) return false;
        inst.operands.push_back(*v);
        return true;
    }

    bool parse_call(Instruction& inst) {
        take();
        inst.op = Opcode::Call;
        // calling-convention words are dropped
        while (at(Tok::Ident) && (cur().text == "fastcc" || cur().text == "ccc")) take();
        const Type* ret = parse_type();
        if (!ret) return false;
        inst.type = ret;
        if (!at(Tok::GlobalN)) {
            error("expected call target");
            return false;
        }
        inst.callee = take().text;
        if (!expect_punct('(', "after call target")) return false;
        while (!at_punct(')')) {
            if (!inst.operands.empty() && !expect_punct(',', "between call arguments"))
                return false;
            const Type* at_ty = parse_type();
            if (!at_ty) return false;
            while (at(Tok::Ident) && kDroppedParamAttrs.count(cur().text)) take();
            auto v = parse_value(at_ty);
            if (!v) return false;
            inst.operands.push_back(*v);
        }
        take();  // ')'
        if (ret->is_void()) {
            if (!inst.result.empty()) {
                error("void call cannot produce a result");
                return false;
            }
        }
        return true;
    }

    std::vector<Token> toks_;
    Diagnostics& diags_;
    size_t pos_ = 0;
    bool ok_ = true;
};

}  // namespace

std::optional<Module> parse_module(const std::string& text, Diagnostics& diags) {
    Lexer lex(text, diags);
    std::vector<Token> toks = lex.run();
    if (lex.failed) return std::nullopt;
    Parser p(std::move(toks), diags);
    std::optional<Module> m = p.run();
    if (!m) return std::nullopt;
    Diagnostics vd = validate(*m);
    diags.append(vd);
    if (vd.has_errors()) return std::nullopt;
    return m;
}

}  // namespace lf
