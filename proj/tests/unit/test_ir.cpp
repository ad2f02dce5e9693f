#include <bit>
#include <cstdint>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "lfir/parser.hpp"
#include "lfir/printer.hpp"
#include "lfir/validate.hpp"

using namespace lf;

namespace {

Module parse_ok(const std::string& text) {
    Diagnostics diags;
    auto m = parse_module(text, diags);
    INFO(diags.to_string());
    REQUIRE(m.has_value());
    REQUIRE_FALSE(diags.has_errors());
    return std::move(*m);
}

bool has_error(const Diagnostics& diags, const std::string& code) {
    for (const Diagnostic& d : diags)
        if (d.severity == Severity::Error && d.code == code) return true;
    return false;
}

bool has_warning(const Diagnostics& diags, const std::string& code) {
    for (const Diagnostic& d : diags)
        if (d.severity == Severity::Warning && d.code == code) return true;
    return false;
}

}  // namespace

TEST_CASE("types are interned structurally") {
    const Type* a = Types::array(Types::f32(), 8);
    const Type* b = Types::array(Types::f32(), 8);
    CHECK(a == b);
    CHECK(a != Types::array(Types::f32(), 9));
    CHECK(a->to_string() == "[8 x float]");
    CHECK(Types::address(Types::i8())->to_string() == "i8*");
    CHECK(Types::address(Types::address(Types::i8()))->to_string() == "i8**");
    CHECK(Types::array(Types::array(Types::f32(), 3), 2)->flat_size() == 6);
    CHECK(Types::array(Types::array(Types::f32(), 3), 2)->scalar() == Types::f32());
    CHECK(Types::array(Types::array(Types::f32(), 3), 2)->rank() == 2);
    CHECK(Types::vector(Types::f32(), 4)->to_string() == "<4 x float>");
    CHECK(Types::vector(Types::f32(), 4)->has_vector());
    CHECK_THROWS(Types::int_ty(16));
    CHECK_THROWS(Types::array(Types::f32(), 0));
}

TEST_CASE("empty input parses to an empty module") {
    Diagnostics diags;
    auto m = parse_module("", diags);
    REQUIRE(m.has_value());
    CHECK(m->globals.empty());
    CHECK(m->functions.empty());
    CHECK(diags.empty());
}

TEST_CASE("three-role module parses with expected structure") {
    Module m = parse_ok(fixtures::kTwoFloatParamsModule);
    REQUIRE(m.functions.size() == 1);
    const Function& f = m.functions[0];
    CHECK(f.name == "main");
    REQUIRE(f.params.size() == 3);
    CHECK(f.params[0].name == "params");
    CHECK(f.params[0].type == Types::address(Types::address(Types::i8())));
    REQUIRE(f.blocks.size() == 1);
    CHECK(f.blocks[0].label == "entry");
    REQUIRE(f.blocks[0].insts.size() == 8);
    CHECK(f.blocks[0].insts[0].op == Opcode::Bitcast);
    CHECK(f.blocks[0].insts[1].op == Opcode::Load);
    CHECK(f.blocks[0].insts[1].result == "arg0");
    CHECK(f.blocks[0].insts[4].op == Opcode::Gep);
    CHECK(f.blocks[0].insts[4].inbounds);
    CHECK(f.blocks[0].insts[7].op == Opcode::Ret);
}

TEST_CASE("standalone module parses with volatile loads and a global") {
    Module m = parse_ok(fixtures::kTwoFloatStandaloneModule);
    REQUIRE(m.globals.size() == 1);
    CHECK(m.globals[0].name == "arg0");
    CHECK(m.globals[0].type == Types::array(Types::f32(), 2));
    CHECK(m.globals[0].init.zero);
    CHECK(m.globals[0].align == 8);
    const Function& f = m.functions[0];
    CHECK(f.params.empty());
    CHECK(f.blocks[0].insts[2].op == Opcode::Load);
    CHECK(f.blocks[0].insts[2].is_volatile);
    CHECK(f.blocks[0].insts[3].is_volatile);
}

TEST_CASE("print/parse round-trip is structural identity") {
    for (const char* text :
         {fixtures::kTwoFloatParamsModule, fixtures::kTwoFloatStandaloneModule,
          fixtures::kVecmul8StandaloneModule}) {
        Module m1 = parse_ok(text);
        std::string printed = print_module(m1);
        Module m2 = parse_ok(printed);
        CHECK(structurally_equal(m1, m2));
        CHECK(print_module(m2) == printed);
    }
}

TEST_CASE("modern spelling parses to the same structure as legacy") {
    Module legacy = parse_ok(fixtures::kVecmul8StandaloneModule);
    std::string modern_text = print_module(legacy, Syntax::Modern);
    CHECK(modern_text.find("load volatile float, float*") != std::string::npos);
    CHECK(modern_text.find("getelementptr inbounds [8 x float], [8 x float]*") !=
          std::string::npos);
    Module modern = parse_ok(modern_text);
    CHECK(structurally_equal(legacy, modern));

    const char* modern_pair = R"(
define void @main(i8** %params, i8** %temps, i8** %retval) {
  %0 = bitcast i8** %params to [2 x float]**
  %arg0 = load [2 x float]*, [2 x float]** %0, align 8
  %1 = load i8*, i8** %temps, align 8
  %2 = getelementptr inbounds [2 x float], [2 x float]* %arg0, i64 0, i64 0
  %3 = getelementptr inbounds [2 x float], [2 x float]* %arg0, i64 0, i64 1
  %4 = load float, float* %2, align 8
  %5 = load float, float* %3, align 8
  ret void
}
)";
    CHECK(structurally_equal(parse_ok(fixtures::kTwoFloatParamsModule),
                             parse_ok(modern_pair)));
}

TEST_CASE("attributes and metadata are dropped with warnings, not errors") {
    const char* decorated = R"(
source_filename = "m.ll"
target datalayout = "e-m:e-i64:64-f80:128-n8:16:32:64-S128"

define void @main(i8** nocapture %params, i8** %temps, i8** %retval) norecurse nounwind speculatable #0 {
  %0 = bitcast i8** %params to [2 x float]**
  %arg0 = load [2 x float]** %0, align 8, !dbg !7
  %1 = load i8** %temps, align 8
  %2 = getelementptr inbounds [2 x float]* %arg0, i64 0, i64 0
  %3 = getelementptr inbounds [2 x float]* %arg0, i64 0, i64 1
  %4 = load float* %2, align 8
  %5 = load float* %3, align 8
  ret void
}

attributes #0 = { norecurse nounwind }
!7 = !{!"some debug info"}
)";
    Diagnostics diags;
    auto m = parse_module(decorated, diags);
    REQUIRE(m.has_value());
    CHECK_FALSE(diags.has_errors());
    CHECK(has_warning(diags, "dropped-attribute"));
    CHECK(has_warning(diags, "dropped-metadata"));
    CHECK(structurally_equal(*m, parse_ok(fixtures::kTwoFloatParamsModule)));
}

TEST_CASE("validator rejects use before definition") {
    const char* bad = R"(
define void @main() {
  %x = fadd float %y, 1.0
  %y = fadd float %x, 1.0
  ret void
}
)";
    Diagnostics diags;
    auto m = parse_module(bad, diags);
    CHECK_FALSE(m.has_value());
    CHECK(has_error(diags, "ssa-use-before-def"));
}

TEST_CASE("validator rejects dominance violations across blocks") {
    const char* bad = R"(
define void @main() {
  br i1 true, label %a, label %b

a:
  %x = add i64 1, 2
  br label %join

b:
  br label %join

join:
  %y = add i64 %x, 1
  ret void
}
)";
    Diagnostics diags;
    auto m = parse_module(bad, diags);
    CHECK_FALSE(m.has_value());
    CHECK(has_error(diags, "ssa-use-before-def"));
}

TEST_CASE("validator catches structural errors") {
    Diagnostics d1;
    CHECK_FALSE(parse_module("define void @main() {\n  %x = add i64 1, 2\n}\n", d1));
    CHECK(has_error(d1, "missing-terminator"));

    Diagnostics d2;
    CHECK_FALSE(parse_module(
        "define void @main() {\n  br label %nowhere\n}\n", d2));
    CHECK(has_error(d2, "unknown-label"));

    Diagnostics d3;
    CHECK_FALSE(parse_module(
        "@a = global float 0.0\n@a = global float 1.0\n", d3));
    CHECK(has_error(d3, "duplicate-name"));

    Diagnostics d4;
    CHECK_FALSE(parse_module(
        "define void @main() {\n  %x = add i64 1, 2\n  %x = add i64 3, 4\n  ret void\n}\n",
        d4));
    CHECK(has_error(d4, "duplicate-name"));

    Diagnostics d5;
    CHECK_FALSE(parse_module(
        "define void @main() {\n  %c = call float @sinf(float 1.0)\n  ret void\n}\n",
        d5));
    CHECK(has_error(d5, "unknown-callee"));
}

TEST_CASE("validator accepts phi loops and rejects mismatched phis") {
    parse_ok(fixtures::kVecmul8StandaloneModule);

    const char* bad_phi = R"(
define void @main() {
  br label %loop

loop:
  %i = phi i64 [ 0, %entry ], [ %next, %loop ], [ 7, %ghost ]
  %next = add i64 %i, 1
  %done = icmp eq i64 %next, 8
  br i1 %done, label %exit, label %loop

exit:
  ret void
}
)";
    Diagnostics diags;
    CHECK_FALSE(parse_module(bad_phi, diags));
    CHECK(has_error(diags, "unknown-label"));
}

TEST_CASE("constant gep indices outside bounds warn") {
    const char* text = R"(
@a = global [2 x float] zeroinitializer
define void @main() {
  %p = getelementptr inbounds [2 x float]* @a, i64 0, i64 5
  %v = load float* %p
  ret void
}
)";
    Diagnostics diags;
    auto m = parse_module(text, diags);
    REQUIRE(m.has_value());
    CHECK(has_warning(diags, "inbounds-out-of-range"));
}

TEST_CASE("float constants round-trip bit-exactly") {
    CHECK(float_literal(1.0f) == "1.000000e+00");
    CHECK(float_literal(0.1f) == "1.000000e-01");
    // 0x40400001: the float just above 3.0, which six significant digits
    // cannot distinguish from 3.0 — must fall back to the hex spelling.
    float f = std::bit_cast<float>(uint32_t{0x40400001});
    std::string lit = float_literal(f);
    CHECK(lit.substr(0, 2) == "0x");
    std::string text = "@g = global float " + lit + "\n";
    Module m = parse_ok(text);
    REQUIRE_FALSE(m.globals[0].init.zero);
    CHECK(m.globals[0].init.elems[0].fval == f);
}

TEST_CASE("non-zero global initializers round-trip") {
    const char* text = R"(
@w = global [2 x [3 x float]] [[3 x float] [float 1.000000e+00, float 2.000000e+00, float 3.000000e+00], [3 x float] [float 4.000000e+00, float 5.000000e+00, float 6.000000e+00]]
@n = global i32 7
)";
    Module m = parse_ok(text);
    REQUIRE(m.globals.size() == 2);
    CHECK(m.globals[0].init.elems.size() == 6);
    CHECK(m.globals[0].init.elems[4].fval == 5.0f);
    CHECK(m.globals[1].init.elems[0].ival == 7);
    Module again = parse_ok(print_module(m));
    CHECK(structurally_equal(m, again));
}

TEST_CASE("renumber_locals compacts numeric names and keeps named ones") {
    const char* gappy = R"(
define void @main() {
  %5 = add i64 1, 2
  %keep = add i64 %5, 3
  %9 = add i64 %keep, %5
  ret void
}
)";
    Module m = parse_ok(gappy);
    renumber_locals(m);
    const Block& b = m.functions[0].blocks[0];
    CHECK(b.insts[0].result == "0");
    CHECK(b.insts[1].result == "keep");
    CHECK(b.insts[2].result == "1");
    CHECK(b.insts[2].operands[0].name == "keep");
    CHECK(b.insts[2].operands[1].name == "0");
}

TEST_CASE("structural equality ignores metadata residue") {
    Module a = parse_ok(fixtures::kTwoFloatStandaloneModule);
    Module b = parse_ok(fixtures::kTwoFloatStandaloneModule);
    b.metadata.push_back("!7 = !{}");
    CHECK(structurally_equal(a, b));
    b.functions[0].blocks[0].insts[2].is_volatile = false;
    CHECK_FALSE(structurally_equal(a, b));
}

TEST_CASE("vector types parse but are flagged by later stages") {
    const char* text = R"(
define void @main() {
  %v = fmul <4 x float> %v0, %v0
  ret void
}
)";
    // %v0 is undefined; the point here is only that the type grammar accepts
    // vector spellings so legality checking can reject them with a real
    // location instead of a parse failure.
    Diagnostics diags;
    parse_module(text, diags);
    CHECK(has_error(diags, "unknown-value"));
    bool saw_syntax_error = false;
    for (const Diagnostic& d : diags)
        if (d.code == "syntax-error") saw_syntax_error = true;
    CHECK_FALSE(saw_syntax_error);
}
