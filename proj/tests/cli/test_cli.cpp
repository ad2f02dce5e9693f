// End-to-end tests for the lf driver: each case shells out to the real
// binary (path injected by the build) inside a scratch directory.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "lfir/schedule.hpp"

namespace fs = std::filesystem;

namespace {

const char* kVecModule = R"(
@a = global [8 x float] zeroinitializer, align 8
@b = global [8 x float] zeroinitializer, align 8
@out = global [8 x float] zeroinitializer, align 8

define void @main() {
  br label %loop

loop:
  %i = phi i64 [ 0, %entry ], [ %next, %loop ]
  %pa = getelementptr inbounds [8 x float]* @a, i64 0, i64 %i
  %pb = getelementptr inbounds [8 x float]* @b, i64 0, i64 %i
  %po = getelementptr inbounds [8 x float]* @out, i64 0, i64 %i
  %va = load volatile float* %pa, align 4
  %vb = load volatile float* %pb, align 4
  %prod = fmul float %va, %vb
  store volatile float %prod, float* %po, align 4
  %next = add i64 %i, 1
  %done = icmp eq i64 %next, 8
  br i1 %done, label %exit, label %loop

exit:
  ret void
}
)";

struct Proc {
    int exit = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Scratch directory per test, removed on destruction.
struct Sandbox {
    fs::path dir;
    Sandbox() {
        static int counter = 0;
        dir = fs::temp_directory_path() /
              ("lf-cli-" + std::to_string(::getpid()) + "-" +
               std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~Sandbox() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    fs::path file(const std::string& name, const std::string& text) const {
        fs::path p = dir / name;
        spit(p, text);
        return p;
    }

    // `cmdline` may reference $LF and runs with the sandbox as cwd.
    Proc sh(const std::string& cmdline) const {
        fs::path out_f = dir / ".stdout", err_f = dir / ".stderr";
        std::string cmd = "cd '" + dir.string() + "' && LF='" + LF_BIN +
                          "' && " + cmdline + " >'" + out_f.string() +
                          "' 2>'" + err_f.string() + "'";
        int rc = std::system(cmd.c_str());
        Proc p;
        p.exit = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
        p.out = slurp(out_f);
        p.err = slurp(err_f);
        return p;
    }
};

int count_lines_with(const std::string& text, const std::string& needle) {
    int n = 0;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        if (line.find(needle) != std::string::npos) n++;
    return n;
}

int64_t total_cycles_of(const std::string& report) {
    std::optional<int64_t> total;
    auto blocks = lf::parse_schedule_report(report, &total);
    REQUIRE(blocks.has_value());
    REQUIRE(total.has_value());
    return *total;
}

}  // namespace

TEST_CASE("check accepts a valid module and rejects garbage") {
    Sandbox sb;
    sb.file("vec.ll", kVecModule);
    Proc ok = sb.sh("$LF check vec.ll");
    CHECK(ok.exit == 0);
    CHECK(ok.out.empty());
    CHECK(ok.err.empty());

    sb.file("bad.ll", "define broken {\n");
    Proc bad = sb.sh("$LF check bad.ll");
    CHECK(bad.exit == 1);
    // Diagnostics look like file:line: severity: message
    CHECK(bad.err.find("bad.ll:") != std::string::npos);
    CHECK(bad.err.find(": error: ") != std::string::npos);

    Proc missing = sb.sh("$LF check nosuch.ll");
    CHECK(missing.exit == 1);
}

TEST_CASE("transform unrolls under a raised threshold and emits valid IR") {
    Sandbox sb;
    sb.file("vec.ll", kVecModule);
    Proc t = sb.sh("$LF transform vec.ll --unroll-threshold 10000 -o out.ll");
    REQUIRE(t.exit == 0);
    std::string out = slurp(sb.dir / "out.ll");
    CHECK(out.find("br ") == std::string::npos);  // loop fully dissolved
    Proc re = sb.sh("$LF check out.ll");
    CHECK(re.exit == 0);
}

TEST_CASE("partition rewrites arrays and polices its specs") {
    Sandbox sb;
    sb.file("vec.ll", kVecModule);
    Proc p = sb.sh("$LF partition vec.ll --partition a:cyclic:factor=2");
    REQUIRE(p.exit == 0);
    CHECK(p.out.find("@a_p0") != std::string::npos);
    CHECK(p.out.find("@a_p1") != std::string::npos);

    Proc missing = sb.sh("$LF partition vec.ll --partition nope:cyclic:factor=2");
    CHECK(missing.exit == 1);

    Proc grammar = sb.sh("$LF partition vec.ll --partition a:weird");
    CHECK(grammar.exit == 2);
}

TEST_CASE("schedule reports per-block slots and a cycle total") {
    Sandbox sb;
    sb.file("vec.ll", kVecModule);
    Proc s = sb.sh("$LF schedule vec.ll");
    REQUIRE(s.exit == 0);
    int64_t base = total_cycles_of(s.out);
    CHECK(base > 0);
    CHECK(count_lines_with(s.out, "sched fn=main block=loop") == 10);

    SUBCASE("latency overrides slow the clock") {
        Proc slow = sb.sh("$LF schedule vec.ll --lat load=9");
        REQUIRE(slow.exit == 0);
        CHECK(total_cycles_of(slow.out) > base);
    }
    SUBCASE("a single port serializes same-bank traffic") {
        // Ports are a per-bank budget, so the pressure case is many loads
        // from one bank feeding a single store.
        std::ostringstream red;
        red << "@a = global [8 x i32] zeroinitializer, align 8\n"
            << "@s = global [1 x i32] zeroinitializer, align 8\n\n"
            << "define void @main() {\n";
        for (int i = 0; i < 8; i++) {
            red << "  %p" << i << " = getelementptr inbounds [8 x i32]* @a, "
                << "i64 0, i64 " << i << "\n";
            red << "  %v" << i << " = load volatile i32* %p" << i
                << ", align 4\n";
        }
        red << "  %s1 = add i32 %v0, %v1\n";
        for (int i = 2; i < 8; i++)
            red << "  %s" << i << " = add i32 %s" << (i - 1) << ", %v" << i
                << "\n";
        red << "  %ps = getelementptr inbounds [1 x i32]* @s, i64 0, i64 0\n"
            << "  store volatile i32 %s7, i32* %ps, align 4\n"
            << "  ret void\n}\n";
        sb.file("red.ll", red.str());
        Proc wide = sb.sh("$LF schedule red.ll");
        Proc narrow = sb.sh("$LF schedule red.ll --ports 1");
        REQUIRE(wide.exit == 0);
        REQUIRE(narrow.exit == 0);
        CHECK(total_cycles_of(narrow.out) > total_cycles_of(wide.out));
    }
    SUBCASE("gantt renders in text format only") {
        Proc g = sb.sh("$LF schedule vec.ll --gantt");
        REQUIRE(g.exit == 0);
        CHECK(g.out.find("fn=main block=loop latency=") != std::string::npos);
        CHECK(g.out.find('|') != std::string::npos);
        Proc m = sb.sh("$LF schedule vec.ll --gantt --format machine");
        REQUIRE(m.exit == 0);
        CHECK(m.out.find('|') == std::string::npos);
    }
    SUBCASE("bad resource flags are usage errors") {
        CHECK(sb.sh("$LF schedule vec.ll --lat load=x").exit == 2);
        CHECK(sb.sh("$LF schedule vec.ll --lat nosuch=3").exit == 2);
        CHECK(sb.sh("$LF schedule vec.ll --ports 0").exit == 2);
        CHECK(sb.sh("$LF schedule vec.ll --format csv").exit == 2);
    }
}

TEST_CASE("run reads MIF inputs and emits MIF outputs") {
    Sandbox sb;
    sb.file("vec.ll", kVecModule);
    fs::create_directories(sb.dir / "mifs");
    // a = [1..8] as float bits, b missing (zeros).
    std::ostringstream mif;
    mif << "DEPTH = 8;\nWIDTH = 32;\nADDRESS_RADIX = HEX;\n"
        << "DATA_RADIX = HEX;\nCONTENT BEGIN\n";
    for (int i = 0; i < 8; i++) {
        union {
            float f;
            uint32_t u;
        } v{static_cast<float>(i + 1)};
        char line[48];
        std::snprintf(line, sizeof line, "%X : %08X;\n", i, v.u);
        mif << line;
    }
    mif << "END;\n";
    spit(sb.dir / "mifs" / "a.mif", mif.str());

    SUBCASE("missing input banks default to zeros") {
        Proc r = sb.sh("$LF run vec.ll --mem mifs");
        REQUIRE(r.exit == 0);
        CHECK(r.out == "bank=out n=8 data=0,0,0,0,0,0,0,0\n");
    }
    SUBCASE("provided banks flow through to the outputs") {
        spit(sb.dir / "mifs" / "b.mif",
             "WIDTH=32;\nDEPTH=8;\nADDRESS_RADIX=HEX;\nDATA_RADIX=HEX;\n"
             "CONTENT BEGIN\n[0..7] : 40000000;\nEND;\n");  // all 2.0f
        Proc r = sb.sh("$LF run vec.ll --mem mifs --emit-mem got");
        REQUIRE(r.exit == 0);
        CHECK(r.out == "bank=out n=8 data=2,4,6,8,10,12,14,16\n");
        std::string emitted = slurp(sb.dir / "got" / "out.mif");
        CHECK(emitted.find("DEPTH=8;") != std::string::npos);
        CHECK(emitted.find("40000000") != std::string::npos);  // 2.0f
    }
    SUBCASE("shape mismatches are operational errors") {
        spit(sb.dir / "mifs" / "b.mif",
             "WIDTH=32;\nDEPTH=4;\nADDRESS_RADIX=HEX;\nDATA_RADIX=HEX;\n"
             "CONTENT BEGIN\nEND;\n");
        Proc r = sb.sh("$LF run vec.ll --mem mifs");
        CHECK(r.exit == 1);
        CHECK(r.err.find("depth") != std::string::npos);
    }
}

TEST_CASE("staged invocations match the combined one") {
    Sandbox sb;
    sb.file("vec.ll", kVecModule);
    std::string specs =
        " --partition a:cyclic:factor=2 --partition b:cyclic:factor=2"
        " --partition out:cyclic:factor=2";
    Proc staged = sb.sh(
        "$LF transform vec.ll --unroll-threshold 10000 | $LF partition -" +
        specs + " | $LF schedule -");
    REQUIRE(staged.exit == 0);
    Proc combined = sb.sh(
        "$LF transform vec.ll --unroll-threshold 10000 -o t.ll && "
        "$LF schedule t.ll" + specs);
    REQUIRE(combined.exit == 0);
    CHECK(total_cycles_of(staged.out) == total_cycles_of(combined.out));
    CHECK(staged.out == combined.out);
}

TEST_CASE("bench prints one stable line per case") {
    Sandbox sb;
    Proc b1 = sb.sh("$LF bench --seed 5");
    REQUIRE(b1.exit == 0);
    CHECK(count_lines_with(b1.out, "case=") == 16);
    CHECK(count_lines_with(b1.out, "status=pass") == 16);
    CHECK(count_lines_with(b1.out, "worst_rel_err=") == 16);
    CHECK(count_lines_with(b1.out, "cycles=") == 16);

    Proc b2 = sb.sh("$LF bench --seed 5 --format machine");
    REQUIRE(b2.exit == 0);
    CHECK(b1.out == b2.out);  // byte-identical across runs and formats
}

TEST_CASE("usage problems exit with code 2") {
    Sandbox sb;
    CHECK(sb.sh("$LF").exit == 2);
    CHECK(sb.sh("$LF frobnicate").exit == 2);
    CHECK(sb.sh("$LF bench --format json").exit == 2);
    CHECK(sb.sh("$LF --help").exit == 0);
    CHECK(sb.sh("$LF schedule --help").exit == 0);
}
