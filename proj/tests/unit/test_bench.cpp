#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lfir/bench.hpp"
#include "lfir/image.hpp"
#include "lfir/interp.hpp"
#include "lfir/transform.hpp"

using namespace lf;
namespace lb = lf::bench;

namespace {

Module pipeline_of(const lb::BenchmarkCase& c) {
    Diagnostics gd;
    auto m0 = lb::generate(c, gd);
    REQUIRE_MESSAGE(m0.has_value(), ("generate " + c.name + ": " + gd.to_string()));
    Diagnostics pd;
    auto m1 = run_pipeline(*m0, PassConfig{}, pd);
    REQUIRE_MESSAGE(m1.has_value(), ("pipeline " + c.name + ": " + pd.to_string()));
    return std::move(*m1);
}

std::vector<float> run_on(const Module& m, const lb::BenchmarkCase& c,
                          const std::vector<std::vector<float>>& inputs) {
    MemoryImage img = MemoryImage::for_module(m);
    for (size_t k = 0; k < inputs.size(); k++) {
        auto* bank = img.find("arg" + std::to_string(k));
        REQUIRE(bank != nullptr);
        REQUIRE(bank->size() == inputs[k].size());
        for (size_t i = 0; i < inputs[k].size(); i++)
            (*bank)[i] = Word::f32(inputs[k][i]);
    }
    Diagnostics rd;
    auto rr = run(m, img, rd);
    REQUIRE_MESSAGE(rr.has_value(), (c.name + ": " + rd.to_string()));
    const auto* out = rr->image.find("ret0");
    REQUIRE(out != nullptr);
    std::vector<float> v;
    for (const Word& w : *out) v.push_back(w.f);
    return v;
}

int64_t cycles_from_report(const std::string& report, const std::string& name) {
    std::string key = "case=" + name + " ";
    size_t at = report.find(key);
    REQUIRE(at != std::string::npos);
    size_t cy = report.find("cycles=", at);
    REQUIRE(cy != std::string::npos);
    return std::stoll(report.substr(cy + 7));
}

}  // namespace

TEST_CASE("benchmark registry lists the canonical cases in order") {
    std::vector<std::string> want = {
        "vecmul_a", "vecmul_b",  "vecmul_b_u", "dense_a",  "dense_b",
        "softmax_a", "softmax_b", "softmax_b_u", "conv2d_a", "conv2d_a_u",
        "conv2d_b", "maxp_a",    "maxp_b",     "maxp_b_u", "thxprlsg",
        "mnist_mlp",
    };
    const auto& reg = lb::registry();
    REQUIRE(reg.size() == want.size());
    for (size_t i = 0; i < want.size(); i++) CHECK(reg[i].name == want[i]);
    CHECK(lb::find_case("conv2d_b") != nullptr);
    CHECK(lb::find_case("conv2d_b")->params.h == 64);
    CHECK(lb::find_case("nope") == nullptr);
}

TEST_CASE("benchmark shapes expose buffer sizes") {
    auto sizes = [&](const char* name) { return lb::input_sizes(*lb::find_case(name)); };
    auto outsz = [&](const char* name) { return lb::output_size(*lb::find_case(name)); };
    CHECK(sizes("vecmul_a") == std::vector<int64_t>{8, 8});
    CHECK(outsz("vecmul_a") == 8);
    CHECK(sizes("dense_b") == std::vector<int64_t>{64, 64 * 64, 64});
    CHECK(outsz("dense_b") == 64);
    CHECK(sizes("conv2d_a") == std::vector<int64_t>{64, 18});
    CHECK(outsz("conv2d_a") == 2 * 8 * 8);
    CHECK(sizes("maxp_b") == std::vector<int64_t>{32 * 32});
    CHECK(outsz("maxp_b") == 16 * 16);
    CHECK(sizes("mnist_mlp") == std::vector<int64_t>{784, 7840, 10});
    CHECK(outsz("mnist_mlp") == 10);
}

TEST_CASE("golden models match hand-computed results") {
    SUBCASE("vecmul") {
        lb::BenchmarkCase c{"t", "vecmul", {.n = 4}};
        auto out = lb::golden_run(c, {{1, 2, 3, 4}, {2, -1, 0.5f, 10}});
        std::vector<float> want = {2, -2, 1.5f, 40};
        CHECK(out == want);
    }
    SUBCASE("dense applies the affine map and clamps at zero") {
        lb::BenchmarkCase c{"t", "dense", {.n = 2}};
        // W[i][o] row-major: W[0]=[1,2], W[1]=[3,4]; z = x*W + b
        auto out = lb::golden_run(c, {{1, -1}, {1, 2, 3, 4}, {3, 1}});
        CHECK(out[0] == doctest::Approx(1.0));   // 1-3+3
        CHECK(out[1] == doctest::Approx(0.0));   // 2-4+1 < 0 -> 0
    }
    SUBCASE("conv2d identity filter reproduces the input") {
        lb::BenchmarkCase c{"t", "conv2d", {.h = 2, .w = 2, .channels = 1}};
        std::vector<float> in = {1, 2, 3, 4};
        std::vector<float> ident = {0, 0, 0, 0, 1, 0, 0, 0, 0};
        CHECK(lb::golden_run(c, {in, ident}) == in);
    }
    SUBCASE("conv2d ones filter sums the in-bounds neighborhood") {
        lb::BenchmarkCase c{"t", "conv2d", {.h = 3, .w = 3, .channels = 1}};
        std::vector<float> in = {1, 1, 1, 1, 1, 1, 1, 1, 1};
        std::vector<float> ones(9, 1.0f);
        auto out = lb::golden_run(c, {in, ones});
        CHECK(out[0] == 4);  // corner
        CHECK(out[1] == 6);  // edge
        CHECK(out[4] == 9);  // center
    }
    SUBCASE("maxp takes the window maximum") {
        lb::BenchmarkCase c{"t", "maxp", {.h = 2, .w = 4}};
        auto out = lb::golden_run(c, {{1, 5, -1, -2, 3, 2, -8, -3}});
        std::vector<float> want = {5, -1};
        CHECK(out == want);
    }
    SUBCASE("thxprlsg at zero") {
        lb::BenchmarkCase c{"t", "thxprlsg", {.n = 1}};
        auto out = lb::golden_run(c, {{0}});
        // tanh(0)=0, exp(0)=1, relu(1)=1, sigmoid(1)
        CHECK(out[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
    }
    SUBCASE("mnist with zero weights is uniform") {
        const auto& c = *lb::find_case("mnist_mlp");
        std::vector<float> x(784, 0.7f);
        std::vector<float> w(7840, 0.0f);
        std::vector<float> b(10, 0.0f);
        auto out = lb::golden_run(c, {x, w, b});
        for (float v : out) CHECK(v == doctest::Approx(0.1));
    }
    SUBCASE("input shape mismatches are rejected") {
        lb::BenchmarkCase c{"t", "vecmul", {.n = 4}};
        CHECK_THROWS_AS(lb::golden_run(c, {{1, 2, 3, 4}}), std::invalid_argument);
        CHECK_THROWS_AS(lb::golden_run(c, {{1}, {1, 2, 3, 4}}), std::invalid_argument);
    }
}

TEST_CASE("softmax golden reproduces the known ratio") {
    const auto& c = *lb::find_case("softmax_a");
    std::vector<float> x(8, 0.0f);
    x[1] = std::log(2.0f);
    auto out = lb::golden_run(c, {x});
    for (size_t i = 0; i < 8; i++)
        CHECK(out[i] == doctest::Approx(i == 1 ? 2.0 / 9.0 : 1.0 / 9.0));
}

TEST_CASE("generated modules agree with the golden models") {
    // Full pipeline + interpreter vs. the independent scalar reference,
    // many random images for the small/medium cases, a few at full scale.
    lb::SuiteOptions opt;
    for (const auto& c : lb::registry()) {
        opt.images = (c.name == "conv2d_b") ? 3 : 100;
        lb::CaseResult r = lb::run_case(c, opt);
        CHECK_MESSAGE(r.pass, (c.name + ": " + r.detail));
        CHECK(r.cycles > 0);
        CHECK(r.worst_rel_err <= opt.rel_tol);
    }
}

TEST_CASE("rolled and unrolled variants compute identical outputs") {
    std::vector<std::pair<std::string, std::string>> pairs = {
        {"vecmul_b", "vecmul_b_u"},
        {"softmax_b", "softmax_b_u"},
        {"conv2d_a", "conv2d_a_u"},
        {"maxp_b", "maxp_b_u"},
    };
    for (const auto& [rolled, unrolled] : pairs) {
        const auto& cr = *lb::find_case(rolled);
        const auto& cu = *lb::find_case(unrolled);
        Module mr = pipeline_of(cr);
        Module mu = pipeline_of(cu);
        for (int image = 0; image < 3; image++) {
            auto inputs = lb::random_inputs(cr, 11, image);
            auto got_r = run_on(mr, cr, inputs);
            auto got_u = run_on(mu, cu, inputs);
            REQUIRE(got_r.size() == got_u.size());
            for (size_t i = 0; i < got_r.size(); i++)
                CHECK_MESSAGE(got_r[i] == got_u[i],
                              (rolled + " vs " + unrolled + " at " +
                               std::to_string(i)));
        }
    }
}

TEST_CASE("softmax stays stable across wide input magnitudes") {
    const auto& c = *lb::find_case("softmax_a");
    Module m = pipeline_of(c);
    std::vector<float> x = {20, -20, 5, -5, 0, 13, -17, 2};
    auto got = run_on(m, c, {x});
    auto want = lb::golden_run(c, {x});
    double sum = 0;
    for (size_t i = 0; i < 8; i++) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-5));
        sum += got[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));

    // The generator's stretched images really do leave the unit box.
    auto stretched = lb::random_inputs(c, 1, 1);
    float peak = 0;
    for (float v : stretched[0]) peak = std::max(peak, std::abs(v));
    CHECK(peak > 1.0f);
    auto plain = lb::random_inputs(c, 1, 0);
    for (float v : plain[0]) CHECK(std::abs(v) <= 1.0f);
}

TEST_CASE("suite isolates a broken case") {
    lb::SuiteOptions opt;
    opt.images = 1;
    opt.post_pipeline_hook = [](const std::string& name, Module& m) {
        if (name != "dense_a") return;
        for (auto& f : m.functions)
            for (auto& b : f.blocks)
                for (auto& inst : b.insts)
                    if (inst.op == Opcode::FAdd) inst.op = Opcode::FSub;
    };
    auto results = lb::run_suite(opt);
    REQUIRE(results.size() == lb::registry().size());
    for (const auto& r : results) {
        if (r.name == "dense_a") {
            CHECK_FALSE(r.pass);
            CHECK_FALSE(r.detail.empty());
        } else {
            CHECK_MESSAGE(r.pass, (r.name + ": " + r.detail));
        }
    }
    std::string report = lb::render_report(results);
    CHECK(report.find("case=dense_a status=fail") != std::string::npos);
    CHECK(report.find("case=vecmul_a status=pass") != std::string::npos);
}

TEST_CASE("suite reports are deterministic and ordered") {
    lb::SuiteOptions opt;
    opt.images = 1;
    opt.seed = 7;
    auto r1 = lb::run_suite(opt);
    auto r2 = lb::run_suite(opt);
    std::string report = lb::render_report(r1);
    CHECK(report == lb::render_report(r2));

    size_t lines = 0, at = 0;
    for (const auto& c : lb::registry()) {
        size_t pos = report.find("case=" + c.name + " status=pass", at);
        REQUIRE_MESSAGE(pos != std::string::npos, (c.name + " line missing or failing"));
        at = pos + 1;
        lines++;
    }
    CHECK(lines == lb::registry().size());

    // Straight-line variants beat their rolled twins on the clock.
    CHECK(cycles_from_report(report, "vecmul_b_u") <
          cycles_from_report(report, "vecmul_b"));
}

TEST_CASE("partitioned buffers keep the suite exact") {
    lb::SuiteOptions opt;
    opt.images = 3;
    Diagnostics pd;
    auto p1 = parse_partition_spec("arg0:cyclic:factor=2", pd);
    auto p2 = parse_partition_spec("arg1:block:factor=2", pd);
    auto p3 = parse_partition_spec("ret0:cyclic:factor=4", pd);
    auto p4 = parse_partition_spec("tmp9:cyclic:factor=2", pd);  // absent: skipped
    REQUIRE(p1);
    REQUIRE(p2);
    REQUIRE(p3);
    REQUIRE(p4);
    REQUIRE_FALSE(pd.has_errors());
    opt.partitions = {*p1, *p2, *p3, *p4};
    auto res = lb::run_case(*lb::find_case("vecmul_a"), opt);
    CHECK_MESSAGE(res.pass, res.detail);
    CHECK(res.cycles > 0);
}
