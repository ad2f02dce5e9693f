// Python bindings over the textual surface: every entry point takes and
// returns IR text, MIF text, or plain Python containers, so callers never
// hold C++ object lifetimes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lfir/bench.hpp"
#include "lfir/diagnostics.hpp"
#include "lfir/image.hpp"
#include "lfir/interp.hpp"
#include "lfir/mif.hpp"
#include "lfir/parser.hpp"
#include "lfir/partition.hpp"
#include "lfir/printer.hpp"
#include "lfir/schedule.hpp"
#include "lfir/transform.hpp"
#include "lfir/validate.hpp"

namespace py = pybind11;

namespace {

using namespace lf;

std::vector<std::string> diag_lines(const Diagnostics& d) {
    std::vector<std::string> out;
    out.reserve(d.items().size());
    for (const auto& item : d.items()) out.push_back(item.to_string());
    return out;
}

std::string joined(const Diagnostics& d) {
    std::string out;
    for (const auto& line : diag_lines(d)) {
        if (!out.empty()) out += "\n";
        out += line;
    }
    return out.empty() ? "unknown failure" : out;
}

Module parse_strict(const std::string& text) {
    Diagnostics d;
    auto m = parse_module(text, d);
    if (!m || d.has_errors()) throw py::value_error(joined(d));
    Diagnostics v = validate(*m);
    if (v.has_errors()) throw py::value_error(joined(v));
    return *m;
}

PassConfig make_config(int64_t unroll_threshold, int64_t inline_threshold,
                       const std::vector<std::string>& deny) {
    PassConfig cfg;
    cfg.unroll_threshold = unroll_threshold;
    cfg.inline_threshold = inline_threshold;
    if (!deny.empty()) cfg.denylist = {deny.begin(), deny.end()};
    return cfg;
}

ResourceModel make_resources(int64_t ports,
                             const std::map<std::string, int64_t>& latencies) {
    ResourceModel r;
    if (ports < 1) throw py::value_error("ports must be at least 1");
    r.ports = ports;
    for (const auto& [name, lat] : latencies) {
        auto cls = opclass_by_name(name);
        if (!cls) throw py::value_error("unknown op class: " + name);
        if (lat < 0) throw py::value_error(name + ": latency must be >= 0");
        r.latency[*cls] = lat;
    }
    return r;
}

void apply_specs(Module& m, const std::vector<std::string>& specs) {
    for (const auto& s : specs) {
        Diagnostics d;
        auto spec = parse_partition_spec(s, d);
        if (!spec) throw py::value_error(joined(d));
        if (!apply_partition(m, *spec, d)) throw py::value_error(joined(d));
    }
}

std::vector<std::string> py_check(const std::string& text) {
    Diagnostics d;
    auto m = parse_module(text, d);
    if (!m || d.has_errors()) return diag_lines(d);
    Diagnostics v = validate(*m);
    if (v.has_errors()) return diag_lines(v);
    Module copy = *m;
    Diagnostics rd;
    if (!restructure_signature(copy, rd)) return diag_lines(rd);
    Diagnostics legal = check_legality(copy);
    return diag_lines(legal);
}

std::string py_transform(const std::string& text, int64_t unroll_threshold,
                         int64_t inline_threshold,
                         const std::vector<std::string>& deny) {
    Module m = parse_strict(text);
    Diagnostics d;
    auto out = run_pipeline(m, make_config(unroll_threshold, inline_threshold, deny), d);
    if (!out) throw py::value_error(joined(d));
    return print_module(*out);
}

std::string py_partition(const std::string& text,
                         const std::vector<std::string>& specs) {
    Module m = parse_strict(text);
    apply_specs(m, specs);
    return print_module(m);
}

std::string py_schedule(const std::string& text, int64_t ports,
                        const std::map<std::string, int64_t>& latencies,
                        const std::vector<std::string>& specs) {
    Module m = parse_strict(text);
    apply_specs(m, specs);
    ResourceModel r = make_resources(ports, latencies);
    Diagnostics d;
    MemoryImage img = image_for(m, d);
    if (d.has_errors()) throw py::value_error(joined(d));
    ScheduleResult sched;
    auto total = count_cycles(m, r, img, d, &sched);
    if (!total) throw py::value_error(joined(d));
    return render_schedule(m, sched, *total);
}

int64_t py_cycle_count(const std::string& text, int64_t ports,
                       const std::map<std::string, int64_t>& latencies,
                       const std::vector<std::string>& specs) {
    Module m = parse_strict(text);
    apply_specs(m, specs);
    ResourceModel r = make_resources(ports, latencies);
    Diagnostics d;
    MemoryImage img = image_for(m, d);
    if (d.has_errors()) throw py::value_error(joined(d));
    auto total = count_cycles(m, r, img, d);
    if (!total) throw py::value_error(joined(d));
    return *total;
}

py::object word_to_py(const Word& w) {
    if (w.tag == Word::Tag::F32) return py::float_(static_cast<double>(w.f));
    return py::int_(w.i);
}

Word word_from_py(const Word& like, py::handle v) {
    if (like.tag == Word::Tag::F32)
        return Word::f32(static_cast<float>(v.cast<double>()));
    auto i = v.cast<int64_t>();
    switch (like.tag) {
        case Word::Tag::I1: return Word::i1(i != 0);
        case Word::Tag::I32: return Word::i32(static_cast<int32_t>(i));
        default: return Word::i64(i);
    }
}

py::dict py_run(const std::string& text,
                const std::map<std::string, py::list>& inputs,
                const std::string& entry) {
    Module m = parse_strict(text);
    Diagnostics d;
    MemoryImage img = image_for(m, d);
    if (d.has_errors()) throw py::value_error(joined(d));
    for (const auto& [name, values] : inputs) {
        auto* bank = img.find(name);
        if (!bank) throw py::value_error("no bank named " + name);
        if (values.size() != bank->size())
            throw py::value_error(name + ": got " + std::to_string(values.size()) +
                                  " values, bank holds " +
                                  std::to_string(bank->size()));
        for (size_t i = 0; i < bank->size(); ++i)
            (*bank)[i] = word_from_py((*bank)[i], values[i]);
    }
    auto res = run(m, entry, img, kDefaultFuel, d);
    if (!res) throw py::value_error(joined(d));
    py::dict out;
    for (const auto& name : output_banks(m)) {
        const auto* bank = res->image.find(name);
        if (!bank) continue;
        py::list vals;
        for (const auto& w : *bank) vals.append(word_to_py(w));
        out[py::str(name)] = vals;
    }
    return out;
}

py::list py_bench(const std::vector<std::string>& names, int images,
                  uint32_t seed) {
    bench::SuiteOptions opt;
    opt.images = images;
    opt.seed = seed;
    std::vector<bench::CaseResult> results;
    if (names.empty()) {
        results = bench::run_suite(opt);
    } else {
        for (const auto& n : names) {
            const auto* c = bench::find_case(n);
            if (!c) throw py::value_error("no benchmark named " + n);
            results.push_back(bench::run_case(*c, opt));
        }
    }
    py::list out;
    for (const auto& r : results) {
        py::dict row;
        row["name"] = r.name;
        row["pass"] = r.pass;
        row["worst_rel_err"] = r.worst_rel_err;
        row["cycles"] = r.cycles;
        row["detail"] = r.detail;
        out.append(row);
    }
    return out;
}

std::string py_bench_report(int images, uint32_t seed) {
    bench::SuiteOptions opt;
    opt.images = images;
    opt.seed = seed;
    return bench::render_report(bench::run_suite(opt));
}

std::vector<std::string> py_benchmarks() {
    std::vector<std::string> names;
    for (const auto& c : bench::registry()) names.push_back(c.name);
    return names;
}

std::string py_mif_encode(const std::vector<uint64_t>& words, int width) {
    if (width != 1 && width != 32 && width != 64)
        throw py::value_error("width must be 1, 32, or 64");
    uint64_t mask = width == 64 ? ~0ull : ((1ull << width) - 1);
    for (uint64_t w : words)
        if ((w & ~mask) != 0) throw py::value_error("word exceeds width");
    MifImage img;
    img.width = width;
    img.words = words;
    return store_mif(img);
}

py::tuple py_mif_decode(const std::string& text) {
    Diagnostics d;
    auto img = load_mif(text, d);
    if (!img) throw py::value_error(joined(d));
    return py::make_tuple(img->width, img->words);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Loop-free kernel toolchain: parse, transform, partition, "
                "schedule, and execute the textual IR dialect.";

    mod.def("check", &py_check, py::arg("text"),
            "Parse, validate, and legality-check IR text. Returns diagnostic "
            "strings; an empty list means the module is clean.");

    mod.def("transform", &py_transform, py::arg("text"),
            py::arg("unroll_threshold") = 20, py::arg("inline_threshold") = 100,
            py::arg("denylist") = std::vector<std::string>{},
            "Run the hardware-enabling pipeline and return the new IR text.");

    mod.def("partition", &py_partition, py::arg("text"), py::arg("specs"),
            "Apply partition specs ('<array>:<scheme>[:factor=F][:dim=D]') "
            "and return the rewritten IR text.");

    mod.def("schedule", &py_schedule, py::arg("text"), py::arg("ports") = 2,
            py::arg("latencies") = std::map<std::string, int64_t>{},
            py::arg("partitions") = std::vector<std::string>{},
            "Schedule every block and return the report, one line per "
            "instruction plus a final cycle total.");

    mod.def("cycle_count", &py_cycle_count, py::arg("text"), py::arg("ports") = 2,
            py::arg("latencies") = std::map<std::string, int64_t>{},
            py::arg("partitions") = std::vector<std::string>{},
            "Total cycles to execute the module on a zero-filled image.");

    mod.def("run", &py_run, py::arg("text"),
            py::arg("inputs") = std::map<std::string, py::list>{},
            py::arg("entry") = std::string{},
            "Execute the module. `inputs` maps bank names to flat value "
            "lists; returns {output bank: values}.");

    mod.def("benchmarks", &py_benchmarks, "Registered benchmark names, in order.");

    mod.def("bench", &py_bench, py::arg("names") = std::vector<std::string>{},
            py::arg("images") = 3, py::arg("seed") = 1,
            "Run benchmark cases against their golden models. Returns one "
            "dict per case: name, pass, worst_rel_err, cycles, detail.");

    mod.def("bench_report", &py_bench_report, py::arg("images") = 3,
            py::arg("seed") = 1, "The full suite, rendered as a text report.");

    mod.def("mif_encode", &py_mif_encode, py::arg("words"), py::arg("width") = 32,
            "Render raw words as canonical MIF text.");

    mod.def("mif_decode", &py_mif_decode, py::arg("text"),
            "Parse MIF text; returns (width, words).");
}
