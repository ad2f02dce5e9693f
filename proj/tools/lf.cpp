// lf — driver for the LF-IR flow: parse, transform, partition, schedule,
// run, bench. Exit 0 on success, 1 when diagnostics carry errors, 2 on
// usage problems.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lfir/bench.hpp"
#include "lfir/image.hpp"
#include "lfir/interp.hpp"
#include "lfir/mif.hpp"
#include "lfir/parser.hpp"
#include "lfir/partition.hpp"
#include "lfir/printer.hpp"
#include "lfir/schedule.hpp"
#include "lfir/transform.hpp"
#include "lfir/validate.hpp"

namespace fs = std::filesystem;
using namespace lf;

namespace {

struct Options {
    std::string input = "-";
    std::string output = "-";
    int64_t unroll_threshold = 20;
    int64_t inline_threshold = 100;
    std::vector<std::string> partition_flags;
    int64_t ports = 2;
    std::vector<std::string> lat_flags;
    std::string mem_dir;
    std::string emit_dir;
    uint32_t seed = 1;
    std::string format = "text";
    bool gantt = false;
};

int usage_error(const std::string& msg) {
    std::cerr << "lf: error: " << msg << "\n";
    return 2;
}

void print_diags(const Diagnostics& diags, const std::string& file) {
    for (const Diagnostic& d : diags) {
        std::cerr << file << ":" << d.loc.line << ": "
                  << (d.severity == Severity::Error ? "error" : "warning")
                  << ": " << d.code << ": " << d.message;
        std::string where = d.loc.to_string();
        if (d.loc.line == 0 && !where.empty()) std::cerr << " [" << where << "]";
        std::cerr << "\n";
    }
}

bool read_input(const std::string& path, std::string& text, std::string& err) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
        return true;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err = "cannot open " + path;
        return false;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    return true;
}

bool write_output(const std::string& path, const std::string& content,
                  std::string& err) {
    if (path == "-") {
        std::cout << content;
        return true;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err = "cannot write " + path;
        return false;
    }
    out << content;
    return bool(out);
}

std::string display_name(const std::string& path) {
    return path == "-" ? "<stdin>" : path;
}

// Parse + validate, reporting diagnostics. Returns nullopt after printing.
std::optional<Module> load_module(const Options& opt) {
    std::string text, err;
    if (!read_input(opt.input, text, err)) {
        std::cerr << "lf: error: " << err << "\n";
        return std::nullopt;
    }
    Diagnostics diags;
    auto m = parse_module(text, diags);
    if (m) diags.append(validate(*m));
    print_diags(diags, display_name(opt.input));
    if (!m || diags.has_errors()) return std::nullopt;
    return m;
}

bool build_resources(const Options& opt, ResourceModel& r, std::string& err) {
    if (opt.ports < 1) {
        err = "--ports must be at least 1";
        return false;
    }
    r.ports = opt.ports;
    for (const std::string& flag : opt.lat_flags) {
        size_t eq = flag.find('=');
        if (eq == std::string::npos) {
            err = "--lat expects <opclass>=<cycles>, got '" + flag + "'";
            return false;
        }
        std::string name = flag.substr(0, eq);
        auto cls = opclass_by_name(name);
        if (!cls) {
            err = "unknown operation class '" + name + "'";
            return false;
        }
        try {
            size_t used = 0;
            std::string num = flag.substr(eq + 1);
            int64_t cycles = std::stoll(num, &used);
            if (used != num.size() || cycles < 0) throw std::invalid_argument(num);
            r.latency[*cls] = cycles;
        } catch (...) {
            err = "--lat " + name + " expects a non-negative cycle count";
            return false;
        }
    }
    return true;
}

// Grammar errors in --partition are usage errors; failures applying a
// well-formed spec are operational.
std::optional<std::vector<PartitionSpec>> parse_partition_flags(
    const Options& opt) {
    std::vector<PartitionSpec> specs;
    for (const std::string& flag : opt.partition_flags) {
        Diagnostics d;
        auto spec = parse_partition_spec(flag, d);
        if (!spec) {
            print_diags(d, "--partition " + flag);
            return std::nullopt;
        }
        specs.push_back(*spec);
    }
    return specs;
}

bool apply_partitions(Module& m, const std::vector<PartitionSpec>& specs,
                      const std::string& file) {
    for (const PartitionSpec& spec : specs) {
        Diagnostics d;
        if (!apply_partition(m, spec, d)) {
            print_diags(d, file);
            return false;
        }
    }
    return true;
}

// Overlay <dir>/<bank>.mif onto the zero image; absent files keep zeros.
bool load_mem_dir(MemoryImage& img, const std::string& dir,
                  std::string& err) {
    for (auto& [name, words] : img.banks) {
        if (words.empty()) continue;
        fs::path path = fs::path(dir) / (name + ".mif");
        if (!fs::exists(path)) continue;
        std::string text, ferr;
        if (!read_input(path.string(), text, ferr)) {
            err = ferr;
            return false;
        }
        Diagnostics d;
        auto mif = load_mif(text, d);
        if (!mif) {
            err = path.string() + ": " + d.to_string();
            return false;
        }
        if (mif->width != words[0].width()) {
            err = path.string() + ": width " + std::to_string(mif->width) +
                  " does not match bank width " +
                  std::to_string(words[0].width());
            return false;
        }
        if (mif->words.size() != words.size()) {
            err = path.string() + ": depth " + std::to_string(mif->words.size()) +
                  " does not match bank size " + std::to_string(words.size());
            return false;
        }
        words = words_from_mif(*mif, words[0].tag);
    }
    return true;
}

std::string format_word(const Word& w) {
    if (w.tag == Word::Tag::F32) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(w.f));
        return buf;
    }
    return std::to_string(w.i);
}

int cmd_check(const Options& opt) {
    auto m = load_module(opt);
    if (!m) return 1;
    Module staged = *m;
    Diagnostics diags;
    // Legality speaks about the standalone shape; lift role-parameter
    // entries the same way the pipeline would before judging them.
    if (!restructure_signature(staged, diags)) {
        print_diags(diags, display_name(opt.input));
        return 1;
    }
    diags.append(check_legality(staged));
    print_diags(diags, display_name(opt.input));
    return diags.has_errors() ? 1 : 0;
}

int cmd_transform(const Options& opt) {
    auto m = load_module(opt);
    if (!m) return 1;
    PassConfig config;
    config.unroll_threshold = opt.unroll_threshold;
    config.inline_threshold = opt.inline_threshold;
    Diagnostics diags;
    auto out = run_pipeline(*m, config, diags);
    print_diags(diags, display_name(opt.input));
    if (!out || diags.has_errors()) return 1;
    std::string err;
    if (!write_output(opt.output, print_module(*out), err))
        return usage_error(err);
    return 0;
}

int cmd_partition(const Options& opt) {
    auto specs = parse_partition_flags(opt);
    if (!specs) return 2;
    auto m = load_module(opt);
    if (!m) return 1;
    if (!apply_partitions(*m, *specs, display_name(opt.input))) return 1;
    std::string err;
    if (!write_output(opt.output, print_module(*m), err))
        return usage_error(err);
    return 0;
}

int cmd_schedule(const Options& opt) {
    auto specs = parse_partition_flags(opt);
    if (!specs) return 2;
    ResourceModel resources;
    std::string err;
    if (!build_resources(opt, resources, err)) return usage_error(err);
    auto m = load_module(opt);
    if (!m) return 1;
    if (!apply_partitions(*m, *specs, display_name(opt.input))) return 1;

    MemoryImage img = MemoryImage::for_module(*m);
    if (!opt.mem_dir.empty() && !load_mem_dir(img, opt.mem_dir, err)) {
        std::cerr << "lf: error: " << err << "\n";
        return 1;
    }
    Diagnostics diags;
    ScheduleResult sched;
    auto total = count_cycles(*m, resources, img, diags, &sched);
    if (!total) {
        print_diags(diags, display_name(opt.input));
        return 1;
    }
    std::string out = render_schedule(*m, sched, *total);
    if (opt.gantt && opt.format == "text") out += render_gantt(*m, sched);
    if (!write_output(opt.output, out, err)) return usage_error(err);
    return 0;
}

int cmd_run(const Options& opt) {
    auto m = load_module(opt);
    if (!m) return 1;
    MemoryImage img = MemoryImage::for_module(*m);
    std::string err;
    if (!opt.mem_dir.empty() && !load_mem_dir(img, opt.mem_dir, err)) {
        std::cerr << "lf: error: " << err << "\n";
        return 1;
    }
    Diagnostics diags;
    auto rr = run(*m, img, diags);
    if (!rr) {
        print_diags(diags, display_name(opt.input));
        return 1;
    }
    std::ostringstream out;
    for (const std::string& name : output_banks(*m)) {
        const auto* bank = rr->image.find(name);
        if (!bank) continue;
        out << "bank=" << name << " n=" << bank->size() << " data=";
        for (size_t i = 0; i < bank->size(); i++) {
            if (i) out << ",";
            out << format_word((*bank)[i]);
        }
        out << "\n";
        if (!opt.emit_dir.empty()) {
            std::error_code ec;
            fs::create_directories(opt.emit_dir, ec);
            fs::path path = fs::path(opt.emit_dir) / (name + ".mif");
            std::string werr;
            if (!write_output(path.string(), store_mif(mif_from_words(*bank)),
                              werr)) {
                std::cerr << "lf: error: " << werr << "\n";
                return 1;
            }
        }
    }
    std::cout << out.str();
    return 0;
}

int cmd_bench(const Options& opt) {
    auto specs = parse_partition_flags(opt);
    if (!specs) return 2;
    bench::SuiteOptions suite;
    suite.pass_config.unroll_threshold = opt.unroll_threshold;
    suite.pass_config.inline_threshold = opt.inline_threshold;
    std::string err;
    if (!build_resources(opt, suite.resources, err)) return usage_error(err);
    suite.partitions = *specs;
    suite.seed = opt.seed;
    auto results = bench::run_suite(suite);
    std::string out = bench::render_report(results);
    if (!write_output(opt.output, out, err)) return usage_error(err);
    for (const auto& r : results)
        if (!r.pass) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LF-IR compilation flow: transform, partition, schedule, "
                 "run, bench"};
    app.require_subcommand(1);
    Options opt;

    auto add_input = [&](CLI::App* sub) {
        sub->add_option("input", opt.input, "input module ('-' for stdin)");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("-o,--output", opt.output,
                        "output path ('-' for stdout)");
    };
    auto add_thresholds = [&](CLI::App* sub) {
        sub->add_option("--unroll-threshold", opt.unroll_threshold,
                        "max trip-count x body-size to fully unroll");
        sub->add_option("--inline-threshold", opt.inline_threshold,
                        "max callee size to inline");
    };
    auto add_partitions = [&](CLI::App* sub) {
        sub->add_option("--partition", opt.partition_flags,
                        "<array>:<block|cyclic|complete>[:factor=<F>][:dim=<d>]");
    };
    auto add_resources = [&](CLI::App* sub) {
        sub->add_option("--ports", opt.ports, "memory ports per bank per cycle");
        sub->add_option("--lat", opt.lat_flags, "<opclass>=<cycles> override");
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", opt.format, "text|machine")
            ->check(CLI::IsMember({"text", "machine"}));
    };

    CLI::App* check = app.add_subcommand("check", "parse, validate, legality");
    add_input(check);

    CLI::App* transform =
        app.add_subcommand("transform", "run the pass pipeline, emit IR");
    add_input(transform);
    add_output(transform);
    add_thresholds(transform);

    CLI::App* partition =
        app.add_subcommand("partition", "apply partition specs, emit IR");
    add_input(partition);
    add_output(partition);
    add_partitions(partition);

    CLI::App* schedule =
        app.add_subcommand("schedule", "schedule blocks, report cycles");
    add_input(schedule);
    add_output(schedule);
    add_partitions(schedule);
    add_resources(schedule);
    add_format(schedule);
    schedule->add_option("--mem", opt.mem_dir,
                         "directory of <global>.mif inputs (missing = zeros)");
    schedule->add_flag("--gantt", opt.gantt, "append a Gantt rendering");

    CLI::App* runc =
        app.add_subcommand("run", "interpret with MIF inputs, emit outputs");
    add_input(runc);
    add_format(runc);
    runc->add_option("--mem", opt.mem_dir,
                     "directory of <global>.mif inputs (missing = zeros)");
    runc->add_option("--emit-mem", opt.emit_dir,
                     "write one <global>.mif per output bank");

    CLI::App* benchc = app.add_subcommand("bench", "run the benchmark suite");
    add_output(benchc);
    add_thresholds(benchc);
    add_partitions(benchc);
    add_resources(benchc);
    add_format(benchc);
    benchc->add_option("--seed", opt.seed, "random image seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (check->parsed()) return cmd_check(opt);
    if (transform->parsed()) return cmd_transform(opt);
    if (partition->parsed()) return cmd_partition(opt);
    if (schedule->parsed()) return cmd_schedule(opt);
    if (runc->parsed()) return cmd_run(opt);
    if (benchc->parsed()) return cmd_bench(opt);
    return 2;
}
