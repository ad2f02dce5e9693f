#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lf {

enum class Severity { Error, Warning };

/// A location inside a module: either an instruction position
/// (function, block, index), a global, or a raw source line/column.
struct Location {
    std::string function;
    std::string block;
    int inst_index = -1;
    std::string global;
    int line = 0;   // 1-based source line, 0 = unknown
    int col = 0;

    std::string to_string() const;
};

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;       // short identifier, e.g. "ssa-use-before-def"
    Location loc;
    std::string message;

    std::string to_string() const;
};

class Diagnostics {
public:
    void error(std::string code, Location loc, std::string msg);
    void warning(std::string code, Location loc, std::string msg);
    void add(Diagnostic d) { items_.push_back(std::move(d)); }
    void append(const Diagnostics& other);

    bool has_errors() const;
    size_t error_count() const;
    size_t warning_count() const;
    bool empty() const { return items_.empty(); }
    size_t size() const { return items_.size(); }

    const std::vector<Diagnostic>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    /// One "<severity>: <code>: <message>" line per diagnostic.
    std::string to_string() const;

private:
    std::vector<Diagnostic> items_;
};

}  // namespace lf
