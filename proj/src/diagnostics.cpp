#include "lfir/diagnostics.hpp"

#include <sstream>

namespace lf {

std::string Location::to_string() const {
    std::ostringstream ss;
    if (line > 0) {
        ss << "line " << line;
        if (col > 0) ss << ":" << col;
        return ss.str();
    }
    if (!global.empty()) {
        ss << "@" << global;
        return ss.str();
    }
    if (!function.empty()) {
        ss << "@" << function;
        if (!block.empty()) ss << "/%" << block;
        if (inst_index >= 0) ss << "/#" << inst_index;
        return ss.str();
    }
    return "<module>";
}

std::string Diagnostic::to_string() const {
    std::ostringstream ss;
    ss << (severity == Severity::Error ? "error" : "warning") << ": " << code
       << ": " << message << " [" << loc.to_string() << "]";
    return ss.str();
}

void Diagnostics::error(std::string code, Location loc, std::string msg) {
    items_.push_back({Severity::Error, std::move(code), std::move(loc), std::move(msg)});
}

void Diagnostics::warning(std::string code, Location loc, std::string msg) {
    items_.push_back({Severity::Warning, std::move(code), std::move(loc), std::move(msg)});
}

void Diagnostics::append(const Diagnostics& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

bool Diagnostics::has_errors() const {
    for (const auto& d : items_)
        if (d.severity == Severity::Error) return true;
    return false;
}

size_t Diagnostics::error_count() const {
    size_t n = 0;
    for (const auto& d : items_)
        if (d.severity == Severity::Error) n++;
    return n;
}

size_t Diagnostics::warning_count() const {
    return items_.size() - error_count();
}

std::string Diagnostics::to_string() const {
    std::ostringstream ss;
    for (const auto& d : items_) ss << d.to_string() << "\n";
    return ss.str();
}

}  // namespace lf
