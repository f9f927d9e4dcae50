#include "glassbox/diagnostics.hpp"

#include <sstream>

namespace glassbox {

std::string Diagnostic::render() const {
    std::ostringstream os;
    if (span.known()) os << span.line << ":" << span.column << ": ";
    os << (severity == Severity::Error ? "error: " : "warning: ");
    os << message;
    if (!element.empty()) os << " [" << element << "]";
    return os.str();
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

}  // namespace glassbox
