#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace glassbox {

// Byte range in a spec source file, 1-based line/column of the start.
struct SourceSpan {
    std::size_t start{0};
    std::size_t end{0};
    std::size_t line{0};
    std::size_t column{0};

    bool known() const { return line != 0; }
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity{Severity::Error};
    std::string message;
    SourceSpan span;        // may be empty for in-memory specs
    std::string element;    // id of the offending element, when known

    std::string render() const;
};

bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace glassbox
