#pragma once

#include "glassbox/expr.hpp"
#include "glassbox/spec.hpp"
#include "glassbox/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace glassbox {

// One interaction record: what the monitored system was given and what it
// answered. Field values are already schema-typed; `names` additionally keeps
// the keys of undeclared fields kept in lenient mode, so the privacy
// whitelist still sees them even though they carry no usable value.
struct Event {
    std::string id;
    std::int64_t ts{0};
    std::uint64_t pos{0};  // 0-based position in the trace

    std::map<std::string, TypedValue> values[3];  // indexed by Section
    std::set<std::string> names[3];

    const std::map<std::string, TypedValue>& section_values(Section s) const {
        return values[static_cast<int>(s)];
    }
    const std::set<std::string>& section_names(Section s) const {
        return names[static_cast<int>(s)];
    }
};

// Keys present in a section. Declared fields that were dropped for a type
// mismatch are excluded; undeclared keys kept in lenient mode are included.
const std::set<std::string>& field_names_present(const Event& e, Section section);

// FieldEnv over one event (per-event, parity, drift requirements).
class EventEnv final : public FieldEnv {
  public:
    explicit EventEnv(const Event& e) : e_(e) {}
    const TypedValue* lookup(const FieldRef& ref) const override;

  private:
    const Event& e_;
};

// FieldEnv over an (a, b) pair (pairwise similar/consistent expressions).
class PairEnv final : public FieldEnv {
  public:
    PairEnv(const Event& a, const Event& b) : a_(a), b_(b) {}
    const TypedValue* lookup(const FieldRef& ref) const override;

  private:
    const Event& a_;
    const Event& b_;
};

// ── Trace reading ─────────────────────────────────────────────────────────

enum class SchemaMode { Strict, Lenient };

struct SchemaViolation {
    std::string event_id;
    std::string field;     // "in.marital_status"
    std::string expected;  // declared type, or "" for undeclared fields
    std::string found;     // JSON rendering of the offending value
    Severity severity{Severity::Warning};

    std::string message() const;
};

// Fatal trace problem: unreadable source, malformed record, ts regression,
// or any schema mismatch in strict mode.
struct TraceError : std::runtime_error {
    std::uint64_t line;  // 1-based input line, 0 when not line-specific

    TraceError(std::uint64_t line_no, const std::string& msg)
        : std::runtime_error(msg), line(line_no) {}
};

// Line-oriented input abstraction so gzip and plain sources read identically.
class LineSource {
  public:
    virtual ~LineSource() = default;
    // Strips the trailing newline (LF or CRLF). Returns false at end of input.
    virtual bool next_line(std::string& out) = 0;
};

std::unique_ptr<LineSource> open_line_source(const std::string& path);  // "-" = stdin, ".gz" = gzip
std::unique_ptr<LineSource> string_line_source(std::string text);

// Streaming JSONL reader; memory use is per-record, never per-trace.
class TraceReader {
  public:
    TraceReader(std::unique_ptr<LineSource> source, const Schema& schema, SchemaMode mode);

    // Fills `out` with the next event. Returns false at end of input.
    // Throws TraceError on fatal problems.
    bool next(Event& out);

    // Lenient-mode warnings, capped; the total is always exact.
    const std::vector<SchemaViolation>& warnings() const { return warnings_; }
    std::uint64_t total_warnings() const { return total_warnings_; }
    std::uint64_t events_read() const { return events_read_; }

    static constexpr std::size_t kWarningCap = 100;

  private:
    std::unique_ptr<LineSource> source_;
    const Schema& schema_;
    SchemaMode mode_;
    std::uint64_t line_no_{0};
    std::uint64_t events_read_{0};
    std::int64_t last_ts_{0};
    bool any_event_{false};
    std::vector<SchemaViolation> warnings_;
    std::uint64_t total_warnings_{0};

    void warn(SchemaViolation v);
};

}  // namespace glassbox
