#pragma once

#include "glassbox/event.hpp"
#include "glassbox/spec.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

namespace glassbox {

// Key order in verdict details is meaningful output, so use the
// insertion-ordered JSON value everywhere verdicts are built.
using ojson = nlohmann::ordered_json;

enum class VerdictStatus { Satisfied, Violated, Inapplicable, Pending };

const char* verdict_status_name(VerdictStatus s);

struct Verdict {
    std::string req;
    std::string event;
    std::uint64_t pos{0};
    VerdictStatus status{VerdictStatus::Satisfied};
    ojson detail = ojson::object();

    // One JSONL line: {"req":...,"event":...,"pos":...,"status":...,"detail":{...}}
    std::string to_jsonl() const;
};

// Thrown in strict mode when a requirement expression faults (missing field,
// overflow) — lenient mode degrades to Inapplicable / exclusion instead.
struct EvaluationError : std::runtime_error {
    std::string req;
    std::string event;

    EvaluationError(std::string req_id, std::string event_id, const std::string& msg)
        : std::runtime_error(msg), req(std::move(req_id)), event(std::move(event_id)) {}
};

struct EvalWarning {
    std::string req;
    std::string event;
    std::string message;
};

// Capped collector; the total count stays exact past the cap.
class WarningSink {
  public:
    static constexpr std::size_t kCap = 100;

    void add(EvalWarning w) {
        ++total_;
        if (items_.size() < kCap) items_.push_back(std::move(w));
    }

    // Appends another sink's items in their order; totals stay exact even
    // when either side overflowed its cap.
    void merge(const WarningSink& other) {
        for (const auto& w : other.items()) add(w);
        total_ += other.total() - other.items().size();
    }

    const std::vector<EvalWarning>& items() const { return items_; }
    std::uint64_t total() const { return total_; }

  private:
    std::vector<EvalWarning> items_;
    std::uint64_t total_{0};
};

// ── Stateless kinds (safe to run in parallel across events) ───────────────

Verdict eval_per_event(const Requirement& req, const Event& e, SchemaMode mode,
                       WarningSink* warnings);

Verdict eval_field_whitelist(const Requirement& req, const Event& e);

// ── Windowed kinds (sequential, own their window state) ───────────────────

// Demographic parity over the trailing `window` events: per-group positive
// rates must not spread more than max_gap.
class ParityEvaluator {
  public:
    ParityEvaluator(const Requirement& req, SchemaMode mode, WarningSink* warnings);

    Verdict on_event(const Event& e);

  private:
    struct Slot {
        bool usable{false};
        std::string group;
        bool positive{false};
    };

    const Requirement& req_;
    SchemaMode mode_;
    WarningSink* warnings_;
    std::deque<Slot> ring_;
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> counts_;  // group -> {count, positive}
    std::int64_t usable_{0};
};

// All-pairs consistency, incrementally: each new event is compared against
// the up-to-(window-1) preceding events still inside the window.
class PairwiseEvaluator {
  public:
    PairwiseEvaluator(const Requirement& req, SchemaMode mode, WarningSink* warnings);

    Verdict on_event(const Event& e);

  private:
    const Requirement& req_;
    SchemaMode mode_;
    WarningSink* warnings_;
    std::deque<Event> buffer_;
};

// Tumbling windows of `window` events; verdicts only at window boundaries,
// comparing the positive rate of the just-completed window with the previous
// one.
class DriftEvaluator {
  public:
    DriftEvaluator(const Requirement& req, SchemaMode mode, WarningSink* warnings);

    // Returns true and fills `out` only at a window boundary.
    bool on_event(const Event& e, Verdict& out);

  private:
    const Requirement& req_;
    SchemaMode mode_;
    WarningSink* warnings_;
    std::int64_t in_window_{0};
    std::int64_t cur_count_{0};
    std::int64_t cur_positive_{0};
    std::int64_t prev_count_{0};
    std::int64_t prev_positive_{0};
    bool have_prev_{false};
};

// ── Shared helpers (also used by the brute-force test oracles) ────────────

// JSON value of a field binding for verdict details.
ojson typed_value_json(const TypedValue& v);

// Bindings of every field the expression references, in reference order
// (first occurrence wins); missing fields are rendered as null.
ojson expr_bindings(const ExprPtr& e, const FieldEnv& env);

}  // namespace glassbox
