#include "glassbox/pipeline.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>

namespace glassbox {
namespace {

// Uniform face over the three windowed evaluators; returns false when the
// requirement has no evaluation point at this event (drift between
// boundaries).
class WindowedAdapter {
  public:
    explicit WindowedAdapter(const Requirement& req, SchemaMode mode, WarningSink* warnings) {
        switch (req.kind) {
            case RequirementKind::WindowParity:
                parity_ = std::make_unique<ParityEvaluator>(req, mode, warnings);
                break;
            case RequirementKind::PairwiseConsistency:
                pairwise_ = std::make_unique<PairwiseEvaluator>(req, mode, warnings);
                break;
            case RequirementKind::WindowDrift:
                drift_ = std::make_unique<DriftEvaluator>(req, mode, warnings);
                break;
            default:
                break;
        }
    }

    bool on_event(const Event& e, Verdict& out) {
        if (parity_) {
            out = parity_->on_event(e);
            return true;
        }
        if (pairwise_) {
            out = pairwise_->on_event(e);
            return true;
        }
        return drift_->on_event(e, out);
    }

  private:
    std::unique_ptr<ParityEvaluator> parity_;
    std::unique_ptr<PairwiseEvaluator> pairwise_;
    std::unique_ptr<DriftEvaluator> drift_;
};

struct SlotError {
    std::string req;
    std::string message;
};

bool stateless_kind(RequirementKind k) {
    return k == RequirementKind::PerEvent || k == RequirementKind::FieldWhitelist;
}

}  // namespace

PipelineResult run_pipeline(const GlassBoxSpec& spec, TraceReader& reader,
                            const PipelineOptions& options) {
    const std::size_t nreq = spec.requirements.size();

    // evaluation and output both follow requirement-id order within an event
    std::vector<std::size_t> order(nreq);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return spec.requirements[a].id < spec.requirements[b].id;
    });

    WarningSink eval_sink;
    std::vector<WindowedAdapter> windowed;        // parallel to `order`, null slots for stateless
    std::vector<const Requirement*> by_order(nreq);
    std::vector<bool> is_stateless(nreq);
    windowed.reserve(nreq);
    for (std::size_t k = 0; k < nreq; ++k) {
        const Requirement& r = spec.requirements[order[k]];
        by_order[k] = &r;
        is_stateless[k] = stateless_kind(r.kind);
        windowed.emplace_back(r, options.schema_mode, &eval_sink);
    }

    Aggregator agg(spec, options.policy);
    std::uint64_t verdict_count = 0;

    constexpr std::size_t kBatch = 2048;
    std::vector<Event> batch;
    batch.reserve(kBatch);
    std::vector<std::optional<Verdict>> slots;
    std::vector<std::optional<SlotError>> errors;

    const int jobs = std::max(1, options.jobs);

    auto emit = [&](const Verdict& v) {
        agg.add(v);
        ++verdict_count;
        if (options.verdict_out) *options.verdict_out << v.to_jsonl() << '\n';
    };

    auto run_stateless_range = [&](std::size_t lo, std::size_t hi, WarningSink* sink) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Event& e = batch[i];
            for (std::size_t k = 0; k < nreq; ++k) {
                if (!is_stateless[k]) continue;
                const Requirement& r = *by_order[k];
                try {
                    Verdict v = r.kind == RequirementKind::PerEvent
                                    ? eval_per_event(r, e, options.schema_mode, sink)
                                    : eval_field_whitelist(r, e);
                    slots[i * nreq + k] = std::move(v);
                } catch (const EvaluationError& err) {
                    errors[i * nreq + k] = SlotError{r.id, err.what()};
                }
            }
        }
    };

    auto flush_batch = [&]() {
        const std::size_t n = batch.size();
        if (n == 0) return;
        slots.assign(n * nreq, std::nullopt);
        errors.assign(n * nreq, std::nullopt);

        if (jobs == 1) {
            run_stateless_range(0, n, &eval_sink);
        } else {
            const std::size_t chunk = (n + jobs - 1) / jobs;
            std::vector<WarningSink> sinks(static_cast<std::size_t>(jobs));
            std::vector<std::thread> threads;
            for (int w = 0; w < jobs; ++w) {
                std::size_t lo = static_cast<std::size_t>(w) * chunk;
                std::size_t hi = std::min(n, lo + chunk);
                if (lo >= hi) break;
                threads.emplace_back(run_stateless_range, lo, hi,
                                     &sinks[static_cast<std::size_t>(w)]);
            }
            for (auto& t : threads) t.join();
            for (const auto& s : sinks) eval_sink.merge(s);
        }

        for (std::size_t i = 0; i < n; ++i) {
            const Event& e = batch[i];
            // windowed evaluators advance even when a fault will surface, so
            // the error choice below never depends on scheduling
            for (std::size_t k = 0; k < nreq; ++k) {
                if (is_stateless[k]) continue;
                try {
                    Verdict v;
                    if (windowed[k].on_event(e, v)) slots[i * nreq + k] = std::move(v);
                } catch (const EvaluationError& err) {
                    errors[i * nreq + k] = SlotError{by_order[k]->id, err.what()};
                }
            }
            for (std::size_t k = 0; k < nreq; ++k) {
                if (const auto& err = errors[i * nreq + k])
                    throw EvaluationError(err->req, e.id, err->message);
            }
            for (std::size_t k = 0; k < nreq; ++k) {
                if (auto& slot = slots[i * nreq + k]) emit(*slot);
            }
        }
        batch.clear();
    };

    Event e;
    while (reader.next(e)) {
        batch.push_back(std::move(e));
        if (batch.size() == kBatch) flush_batch();
    }
    flush_batch();

    PipelineResult result;
    result.events = reader.events_read();
    result.verdicts = verdict_count;
    result.reader_warnings = reader.warnings();
    result.eval_warnings = eval_sink.items();
    result.report =
        agg.finish(options.trace_source, reader.events_read(),
                   reader.total_warnings() + eval_sink.total(), options.spec_sha256,
                   options.tool_version);
    return result;
}

}  // namespace glassbox
