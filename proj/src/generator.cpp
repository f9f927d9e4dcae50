#include "glassbox/generator.hpp"

#include <zlib.h>

#include <algorithm>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace glassbox {

namespace {

using ojson = nlohmann::ordered_json;
namespace mg = mortgage;

constexpr std::int64_t kParityEpisodeLen = 35;
constexpr std::int64_t kZoneSlotStride = 1'200'000;
constexpr std::int64_t kZoneJitter = 200'000;
// Keeps the denied side at least this far from the affordability boundary
// even when the clamped margin bites; similarity is ±10'000 income and
// ±500'000 loan, so anything above ~51'000 rules out cross-decision pairs.
constexpr std::int64_t kMarginFloor = 60'000;

const char* const kMaritalValues[] = {"married", "single", "expecting_child"};

// ── Config ──

std::int64_t require_int(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer())
        throw std::invalid_argument("config: '" + key + "' must be an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > std::uint64_t(INT64_MAX))
        throw std::invalid_argument("config: '" + key + "' is out of range");
    return v.get<std::int64_t>();
}

IntRange parse_range(const nlohmann::json& j, const std::string& key, IntRange dflt) {
    if (!j.contains(key)) return dflt;
    const auto& v = j.at(key);
    if (!v.is_object())
        throw std::invalid_argument("config: '" + key + "' must be {\"min\":...,\"max\":...}");
    for (const auto& [k, _] : v.items())
        if (k != "min" && k != "max")
            throw std::invalid_argument("config: unexpected key '" + key + "." + k + "'");
    IntRange r = dflt;
    if (v.contains("min")) r.min = require_int(v, "min");
    if (v.contains("max")) r.max = require_int(v, "max");
    if (r.min > r.max)
        throw std::invalid_argument("config: '" + key + "' has min > max");
    return r;
}

const std::set<std::string>& injectable_requirements() {
    static const std::set<std::string> ids = {
        "R_Afford30",  "R_AffordNoRefuse", "R_Exec70",  "R_Rate15",
        "R_NoDrift",   "R_Parity",         "R_SimilarSameDecision",
        "R_TaxFieldsOnly",
    };
    return ids;
}

void validate_config(const GeneratorConfig& cfg) {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (cfg.age.min < 1 || cfg.age.max > 150) bad("'age' must lie within [1, 150]");
    if (cfg.loan.min < 2'400'000)
        bad("'loan.min' must be at least 2400000 minor units");
    if (cfg.loan.max > 1'000'000'000'000) bad("'loan.max' is implausibly large");
    if (cfg.afford_margin.min < kMarginFloor)
        bad("'afford_margin.min' must be at least " + std::to_string(kMarginFloor));
    if (cfg.afford_margin.max > 10'000'000) bad("'afford_margin.max' is implausibly large");
    if (cfg.central_bank_rate_bp < 10 || cfg.central_bank_rate_bp > 100'000)
        bad("'central_bank_rate_bp' must lie within [10, 100000]");
    if (cfg.regions.size() != 2 || cfg.regions[0].empty() || cfg.regions[1].empty() ||
        cfg.regions[0] == cfg.regions[1])
        bad("'regions' must hold exactly two distinct non-empty names");
    for (const auto& req : cfg.inject) {
        if (!injectable_requirements().count(req.requirement))
            bad("unknown requirement '" + req.requirement + "' in 'inject'");
        if (req.count < 0 || req.count > 1'000'000)
            bad("'inject' count for '" + req.requirement + "' must lie within [0, 1000000]");
    }
}

// ── Injection plan ──

enum class Mode {
    Clean,
    AffordSingle,        // affordable but unsecured, denied: R_Afford30 only
    AffordRefuseSingle,  // affordable and secured, denied: hits the whole trio
    ExecSingle,          // secured but unaffordable, denied: R_Exec70 only
    RateSingle,          // clean event at twice the central-bank rate
    WhitelistSingle,     // clean event that also carries marital status
    PairFirst,           // barely-affordable grant in the isolation zone
    PairSecond,          // its similar, barely-unaffordable denial
    ParityPos,           // region decides the outcome
    DriftPos,            // 80/100 then 65/100 acceptance windows
};

struct Slot {
    Mode mode{Mode::Clean};
    std::uint64_t start{0};     // interval start (== pos for singles)
    std::int64_t zone_slot{-1}; // isolation-zone index for zoned modes
};

using Plan = std::map<std::uint64_t, Slot>;

// Lays injection intervals out left to right with at least one full window
// of clean events between them (and before the first), so no evaluation
// window ever sees two injections at once. Drift episodes additionally
// align to tumbling-window boundaries and must end on a complete window.
Plan allocate(const GeneratorConfig& cfg) {
    Plan plan;
    const std::uint64_t W = std::uint64_t(mg::kWindow);
    const std::uint64_t full = cfg.events / W * W;
    std::uint64_t cursor = W;
    std::int64_t zone = 0;
    auto fail = [&] {
        throw std::invalid_argument(
            "config: injections do not fit in " + std::to_string(cfg.events) +
            " events; increase 'events' or reduce 'inject' counts");
    };
    auto place = [&](Mode mode, std::uint64_t width, bool zoned) {
        if (cursor + width > cfg.events) fail();
        for (std::uint64_t p = cursor; p < cursor + width; ++p)
            plan.emplace(p, Slot{mode == Mode::PairFirst && p != cursor ? Mode::PairSecond : mode,
                                 cursor, zoned ? zone : -1});
        if (zoned) ++zone;
        cursor += width + W;
    };
    for (const auto& req : cfg.inject) {
        for (std::int64_t c = 0; c < req.count; ++c) {
            if (req.requirement == "R_NoDrift") {
                cursor = (cursor + W - 1) / W * W;
                if (cursor + 2 * W > full) fail();
                place(Mode::DriftPos, 2 * W, false);
            } else if (req.requirement == "R_Parity") {
                place(Mode::ParityPos, std::uint64_t(kParityEpisodeLen), false);
            } else if (req.requirement == "R_SimilarSameDecision") {
                place(Mode::PairFirst, 2, true);
            } else if (req.requirement == "R_Afford30") {
                place(Mode::AffordSingle, 1, true);
            } else if (req.requirement == "R_AffordNoRefuse") {
                place(Mode::AffordRefuseSingle, 1, true);
            } else if (req.requirement == "R_Exec70") {
                place(Mode::ExecSingle, 1, true);
            } else if (req.requirement == "R_Rate15") {
                place(Mode::RateSingle, 1, false);
            } else {  // R_TaxFieldsOnly
                place(Mode::WhitelistSingle, 1, false);
            }
        }
    }
    return plan;
}

// ── Event construction ──

struct EventRec {
    std::uint64_t pos{0};
    std::string id;
    std::int64_t ts{0};
    std::int64_t age{0};
    std::int64_t income{0};
    std::int64_t instalment{0};
    std::int64_t loan{0};
    std::int64_t exec{0};
    std::string region;
    std::string decision;
    std::int64_t rate_bp{0};
    std::int64_t cb_bp{0};
    bool has_marital{false};
    std::string marital;
};

class Drawer {
  public:
    explicit Drawer(std::uint64_t seed) : rng_(seed) {}

    // Inclusive bounds. Rejection sampling on the raw mt19937_64 stream, so
    // the mapping does not depend on any library's distribution internals.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = std::uint64_t(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t r = rng_();
        while (r >= limit) r = rng_();
        return lo + std::int64_t(r % span);
    }
    std::int64_t range(const IntRange& r) { return range(r.min, r.max); }

  private:
    std::mt19937_64 rng_;
};

// instalment*10 < income*3 by at least `margin`, property covers twice the loan.
void fill_grant(EventRec& e, std::int64_t margin) {
    e.instalment = e.loan / mg::kInstalmentMonths;
    e.income = (e.instalment * 10 + margin + 2) / 3;
    e.exec = 2 * e.loan;
    e.decision = "grant";
}

// instalment*10 >= income*3 with a clamped margin, property only covers the loan.
void fill_deny(EventRec& e, std::int64_t margin) {
    e.instalment = e.loan / mg::kInstalmentMonths;
    const std::int64_t m = std::min(margin, e.instalment * 10 - kMarginFloor / 2);
    e.income = (e.instalment * 10 - m) / 3;
    e.exec = e.loan;
    e.decision = "deny";
}

struct PairState {
    std::int64_t age{0}, loan{0}, income{0};
};

EventRec materialize(const GeneratorConfig& cfg, const Plan& plan, std::uint64_t pos,
                     Drawer& draw, PairState& pair) {
    EventRec e;
    e.pos = pos;
    e.id = "e" + std::to_string(pos);
    e.ts = cfg.start_ts + std::int64_t(pos) * 1000;
    e.region = cfg.regions[pos % 2];
    e.cb_bp = cfg.central_bank_rate_bp;
    e.rate_bp = cfg.central_bank_rate_bp * 12 / 10;

    const auto it = plan.find(pos);
    const Slot slot = it == plan.end() ? Slot{} : it->second;
    const bool scheduled_grant = (pos / 2) % 2 == 0;  // per-region alternation
    const std::int64_t zone_base = cfg.loan.max + 5'000'000;
    auto zone_loan = [&] {
        return zone_base + slot.zone_slot * kZoneSlotStride + draw.range(0, kZoneJitter);
    };

    switch (slot.mode) {
        case Mode::Clean:
        case Mode::RateSingle:
        case Mode::WhitelistSingle: {
            e.age = draw.range(cfg.age);
            e.loan = draw.range(cfg.loan);
            const std::int64_t m = draw.range(cfg.afford_margin);
            if (scheduled_grant)
                fill_grant(e, m);
            else
                fill_deny(e, m);
            if (slot.mode == Mode::RateSingle) e.rate_bp = cfg.central_bank_rate_bp * 2;
            if (slot.mode == Mode::WhitelistSingle) {
                e.has_marital = true;
                e.marital = kMaritalValues[draw.range(0, 2)];
            }
            break;
        }
        case Mode::AffordSingle: {
            e.age = draw.range(cfg.age);
            e.loan = zone_loan();
            fill_grant(e, draw.range(cfg.afford_margin));
            e.exec = e.loan;  // undoes the security, leaving affordability alone
            e.decision = "deny";
            break;
        }
        case Mode::AffordRefuseSingle: {
            e.age = draw.range(cfg.age);
            e.loan = zone_loan();
            fill_grant(e, draw.range(cfg.afford_margin));
            e.decision = "deny";
            break;
        }
        case Mode::ExecSingle: {
            e.age = draw.range(cfg.age);
            e.loan = zone_loan();
            fill_deny(e, draw.range(cfg.afford_margin));
            e.exec = 2 * e.loan;
            break;
        }
        case Mode::PairFirst: {
            e.age = draw.range(cfg.age);
            e.loan = zone_loan();
            e.instalment = e.loan / mg::kInstalmentMonths;
            // Affordable by only ~3'000, so a similar applicant can tip over.
            e.income = e.instalment * 10 / 3 + 1000;
            e.exec = 2 * e.loan;
            e.decision = "grant";
            pair = {e.age, e.loan, e.income};
            break;
        }
        case Mode::PairSecond: {
            e.age = pair.age;
            e.loan = pair.loan + 480'000;           // within the 500'000 band
            e.instalment = e.loan / mg::kInstalmentMonths;
            e.income = pair.income + 5'000;         // within the 10'000 band, yet unaffordable
            e.exec = e.loan;
            e.decision = "deny";
            break;
        }
        case Mode::ParityPos: {
            e.age = draw.range(cfg.age);
            e.loan = draw.range(cfg.loan);
            const std::int64_t m = draw.range(cfg.afford_margin);
            if (pos % 2 == 0)
                fill_grant(e, m);  // first region is favoured for the whole episode
            else
                fill_deny(e, m);
            break;
        }
        case Mode::DriftPos: {
            e.age = draw.range(cfg.age);
            e.loan = draw.range(cfg.loan);
            const std::int64_t m = draw.range(cfg.afford_margin);
            const std::uint64_t off = pos - slot.start;
            const std::uint64_t wstart = slot.start + off / std::uint64_t(mg::kWindow) *
                                                          std::uint64_t(mg::kWindow);
            const std::uint64_t i = (pos - wstart) / 2;  // per-region slot in the window
            bool grant;
            if (off < std::uint64_t(mg::kWindow)) {
                grant = i % 5 != 4;  // 40 of 50 per region: 80/100 overall
            } else {
                // 33 + 32 grants spread evenly: 65/100, region gap only 1/50
                const std::uint64_t k = pos % 2 == 0 ? 33 : 32;
                grant = (i + 1) * k / 50 > i * k / 50;
            }
            if (grant)
                fill_grant(e, m);
            else
                fill_deny(e, m);
            break;
        }
    }
    return e;
}

// ── Ground truth ──

// Re-derives every violation from the finished events with its own direct
// arithmetic on the raw fields; nothing here trusts the injection plan.
class TruthCalc {
  public:
    explicit TruthCalc(const GeneratorConfig& cfg) : regions_(cfg.regions) {}

    void on_event(const EventRec& e, std::vector<GroundTruthEntry>& out) {
        const bool grant = e.decision == "grant";
        const bool afford = e.instalment * 10 < e.income * 3;
        const bool secured = e.loan * 10 <= e.exec * 7;
        auto add = [&](const char* req) { out.push_back({e.pos, e.id, req}); };

        // Entries for one event stay in requirement-id order.
        if (afford && !grant) add("R_Afford30");
        if (afford && secured && !grant) add("R_AffordNoRefuse");
        if (secured && !grant) add("R_Exec70");

        ++cur_count_;
        cur_grants_ += grant;
        bool drift_hit = false;
        if (cur_count_ == mg::kWindow) {
            if (have_prev_) {
                const std::int64_t diff = iabs(prev_grants_ * cur_count_ - cur_grants_ * prev_count_);
                drift_hit = diff * mg::kDeltaDen > prev_count_ * cur_count_ * mg::kDeltaNum;
            }
            prev_count_ = cur_count_;
            prev_grants_ = cur_grants_;
            have_prev_ = true;
            cur_count_ = cur_grants_ = 0;
        }
        if (drift_hit) add("R_NoDrift");

        const int ridx = e.region == regions_[0] ? 0 : 1;
        parity_ring_.push_back({ridx, grant});
        ++count_[ridx];
        grants_[ridx] += grant;
        if (std::int64_t(parity_ring_.size()) > mg::kWindow) {
            const auto& old = parity_ring_.front();
            --count_[old.region];
            grants_[old.region] -= old.grant;
            parity_ring_.pop_front();
        }
        if (std::int64_t(parity_ring_.size()) >= mg::kMinSamples && parity_gap_exceeded())
            add("R_Parity");

        if (e.rate_bp * 10 > e.cb_bp * 15) add("R_Rate15");

        bool pair_hit = false;
        for (const auto& p : pair_ring_) {
            const bool similar = p.age / mg::kAgeBucket == e.age / mg::kAgeBucket &&
                                 iabs(p.income - e.income) <= mg::kIncomeSimilarity &&
                                 iabs(p.loan - e.loan) <= mg::kLoanSimilarity;
            if (similar && p.grant != grant) {
                pair_hit = true;
                break;
            }
        }
        if (pair_hit) add("R_SimilarSameDecision");
        pair_ring_.push_back({e.age, e.income, e.loan, grant});
        if (std::int64_t(pair_ring_.size()) > mg::kWindow - 1) pair_ring_.pop_front();

        if (e.has_marital) add("R_TaxFieldsOnly");
    }

  private:
    static std::int64_t iabs(std::int64_t v) { return v < 0 ? -v : v; }

    bool parity_gap_exceeded() const {
        std::int64_t max_n = 0, max_d = 1, min_n = 0, min_d = 1;
        bool first = true;
        for (int g = 0; g < 2; ++g) {
            if (count_[g] == 0) continue;
            if (first) {
                max_n = min_n = grants_[g];
                max_d = min_d = count_[g];
                first = false;
                continue;
            }
            if (grants_[g] * max_d > max_n * count_[g]) {
                max_n = grants_[g];
                max_d = count_[g];
            }
            if (grants_[g] * min_d < min_n * count_[g]) {
                min_n = grants_[g];
                min_d = count_[g];
            }
        }
        const std::int64_t gap_n = max_n * min_d - min_n * max_d;
        return gap_n * mg::kGapDen > max_d * min_d * mg::kGapNum;
    }

    struct ParitySlot {
        int region;
        bool grant;
    };
    struct PairKey {
        std::int64_t age, income, loan;
        bool grant;
    };

    std::vector<std::string> regions_;
    std::deque<ParitySlot> parity_ring_;
    std::int64_t count_[2]{0, 0}, grants_[2]{0, 0};
    std::deque<PairKey> pair_ring_;
    std::int64_t cur_count_{0}, cur_grants_{0};
    std::int64_t prev_count_{0}, prev_grants_{0};
    bool have_prev_{false};
};

std::string event_line(const EventRec& e) {
    ojson line;
    line["id"] = e.id;
    line["ts"] = e.ts;
    ojson in;
    in["age"] = e.age;
    in["expected_monthly_income"] = e.income;
    in["monthly_instalment"] = e.instalment;
    in["loan_amount"] = e.loan;
    in["property_execution_value"] = e.exec;
    in["property_region"] = e.region;
    if (e.has_marital) in["marital_status"] = e.marital;
    line["in"] = std::move(in);
    line["out"] = ojson{{"decision", e.decision}, {"interest_rate_bp", e.rate_bp}};
    line["env"] = ojson{{"central_bank_rate_bp", e.cb_bp}};
    return line.dump();
}

// Injections may legitimately trip related requirements (a denied
// affordable-and-secured application violates all three per-event rules);
// anything outside this closure means the construction itself broke.
std::set<std::string> allowed_truth(const GeneratorConfig& cfg) {
    std::set<std::string> allowed;
    for (const auto& req : cfg.inject) {
        if (req.count <= 0) continue;
        allowed.insert(req.requirement);
        if (req.requirement == "R_AffordNoRefuse") {
            allowed.insert("R_Afford30");
            allowed.insert("R_Exec70");
        }
    }
    return allowed;
}

// ── Writers ──

class FileTraceWriter final : public TraceWriter {
  public:
    explicit FileTraceWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    void write_line(const std::string& line) override {
        out_ << line << '\n';
        if (!out_) throw std::runtime_error("write failed on '" + path_ + "'");
    }
    void close() override {
        out_.close();
        if (out_.fail()) throw std::runtime_error("write failed on '" + path_ + "'");
    }

  private:
    std::string path_;
    std::ofstream out_;
};

class StdoutTraceWriter final : public TraceWriter {
  public:
    void write_line(const std::string& line) override { std::cout << line << '\n'; }
    void close() override { std::cout.flush(); }
};

class GzipTraceWriter final : public TraceWriter {
  public:
    explicit GzipTraceWriter(const std::string& path) : path_(path) {
        gz_ = gzopen(path.c_str(), "wb");
        if (!gz_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    ~GzipTraceWriter() override {
        if (gz_) gzclose(gz_);
    }
    void write_line(const std::string& line) override {
        std::string buf = line;
        buf.push_back('\n');
        if (gzwrite(gz_, buf.data(), unsigned(buf.size())) != int(buf.size()))
            throw std::runtime_error("write failed on '" + path_ + "'");
    }
    void close() override {
        if (!gz_) return;
        const int rc = gzclose(gz_);
        gz_ = nullptr;
        if (rc != Z_OK) throw std::runtime_error("write failed on '" + path_ + "'");
    }

  private:
    std::string path_;
    gzFile gz_{nullptr};
};

class StringTraceWriter final : public TraceWriter {
  public:
    explicit StringTraceWriter(std::string& sink) : sink_(sink) {}
    void write_line(const std::string& line) override {
        sink_ += line;
        sink_ += '\n';
    }

  private:
    std::string& sink_;
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

// ── Public interface ──

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: root must be a JSON object");
    static const std::set<std::string> known = {
        "events", "seed",    "start_ts", "age",    "loan",
        "afford_margin", "central_bank_rate_bp", "regions", "inject"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw std::invalid_argument("config: unexpected key '" + key + "'");

    GeneratorConfig cfg;
    if (j.contains("events")) {
        const std::int64_t n = require_int(j, "events");
        if (n <= 0) throw std::invalid_argument("config: 'events' must be positive");
        cfg.events = std::uint64_t(n);
    }
    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_integer())
            throw std::invalid_argument("config: 'seed' must be an integer");
        cfg.seed = v.get<std::uint64_t>();
    }
    if (j.contains("start_ts")) cfg.start_ts = require_int(j, "start_ts");
    cfg.age = parse_range(j, "age", cfg.age);
    cfg.loan = parse_range(j, "loan", cfg.loan);
    cfg.afford_margin = parse_range(j, "afford_margin", cfg.afford_margin);
    if (j.contains("central_bank_rate_bp"))
        cfg.central_bank_rate_bp = require_int(j, "central_bank_rate_bp");
    if (j.contains("regions")) {
        const auto& v = j.at("regions");
        if (!v.is_array()) throw std::invalid_argument("config: 'regions' must be an array");
        cfg.regions.clear();
        for (const auto& r : v) {
            if (!r.is_string())
                throw std::invalid_argument("config: 'regions' entries must be strings");
            cfg.regions.push_back(r.get<std::string>());
        }
    }
    if (j.contains("inject")) {
        const auto& v = j.at("inject");
        if (!v.is_array()) throw std::invalid_argument("config: 'inject' must be an array");
        for (const auto& entry : v) {
            if (!entry.is_object() || !entry.contains("requirement") || !entry.contains("count"))
                throw std::invalid_argument(
                    "config: 'inject' entries must be {\"requirement\":...,\"count\":...}");
            for (const auto& [k, _] : entry.items())
                if (k != "requirement" && k != "count")
                    throw std::invalid_argument("config: unexpected key 'inject." + k + "'");
            if (!entry.at("requirement").is_string())
                throw std::invalid_argument("config: 'inject' requirement must be a string");
            InjectionRequest req;
            req.requirement = entry.at("requirement").get<std::string>();
            req.count = require_int(entry, "count");
            cfg.inject.push_back(std::move(req));
        }
    }
    validate_config(cfg);
    return cfg;
}

GenerateResult generate_trace(const GeneratorConfig& cfg, TraceWriter& out) {
    validate_config(cfg);
    const Plan plan = allocate(cfg);
    Drawer draw(cfg.seed);
    TruthCalc calc(cfg);
    PairState pair;
    GenerateResult result;
    for (std::uint64_t pos = 0; pos < cfg.events; ++pos) {
        const EventRec e = materialize(cfg, plan, pos, draw, pair);
        out.write_line(event_line(e));
        calc.on_event(e, result.truth);
    }
    result.events = cfg.events;

    const std::set<std::string> allowed = allowed_truth(cfg);
    for (const auto& t : result.truth)
        if (!allowed.count(t.req))
            throw std::logic_error("generator invariant broken: unplanned violation of '" + t.req +
                                   "' at event '" + t.event + "'");
    return result;
}

std::unique_ptr<TraceWriter> open_trace_writer(const std::string& path) {
    if (path == "-") return std::make_unique<StdoutTraceWriter>();
    if (ends_with(path, ".gz")) return std::make_unique<GzipTraceWriter>(path);
    return std::make_unique<FileTraceWriter>(path);
}

std::unique_ptr<TraceWriter> string_trace_writer(std::string& sink) {
    return std::make_unique<StringTraceWriter>(sink);
}

std::string sidecar_path_for(const std::string& trace_path) {
    std::string base = trace_path;
    if (ends_with(base, ".gz")) base.resize(base.size() - 3);
    if (ends_with(base, ".jsonl")) base.resize(base.size() - 6);
    return base + ".truth.jsonl";
}

GenerateResult generate_trace_files(const GeneratorConfig& cfg, const std::string& trace_path) {
    if (trace_path == "-")
        throw std::invalid_argument("simulate needs a file path; the sidecar has nowhere to go "
                                    "when the trace is written to stdout");
    auto writer = open_trace_writer(trace_path);
    GenerateResult result = generate_trace(cfg, *writer);
    writer->close();

    const std::string side_path = sidecar_path_for(trace_path);
    std::ofstream side(side_path, std::ios::binary);
    if (!side) throw std::runtime_error("cannot open '" + side_path + "' for writing");
    for (const auto& t : result.truth) {
        ojson line;
        line["pos"] = t.pos;
        line["event"] = t.event;
        line["req"] = t.req;
        side << line.dump() << '\n';
    }
    side.close();
    if (side.fail()) throw std::runtime_error("write failed on '" + side_path + "'");
    return result;
}

}  // namespace glassbox
