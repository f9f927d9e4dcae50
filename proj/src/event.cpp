#include "glassbox/event.hpp"

#include <nlohmann/json.hpp>
#include <zlib.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace glassbox {

using nlohmann::json;

const std::set<std::string>& field_names_present(const Event& e, Section section) {
    return e.names[static_cast<int>(section)];
}

const TypedValue* EventEnv::lookup(const FieldRef& ref) const {
    if (ref.side != PairSide::None) return nullptr;
    const auto& section = e_.section_values(ref.section);
    auto it = section.find(ref.name);
    return it == section.end() ? nullptr : &it->second;
}

const TypedValue* PairEnv::lookup(const FieldRef& ref) const {
    const Event* e = nullptr;
    if (ref.side == PairSide::A) e = &a_;
    else if (ref.side == PairSide::B) e = &b_;
    else return nullptr;
    const auto& section = e->section_values(ref.section);
    auto it = section.find(ref.name);
    return it == section.end() ? nullptr : &it->second;
}

std::string SchemaViolation::message() const {
    std::string out = "event '" + event_id + "': field " + field;
    if (expected.empty())
        out += " is not declared in the schema (name kept, value ignored)";
    else
        out += " expected " + expected + ", found " + found + " (field dropped)";
    return out;
}

// ── Line sources ──────────────────────────────────────────────────────────

namespace {

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

class StreamLineSource final : public LineSource {
  public:
    explicit StreamLineSource(std::istream& in) : in_(in) {}

    bool next_line(std::string& out) override {
        if (!std::getline(in_, out)) return false;
        strip_cr(out);
        return true;
    }

  private:
    std::istream& in_;
};

class FileLineSource final : public LineSource {
  public:
    explicit FileLineSource(const std::string& path) : file_(path) {
        if (!file_) throw TraceError(0, "cannot open trace file '" + path + "'");
    }

    bool next_line(std::string& out) override {
        if (!std::getline(file_, out)) return false;
        strip_cr(out);
        return true;
    }

  private:
    std::ifstream file_;
};

class StringSource final : public LineSource {
  public:
    explicit StringSource(std::string text) : stream_(std::move(text)) {}

    bool next_line(std::string& out) override {
        if (!std::getline(stream_, out)) return false;
        strip_cr(out);
        return true;
    }

  private:
    std::istringstream stream_;
};

class GzipLineSource final : public LineSource {
  public:
    explicit GzipLineSource(const std::string& path) : file_(gzopen(path.c_str(), "rb")) {
        if (!file_) throw TraceError(0, "cannot open gzip trace file '" + path + "'");
    }

    ~GzipLineSource() override {
        if (file_) gzclose(file_);
    }

    bool next_line(std::string& out) override {
        out.clear();
        for (;;) {
            auto nl = buffer_.find('\n', scan_);
            if (nl != std::string::npos) {
                out.assign(buffer_, scan_, nl - scan_);
                scan_ = nl + 1;
                strip_cr(out);
                return true;
            }
            char chunk[1 << 15];
            int n = gzread(file_, chunk, sizeof chunk);
            if (n < 0) {
                int errnum = 0;
                const char* msg = gzerror(file_, &errnum);
                throw TraceError(0, std::string("gzip read error: ") + msg);
            }
            if (n == 0) {  // flush the final unterminated line, if any
                if (scan_ < buffer_.size()) {
                    out.assign(buffer_, scan_, buffer_.size() - scan_);
                    buffer_.clear();
                    scan_ = 0;
                    strip_cr(out);
                    return true;
                }
                return false;
            }
            buffer_.erase(0, scan_);
            scan_ = 0;
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

  private:
    gzFile file_;
    std::string buffer_;
    std::size_t scan_{0};
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::unique_ptr<LineSource> open_line_source(const std::string& path) {
    if (path == "-") return std::make_unique<StreamLineSource>(std::cin);
    if (ends_with(path, ".gz")) return std::make_unique<GzipLineSource>(path);
    return std::make_unique<FileLineSource>(path);
}

std::unique_ptr<LineSource> string_line_source(std::string text) {
    return std::make_unique<StringSource>(std::move(text));
}

// ── TraceReader ───────────────────────────────────────────────────────────

TraceReader::TraceReader(std::unique_ptr<LineSource> source, const Schema& schema,
                         SchemaMode mode)
    : source_(std::move(source)), schema_(schema), mode_(mode) {}

void TraceReader::warn(SchemaViolation v) {
    ++total_warnings_;
    if (warnings_.size() < kWarningCap) warnings_.push_back(std::move(v));
}

namespace {

std::string brief(const json& v) {
    std::string s = v.dump();
    if (s.size() > 40) s = s.substr(0, 37) + "...";
    return s;
}

// int64-range integer; rejects unsigned values beyond INT64_MAX.
bool get_i64(const json& v, std::int64_t& out) {
    if (!v.is_number_integer()) return false;
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
        return false;
    out = v.get<std::int64_t>();
    return true;
}

}  // namespace

bool TraceReader::next(Event& out) {
    std::string line;
    for (;;) {
        if (!source_->next_line(line)) return false;
        ++line_no_;
        bool blank = true;
        for (char c : line)
            if (c != ' ' && c != '\t') blank = false;
        if (!blank) break;
    }

    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded())
        throw TraceError(line_no_, "line " + std::to_string(line_no_) + ": not valid JSON");
    if (!rec.is_object())
        throw TraceError(line_no_, "line " + std::to_string(line_no_) + ": record is not an object");

    for (const auto& [key, unused] : rec.items()) {
        (void)unused;
        if (key != "id" && key != "ts" && key != "in" && key != "out" && key != "env")
            throw TraceError(line_no_, "line " + std::to_string(line_no_) +
                                           ": unexpected key \"" + key + "\"");
    }

    if (!rec.contains("id") || !rec["id"].is_string() || rec["id"].get<std::string>().empty())
        throw TraceError(line_no_,
                         "line " + std::to_string(line_no_) + ": missing or empty \"id\"");
    std::int64_t ts = 0;
    if (!rec.contains("ts") || !get_i64(rec["ts"], ts))
        throw TraceError(line_no_,
                         "line " + std::to_string(line_no_) + ": missing or non-integer \"ts\"");
    if (!rec.contains("in") || !rec["in"].is_object())
        throw TraceError(line_no_,
                         "line " + std::to_string(line_no_) + ": missing \"in\" object");
    if (!rec.contains("out") || !rec["out"].is_object())
        throw TraceError(line_no_,
                         "line " + std::to_string(line_no_) + ": missing \"out\" object");
    if (rec.contains("env") && !rec["env"].is_object())
        throw TraceError(line_no_, "line " + std::to_string(line_no_) + ": \"env\" is not an object");

    out = Event{};
    out.id = rec["id"].get<std::string>();
    out.ts = ts;
    out.pos = events_read_;

    if (any_event_ && out.ts < last_ts_)
        throw TraceError(line_no_, "line " + std::to_string(line_no_) + ": event '" + out.id +
                                       "' ts " + std::to_string(out.ts) +
                                       " is earlier than the previous event's ts " +
                                       std::to_string(last_ts_));
    last_ts_ = out.ts;
    any_event_ = true;

    const Section sections[] = {Section::In, Section::Out, Section::Env};
    for (Section sec : sections) {
        const char* key = section_name(sec);
        if (!rec.contains(key)) continue;
        int idx = static_cast<int>(sec);
        for (const auto& [name, val] : rec[key].items()) {
            std::string path = std::string(key) + "." + name;
            const FieldDecl* decl = schema_.find(sec, name);
            if (!decl) {
                if (mode_ == SchemaMode::Strict)
                    throw TraceError(line_no_, "line " + std::to_string(line_no_) + ": event '" +
                                                   out.id + "': field " + path +
                                                   " is not declared in the schema");
                warn({out.id, path, "", brief(val), Severity::Warning});
                out.names[idx].insert(name);  // visible to the whitelist, value-less
                continue;
            }

            bool ok = false;
            TypedValue tv;
            std::int64_t num = 0;
            switch (decl->type) {
                case FieldType::Int:
                    if (get_i64(val, num)) {
                        tv = TypedValue::make_int(num);
                        ok = true;
                    }
                    break;
                case FieldType::Money:
                    if (get_i64(val, num)) {
                        tv = TypedValue::make_money(num);
                        ok = true;
                    }
                    break;
                case FieldType::String:
                    if (val.is_string()) {
                        tv = TypedValue::make_string(val.get<std::string>());
                        ok = true;
                    }
                    break;
                case FieldType::Bool:
                    if (val.is_boolean()) {
                        tv = TypedValue::make_bool(val.get<bool>());
                        ok = true;
                    }
                    break;
            }

            if (!ok) {
                if (mode_ == SchemaMode::Strict)
                    throw TraceError(line_no_, "line " + std::to_string(line_no_) + ": event '" +
                                                   out.id + "': field " + path + " expected " +
                                                   field_type_name(decl->type) + ", found " +
                                                   brief(val));
                warn({out.id, path, field_type_name(decl->type), brief(val), Severity::Warning});
                continue;  // dropped: neither value nor name survives
            }

            out.values[idx].emplace(name, std::move(tv));
            out.names[idx].insert(name);
        }
    }

    ++events_read_;
    return true;
}

}  // namespace glassbox
