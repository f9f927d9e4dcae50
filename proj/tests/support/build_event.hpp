#pragma once

#include "glassbox/event.hpp"

#include <string>
#include <utility>

namespace glassbox::testing {

// Hand-built events for evaluator tests, bypassing the JSONL reader.
class EventBuilder {
  public:
    explicit EventBuilder(std::string id = "e0", std::int64_t ts = 0, std::uint64_t pos = 0) {
        e_.id = std::move(id);
        e_.ts = ts;
        e_.pos = pos;
    }

    EventBuilder& set(Section s, const std::string& name, TypedValue v) {
        e_.values[static_cast<int>(s)][name] = std::move(v);
        e_.names[static_cast<int>(s)].insert(name);
        return *this;
    }
    EventBuilder& in_int(const std::string& n, std::int64_t v) {
        return set(Section::In, n, TypedValue::make_int(v));
    }
    EventBuilder& in_money(const std::string& n, std::int64_t v) {
        return set(Section::In, n, TypedValue::make_money(v));
    }
    EventBuilder& in_str(const std::string& n, std::string v) {
        return set(Section::In, n, TypedValue::make_string(std::move(v)));
    }
    EventBuilder& out_int(const std::string& n, std::int64_t v) {
        return set(Section::Out, n, TypedValue::make_int(v));
    }
    EventBuilder& out_str(const std::string& n, std::string v) {
        return set(Section::Out, n, TypedValue::make_string(std::move(v)));
    }
    EventBuilder& env_int(const std::string& n, std::int64_t v) {
        return set(Section::Env, n, TypedValue::make_int(v));
    }
    // A name that arrived without a usable value.
    EventBuilder& name_only(Section s, const std::string& name) {
        e_.names[static_cast<int>(s)].insert(name);
        return *this;
    }

    Event build() const { return e_; }

  private:
    Event e_;
};

}  // namespace glassbox::testing
