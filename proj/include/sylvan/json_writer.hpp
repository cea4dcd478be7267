#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace sylvan {

/// Minimal streaming JSON writer with a fixed key order (caller-driven) and
/// 17-significant-digit float formatting, so exported documents are
/// byte-stable across runs.
class JsonWriter {
public:
    void begin_object() { separator(); out_ += '{'; stack_push(); }
    void end_object() { out_ += '}'; stack_pop(); }
    void begin_array() { separator(); out_ += '['; stack_push(); }
    void end_array() { out_ += ']'; stack_pop(); }

    void key(const std::string& name) {
        separator();
        write_string(name);
        out_ += ':';
        after_key_ = true;
    }

    void value(const std::string& s) { separator(); write_string(s); }
    void value(const char* s) { value(std::string(s)); }
    void value(std::int64_t v) { separator(); out_ += std::to_string(v); }
    void value(std::uint64_t v) { separator(); out_ += std::to_string(v); }
    void value(int v) { value(static_cast<std::int64_t>(v)); }
    void value(bool v) { separator(); out_ += v ? "true" : "false"; }

    void value(double v) {
        separator();
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out_ += buf;
    }

    const std::string& str() const { return out_; }

private:
    void write_string(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    void separator() {
        if (after_key_) {
            after_key_ = false;
            return;
        }
        if (need_comma_) out_ += ',';
        need_comma_ = true;
    }

    void stack_push() { need_comma_ = false; }
    void stack_pop() { need_comma_ = true; }

    std::string out_;
    bool need_comma_ = false;
    bool after_key_ = false;
};

}  // namespace sylvan
