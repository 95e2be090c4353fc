#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>

namespace lagedge {

// All numeric output uses 17 significant digits so doubles survive a
// write/parse round trip bit-exactly.
inline std::string fmt_g17(double x) {
    if (std::isnan(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_i64(std::int64_t x) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(x));
    return buf;
}

inline std::string fmt_u64(std::uint64_t x) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(x));
    return buf;
}

// Minimal append-style JSON object writer; enough for the flat records this
// project emits. Values arrive preformatted (fmt_g17 etc.) or as raw strings.
class JsonObject {
  public:
    JsonObject& field(const std::string& key, const std::string& raw_value) {
        body_ += body_.empty() ? "\"" : ",\"";
        body_ += key;
        body_ += "\":";
        body_ += raw_value;
        return *this;
    }
    JsonObject& field(const std::string& key, double v) { return field(key, fmt_g17(v)); }
    JsonObject& field_str(const std::string& key, const std::string& s) {
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') quoted += '\\';
            quoted += c;
        }
        quoted += '"';
        return field(key, quoted);
    }
    JsonObject& field_bool(const std::string& key, bool b) { return field(key, b ? "true" : "false"); }

    std::string str() const { return "{" + body_ + "}"; }

  private:
    std::string body_;
};

}  // namespace lagedge
