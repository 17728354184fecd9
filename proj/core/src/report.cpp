#include "hedgegap/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace hedgegap {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // try increasing precision until the value round-trips
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

void KeyValueReport::put(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}
void KeyValueReport::put(const std::string& key, double value) {
    entries_.emplace_back(key, format_double(value));
}
void KeyValueReport::put(const std::string& key, long long value) {
    entries_.emplace_back(key, std::to_string(value));
}
void KeyValueReport::put(const std::string& key, std::uint64_t value) {
    entries_.emplace_back(key, std::to_string(value));
}

void KeyValueReport::write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
}

std::string KeyValueReport::text() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

std::string run_id(const std::string& resolved) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : resolved) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hedgegap
