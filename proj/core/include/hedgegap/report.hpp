#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hedgegap {

/// Shortest exact decimal round-trip for a double ("%.17g" with cleanup).
/// All machine-readable output goes through this so reruns are byte-identical.
std::string format_double(double v);

/// Ordered "key = value" report; the machine-readable side of every command.
class KeyValueReport {
  public:
    void put(const std::string& key, const std::string& value);
    void put(const std::string& key, const char* value) { put(key, std::string(value)); }
    void put(const std::string& key, double value);
    void put(const std::string& key, long long value);
    void put(const std::string& key, int value) { put(key, static_cast<long long>(value)); }
    void put(const std::string& key, std::uint64_t value);
    void put(const std::string& key, bool value) { put(key, std::string(value ? "true" : "false")); }

    void write(std::ostream& out) const;
    std::string text() const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// FNV-1a of the resolved configuration and parameters; namespaces output
/// files so concurrent runs do not interfere while reruns stay byte-identical.
std::string run_id(const std::string& resolved);

}  // namespace hedgegap
