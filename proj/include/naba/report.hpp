#pragma once

#include <json.hpp>
#include <string>

namespace naba {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "naba";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Report comparison contract: strings (exact rational witnesses) must match
// byte for byte, numbers to 1e−12, containers recursively.
bool reports_match(const Json& a, const Json& b, std::string* why = nullptr);

// Atomic file write (temp + rename).
void write_report(const Json& report, const std::string& path);

Json load_json(const std::string& path);

}  // namespace naba
