#pragma once

#include "json.hpp"

#include <string>

namespace aztec {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

// Serializes with every floating-point number at 17 significant digits; non-finite values become null.
std::string dump_json(const Json& j, int indent = 2);

// %.17g, or "nan"/"inf" spelled out for CSV cells.
std::string fmt17(double x);

}  // namespace aztec
