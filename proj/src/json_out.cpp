#include "aztec/json_out.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace aztec {

namespace {

void emit(std::ostringstream& os, const Json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                newline(depth + 1);
                os << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
                emit(os, it.value(), indent, depth + 1);
            }
            newline(depth);
            os << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // short numeric rows stay on one line
            bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            os << '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) os << (flat && indent >= 0 ? ", " : ",");
                first = false;
                if (!flat) newline(depth + 1);
                emit(os, e, indent, depth + 1);
            }
            if (!flat) newline(depth);
            os << ']';
            return;
        }
        case Json::value_t::number_float: {
            double x = j.get<double>();
            if (!std::isfinite(x)) {
                os << "null";
                return;
            }
            os << fmt17(x);
            return;
        }
        default: os << j.dump(); return;
    }
}

}  // namespace

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string dump_json(const Json& j, int indent) {
    std::ostringstream os;
    emit(os, j, indent, 0);
    if (indent >= 0) os << '\n';
    return os.str();
}

}  // namespace aztec
