#include "naba/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace naba {

bool reports_match(const Json& a, const Json& b, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.type() != b.type()) {
        // allow integer vs float mismatches of equal value
        if (a.is_number() && b.is_number())
            return std::abs(a.get<double>() - b.get<double>()) <= 1e-12 ||
                   fail("number mismatch " + a.dump() + " vs " + b.dump());
        return fail("type mismatch " + a.dump() + " vs " + b.dump());
    }
    if (a.is_object()) {
        if (a.size() != b.size()) return fail("object size mismatch");
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) return fail("missing key " + it.key());
            if (!reports_match(it.value(), b.at(it.key()), why)) return false;
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return fail("array size mismatch");
        for (size_t i = 0; i < a.size(); ++i)
            if (!reports_match(a[i], b[i], why)) return false;
        return true;
    }
    if (a.is_number_float() || b.is_number_float()) {
        double x = a.get<double>(), y = b.get<double>();
        if (std::abs(x - y) > 1e-12) return fail("float mismatch " + a.dump() + " vs " + b.dump());
        return true;
    }
    if (a != b) return fail("value mismatch " + a.dump() + " vs " + b.dump());
    return true;
}

void write_report(const Json& report, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << report.dump(2) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

}  // namespace naba
