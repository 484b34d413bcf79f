#pragma once

// Result of an identity suite, printed as one line:
//   CHECK <name> algebra=<spec> n=<dim> samples=<k> max_defect=<float> tol=<float> PASS|FAIL

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace weil {

struct CheckOptions {
    int samples = 50;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    /// Optional base points; near points cycle through them when present.
    std::vector<std::vector<double>> base_points;
};

struct CheckReport {
    std::string name;
    std::string algebra;
    int dimension = 0;
    int samples = 0;
    double max_defect = 0.0;
    double tol = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;

    bool pass() const { return max_defect <= tol; }

    void record(double defect) {
        if (defect > max_defect || defect != defect) max_defect = defect;
    }
};

inline std::string format_float(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline std::string format_line(const CheckReport& r) {
    return "CHECK " + r.name + " algebra=" + r.algebra + " n=" + std::to_string(r.dimension) +
           " samples=" + std::to_string(r.samples) + " max_defect=" + format_float(r.max_defect) +
           " tol=" + format_float(r.tol) + (r.pass() ? " PASS" : " FAIL");
}

}  // namespace weil
