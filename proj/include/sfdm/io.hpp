#pragma once

// CSV output for branches and stability sweeps. Lambda is printed with nine
// decimals, other reals with seventeen significant digits.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "sfdm/continuation.hpp"
#include "sfdm/stability.hpp"

namespace sfdm {

inline std::string format_fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Nearest multiple of 1e-9, for JSON summaries.
inline double round9(double v) { return std::round(v * 1e9) / 1e9; }

inline void write_branch_csv(std::ostream& out, const Branch& branch) {
    out << "A,lambda,iterations,converged,reset_used,max_u\n";
    for (const auto& p : branch.points)
        out << format_real(p.amplitude) << ',' << format_fixed9(p.lambda) << ',' << p.iterations << ','
            << (p.converged ? 1 : 0) << ',' << (p.reset_used ? 1 : 0) << ',' << format_real(p.max_u) << '\n';
}

inline void write_stability_csv(std::ostream& out, const StabilityResult& result) {
    out << "A,lambda,sigma_max,kind\n";
    for (const auto& p : result.points)
        out << format_real(p.amplitude) << ',' << format_fixed9(p.lambda) << ',' << format_real(p.sigma_max) << ','
            << to_string(result.kind) << '\n';
}

}  // namespace sfdm
