#pragma once

#include <algorithm>
#include <cmath>

namespace dyadic {

// Global tolerance for inequality assertions on aggregated quantities.
// Selections from finite value sets are exact; only sums accumulate error.
inline constexpr double kRelTol = 1e-9;

inline bool rel_leq(double a, double b, double tol = kRelTol) {
    return a <= b + tol * std::max(std::abs(a), std::abs(b));
}

inline bool rel_close(double a, double b, double tol = kRelTol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

// |a - b| measured against an explicit scale, for sums that may cancel to 0.
inline bool close_at_scale(double a, double b, double scale, double tol = kRelTol) {
    return std::abs(a - b) <= tol * std::max(scale, 1e-300);
}

}  // namespace dyadic
