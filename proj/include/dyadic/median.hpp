#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"

namespace dyadic {

inline void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 0.5))
        throw BadLambda("lambda must lie in (0, 1/2)");
}

namespace detail {

// (value, mass) for the positive-mass cells of Q, sorted by value.
// Throws when Q carries no mass: medians and oscillations are undefined there.
inline std::vector<std::pair<double, double>> weighted_values(
    const WeightedGrid& w, const GridFunction& f, const CubeId& q) {
    std::vector<std::pair<double, double>> vm;
    w.grid().for_each_cell(q, [&](std::int64_t c) {
        const double m = w.cell_mass(c);
        if (m > 0.0) vm.emplace_back(f[static_cast<std::size_t>(c)], m);
    });
    if (vm.empty()) throw ZeroMassCube("cube of measure zero");
    std::sort(vm.begin(), vm.end());
    return vm;
}

inline double total_mass_of(const std::vector<std::pair<double, double>>& vm) {
    double t = 0.0;
    for (const auto& [v, m] : vm) t += m;
    return t;
}

// Distinct values with their masses, ascending.
inline void distinct_values(const std::vector<std::pair<double, double>>& vm,
                            std::vector<double>& values, std::vector<double>& masses) {
    values.clear();
    masses.clear();
    for (const auto& [v, m] : vm) {
        if (!values.empty() && values.back() == v) {
            masses.back() += m;
        } else {
            values.push_back(v);
            masses.push_back(m);
        }
    }
}

// Smallest value v among the candidates with mass{x : x > v} <= bound.
// Values must be sorted ascending with matching masses; the answer exists
// because the last candidate has empty upper tail.
inline double smallest_with_tail_below(const std::vector<double>& values,
                                       const std::vector<double>& masses,
                                       double total, double bound) {
    double above = total;
    for (std::size_t i = 0; i < values.size(); ++i) {
        above -= masses[i];
        if (above <= bound) return values[i];
    }
    return values.back();
}

}  // namespace detail

// Canonical (minimal) median: the smallest real m with
//   mass(Q cap {f > m}) <= mass(Q)/2  and  mass(Q cap {f < m}) <= mass(Q)/2.
// It is always one of the cell values on Q, and the first condition locates
// it: the second then holds automatically.
inline double median(const WeightedGrid& w, const GridFunction& f, const CubeId& q) {
    const auto vm = detail::weighted_values(w, f, q);
    const double total = detail::total_mass_of(vm);
    std::vector<double> values, masses;
    detail::distinct_values(vm, values, masses);
    return detail::smallest_with_tail_below(values, masses, total, total / 2);
}

// The set of medians is a closed interval; both endpoints are cell values.
struct MedianInterval {
    double lo = 0.0;
    double hi = 0.0;
};

inline MedianInterval median_interval(const WeightedGrid& w, const GridFunction& f,
                                      const CubeId& q) {
    const auto vm = detail::weighted_values(w, f, q);
    const double total = detail::total_mass_of(vm);
    std::vector<double> values, masses;
    detail::distinct_values(vm, values, masses);

    MedianInterval mi;
    mi.lo = detail::smallest_with_tail_below(values, masses, total, total / 2);
    // Largest v with mass{f < v} <= total/2.
    double below = 0.0;
    mi.hi = values.front();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (below <= total / 2) mi.hi = values[i];
        below += masses[i];
    }
    return mi;
}

// Relative oscillation about zero: the smallest r >= 0 with
//   mass(Q cap {|f| > r}) <= lambda * mass(Q).
// The upper tail is a right-continuous step function of r, so the minimum is
// attained at 0 or at one of the values |f| takes on Q.
inline double relative_oscillation(const WeightedGrid& w, const GridFunction& f,
                                   const CubeId& q, double lambda) {
    check_lambda(lambda);
    auto vm = detail::weighted_values(w, f, q);
    for (auto& [v, m] : vm) v = std::abs(v);
    std::sort(vm.begin(), vm.end());
    const double total = detail::total_mass_of(vm);
    std::vector<double> values, masses;
    detail::distinct_values(vm, values, masses);

    // r = 0 qualifies only when the zero level set carries enough mass, and
    // then 0 is itself one of the scanned values.
    return detail::smallest_with_tail_below(values, masses, total, lambda * total);
}

// Relative oscillation of f - center on Q.
inline double relative_oscillation(const WeightedGrid& w, const GridFunction& f,
                                   const CubeId& q, double lambda, double center) {
    check_lambda(lambda);
    std::vector<std::pair<double, double>> vm;
    w.grid().for_each_cell(q, [&](std::int64_t c) {
        const double m = w.cell_mass(c);
        if (m > 0.0) vm.emplace_back(std::abs(f[static_cast<std::size_t>(c)] - center), m);
    });
    if (vm.empty()) throw ZeroMassCube("cube of measure zero");
    std::sort(vm.begin(), vm.end());
    const double total = detail::total_mass_of(vm);
    std::vector<double> values, masses;
    detail::distinct_values(vm, values, masses);
    return detail::smallest_with_tail_below(values, masses, total, lambda * total);
}

// Oscillation after optimal recentering: half the length of the shortest
// closed interval [a, b] with endpoints among the cell values that captures
// at least (1 - lambda) of the mass of Q. Returned with its witness center.
struct MedianOscillation {
    double radius = 0.0;
    double center = 0.0;
};

inline MedianOscillation median_oscillation(const WeightedGrid& w, const GridFunction& f,
                                            const CubeId& q, double lambda) {
    check_lambda(lambda);
    const auto vm = detail::weighted_values(w, f, q);
    const double total = detail::total_mass_of(vm);
    std::vector<double> values, masses;
    detail::distinct_values(vm, values, masses);

    const double need = (1.0 - lambda) * total;
    MedianOscillation best;
    bool have = false;
    double window = 0.0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < values.size(); ++hi) {
        window += masses[hi];
        while (window - masses[lo] >= need) window -= masses[lo++];
        if (window >= need) {
            const double radius = (values[hi] - values[lo]) / 2;
            if (!have || radius < best.radius) {
                best.radius = radius;
                best.center = (values[hi] + values[lo]) / 2;
                have = true;
            }
        }
    }
    return best;
}

}  // namespace dyadic
