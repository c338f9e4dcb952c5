#pragma once

// Plain-definition reimplementations of the quantities the library computes
// with faster or more structured algorithms. Everything here works by direct
// scans over cells, shares no code path with the builders, and is used both
// as the test oracle and by the certificate re-verifier.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/grid.hpp"
#include "dyadic/measure.hpp"

namespace dyadic::ref {

inline std::vector<double> values_on(const WeightedGrid& w, const GridFunction& f,
                                     const CubeId& q) {
    std::vector<double> vals;
    w.grid().for_each_cell(q, [&](std::int64_t c) {
        if (w.cell_mass(c) > 0.0) vals.push_back(f[static_cast<std::size_t>(c)]);
    });
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

inline double mass_where(const WeightedGrid& w, const CubeId& q, auto&& pred) {
    double s = 0.0;
    w.grid().for_each_cell(q, [&](std::int64_t c) {
        if (w.cell_mass(c) > 0.0 && pred(c)) s += w.cell_mass(c);
    });
    return s;
}

inline double mass_of(const WeightedGrid& w, const CubeId& q) {
    return mass_where(w, q, [](std::int64_t) { return true; });
}

// Median by checking both defining conditions at every candidate value.
inline double median(const WeightedGrid& w, const GridFunction& f, const CubeId& q) {
    const auto vals = values_on(w, f, q);
    if (vals.empty()) throw ZeroMassCube("cube of measure zero");
    const double half = mass_of(w, q) / 2;
    for (double v : vals) {
        const double above = mass_where(w, q, [&](std::int64_t c) {
            return f[static_cast<std::size_t>(c)] > v;
        });
        const double below = mass_where(w, q, [&](std::int64_t c) {
            return f[static_cast<std::size_t>(c)] < v;
        });
        if (above <= half && below <= half) return v;
    }
    throw Error("no median found");  // unreachable
}

inline double median_max(const WeightedGrid& w, const GridFunction& f, const CubeId& q) {
    const auto vals = values_on(w, f, q);
    if (vals.empty()) throw ZeroMassCube("cube of measure zero");
    const double half = mass_of(w, q) / 2;
    for (auto it = vals.rbegin(); it != vals.rend(); ++it) {
        const double v = *it;
        const double above = mass_where(w, q, [&](std::int64_t c) {
            return f[static_cast<std::size_t>(c)] > v;
        });
        const double below = mass_where(w, q, [&](std::int64_t c) {
            return f[static_cast<std::size_t>(c)] < v;
        });
        if (above <= half && below <= half) return v;
    }
    throw Error("no median found");  // unreachable
}

// Relative oscillation straight from its definition.
inline double relative_oscillation(const WeightedGrid& w, const GridFunction& f,
                                   const CubeId& q, double lambda) {
    auto vals = values_on(w, f, q);
    if (vals.empty()) throw ZeroMassCube("cube of measure zero");
    for (auto& v : vals) v = std::abs(v);
    vals.push_back(0.0);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    const double bound = lambda * mass_of(w, q);
    for (double r : vals) {
        const double tail = mass_where(w, q, [&](std::int64_t c) {
            return std::abs(f[static_cast<std::size_t>(c)]) > r;
        });
        if (tail <= bound) return r;
    }
    throw Error("no oscillation radius found");  // unreachable
}

// Brute-force oscillation: minimize over every pair of cell values.
struct Window {
    double radius = 0.0;
    double center = 0.0;
};

inline Window median_oscillation(const WeightedGrid& w, const GridFunction& f,
                                 const CubeId& q, double lambda) {
    const auto vals = values_on(w, f, q);
    if (vals.empty()) throw ZeroMassCube("cube of measure zero");
    const double need = (1.0 - lambda) * mass_of(w, q);
    Window best;
    bool have = false;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        for (std::size_t j = i; j < vals.size(); ++j) {
            const double inside = mass_where(w, q, [&](std::int64_t c) {
                const double v = f[static_cast<std::size_t>(c)];
                return v >= vals[i] && v <= vals[j];
            });
            if (inside >= need) {
                const double radius = (vals[j] - vals[i]) / 2;
                if (!have || radius < best.radius) {
                    best.radius = radius;
                    best.center = (vals[i] + vals[j]) / 2;
                    have = true;
                }
                break;  // wider j only grows the window
            }
        }
    }
    return best;
}

// All-pairs oscillation with prefix-summed masses; same search space as the
// naive version, fast enough for large randomized corpora.
inline Window median_oscillation_pairs(const WeightedGrid& w, const GridFunction& f,
                                       const CubeId& q, double lambda) {
    std::vector<std::pair<double, double>> vm;
    w.grid().for_each_cell(q, [&](std::int64_t c) {
        if (w.cell_mass(c) > 0.0) vm.emplace_back(f[static_cast<std::size_t>(c)], w.cell_mass(c));
    });
    if (vm.empty()) throw ZeroMassCube("cube of measure zero");
    std::sort(vm.begin(), vm.end());
    std::vector<double> vals, prefix;
    double total = 0.0;
    for (const auto& [v, m] : vm) {
        if (!vals.empty() && vals.back() == v) {
            total += m;
            prefix.back() = total;
        } else {
            total += m;
            vals.push_back(v);
            prefix.push_back(total);
        }
    }
    const double need = (1.0 - lambda) * total;
    Window best;
    bool have = false;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        for (std::size_t j = i; j < vals.size(); ++j) {
            const double inside = prefix[j] - (i > 0 ? prefix[i - 1] : 0.0);
            if (inside >= need) {
                const double radius = (vals[j] - vals[i]) / 2;
                if (!have || radius < best.radius) {
                    best.radius = radius;
                    best.center = (vals[i] + vals[j]) / 2;
                    have = true;
                }
                break;
            }
        }
    }
    return best;
}

// Weak quasinorm by direct threshold scan over the attained values.
inline double weak_l1(const WeightedGrid& w, const GridFunction& g) {
    std::vector<double> vals;
    for (std::int64_t c = 0; c < w.grid().cell_count(); ++c)
        if (w.cell_mass(c) > 0.0) vals.push_back(std::abs(g[static_cast<std::size_t>(c)]));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    double best = 0.0;
    for (double v : vals) {
        if (v <= 0.0) continue;
        double mass = 0.0;
        for (std::int64_t c = 0; c < w.grid().cell_count(); ++c)
            if (w.cell_mass(c) > 0.0 && std::abs(g[static_cast<std::size_t>(c)]) >= v)
                mass += w.cell_mass(c);
        best = std::max(best, v * mass);
    }
    return best;
}

// Positive dyadic operator, literally: one term per collection member.
inline GridFunction apply_positive(const WeightedGrid& w, const GridFunction& f,
                                   const std::vector<CubeId>& collection, int k) {
    GridFunction out(static_cast<std::size_t>(w.grid().cell_count()), 0.0);
    for (const CubeId& s : collection) {
        const CubeId anc = w.grid().ancestor(s, k);
        const double mass = w.cube_mass(anc);
        if (mass <= 0.0) continue;
        double integral = 0.0;
        w.grid().for_each_cell(anc, [&](std::int64_t c) {
            integral += f[static_cast<std::size_t>(c)] * w.cell_mass(c);
        });
        const double avg = integral / mass;
        w.grid().for_each_cell(s, [&](std::int64_t c) {
            out[static_cast<std::size_t>(c)] += avg;
        });
    }
    return out;
}

}  // namespace dyadic::ref
