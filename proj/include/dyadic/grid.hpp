#pragma once

#include <array>
#include <cstdint>
#include <tuple>
#include <vector>

#include "dyadic/errors.hpp"

namespace dyadic {

// Address of one cube of the lattice: its level and its per-axis position.
// Axis positions live in [0, 2^level). For dimension 1 only index[0] is used.
struct CubeId {
    int level = 0;
    std::array<std::int64_t, 2> index{0, 0};

    friend bool operator==(const CubeId&, const CubeId&) = default;
    friend bool operator<(const CubeId& a, const CubeId& b) {
        return std::tie(a.level, a.index[0], a.index[1]) <
               std::tie(b.level, b.index[0], b.index[1]);
    }
};

// Finite dyadic lattice over a root cube: levels 0..depth, 2^(dim*level)
// cubes per level. The level-depth cubes are the cells; every function and
// measure is stored per cell.
class DyadicGrid {
  public:
    DyadicGrid(int dimension, int depth) : dim_(dimension), depth_(depth) {
        if (dim_ != 1 && dim_ != 2) throw Error("dimension must be 1 or 2");
        if (depth_ < 0) throw Error("depth must be nonnegative");
        if (dim_ * depth_ > 24) throw Error("grid too large: dimension*depth > 24");
        offsets_.resize(static_cast<std::size_t>(depth_) + 2, 0);
        for (int l = 0; l <= depth_; ++l)
            offsets_[static_cast<std::size_t>(l) + 1] =
                offsets_[static_cast<std::size_t>(l)] + cubes_at_level(l);
    }

    int dimension() const { return dim_; }
    int depth() const { return depth_; }

    std::int64_t cells_per_axis(int level) const { return std::int64_t{1} << level; }
    std::int64_t cubes_at_level(int level) const {
        return std::int64_t{1} << (dim_ * level);
    }
    std::int64_t cell_count() const { return cubes_at_level(depth_); }
    std::int64_t cube_count() const { return offsets_.back(); }
    std::int64_t level_offset(int level) const {
        return offsets_[static_cast<std::size_t>(level)];
    }

    CubeId root() const { return CubeId{0, {0, 0}}; }
    bool is_leaf(const CubeId& q) const { return q.level == depth_; }

    bool contains(const CubeId& q) const {
        if (q.level < 0 || q.level > depth_) return false;
        const std::int64_t n = cells_per_axis(q.level);
        for (int a = 0; a < dim_; ++a)
            if (q.index[static_cast<std::size_t>(a)] < 0 ||
                q.index[static_cast<std::size_t>(a)] >= n)
                return false;
        return true;
    }

    // Row-major position of a cube within its level.
    std::int64_t linear_in_level(const CubeId& q) const {
        return dim_ == 1 ? q.index[0]
                         : q.index[0] * cells_per_axis(q.level) + q.index[1];
    }

    std::int64_t flat(const CubeId& q) const {
        return level_offset(q.level) + linear_in_level(q);
    }

    CubeId cube_at(int level, std::int64_t linear) const {
        if (dim_ == 1) return CubeId{level, {linear, 0}};
        const std::int64_t n = cells_per_axis(level);
        return CubeId{level, {linear / n, linear % n}};
    }

    CubeId from_flat(std::int64_t id) const {
        int level = 0;
        while (id >= offsets_[static_cast<std::size_t>(level) + 1]) ++level;
        return cube_at(level, id - level_offset(level));
    }

    CubeId ancestor(const CubeId& q, int k) const {
        if (k < 0 || q.level < k)
            throw AncestorOutOfGrid("cube at level " + std::to_string(q.level) +
                                    " has no ancestor " + std::to_string(k) +
                                    " levels up");
        CubeId a{q.level - k, {q.index[0] >> k, q.index[1] >> k}};
        return a;
    }

    CubeId parent(const CubeId& q) const { return ancestor(q, 1); }

    int child_count() const { return 1 << dim_; }

    CubeId child(const CubeId& q, int j) const {
        CubeId c{q.level + 1, {0, 0}};
        if (dim_ == 1) {
            c.index[0] = 2 * q.index[0] + j;
        } else {
            c.index[0] = 2 * q.index[0] + (j >> 1);
            c.index[1] = 2 * q.index[1] + (j & 1);
        }
        return c;
    }

    // True when `outer` contains `inner` (equality included).
    bool covers(const CubeId& outer, const CubeId& inner) const {
        if (outer.level > inner.level) return false;
        const int k = inner.level - outer.level;
        return CubeId{outer.level,
                      {inner.index[0] >> k, inner.index[1] >> k}} == outer;
    }

    // Cells are identified by their row-major linear id at the finest level.
    std::int64_t cell_linear(const CubeId& leaf) const { return linear_in_level(leaf); }
    CubeId cell_cube(std::int64_t cell) const { return cube_at(depth_, cell); }

    CubeId cell_ancestor(std::int64_t cell, int level) const {
        const int k = depth_ - level;
        const CubeId leaf = cell_cube(cell);
        return CubeId{level, {leaf.index[0] >> k, leaf.index[1] >> k}};
    }

    std::int64_t cell_count_of(const CubeId& q) const {
        return std::int64_t{1} << (dim_ * (depth_ - q.level));
    }

    template <typename Fn>
    void for_each_cell(const CubeId& q, Fn&& fn) const {
        const std::int64_t span = std::int64_t{1} << (depth_ - q.level);
        if (dim_ == 1) {
            const std::int64_t begin = q.index[0] * span;
            for (std::int64_t c = begin; c < begin + span; ++c) fn(c);
        } else {
            const std::int64_t rows = cells_per_axis(depth_);
            const std::int64_t r0 = q.index[0] * span;
            const std::int64_t c0 = q.index[1] * span;
            for (std::int64_t r = r0; r < r0 + span; ++r)
                for (std::int64_t c = c0; c < c0 + span; ++c) fn(r * rows + c);
        }
    }

  private:
    int dim_;
    int depth_;
    std::vector<std::int64_t> offsets_;
};

}  // namespace dyadic
