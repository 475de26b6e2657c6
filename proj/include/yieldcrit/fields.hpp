#pragma once

#include <vector>

#include "yieldcrit/grid.hpp"

namespace yieldcrit {

/// One scalar value per cell.
struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), v(g.cells(), 0.0) {}

    double at(int i, int j) const { return v[grid.idx(i, j)]; }
    double& at(int i, int j) { return v[grid.idx(i, j)]; }
};

/// Channel order for the four upwind differences per cell.
inline constexpr int kChanXF = 0;  // v(i+1,j) - v(i,j)
inline constexpr int kChanXB = 1;  // v(i-1,j) - v(i,j)
inline constexpr int kChanYF = 2;  // v(i,j+1) - v(i,j)
inline constexpr int kChanYB = 3;  // v(i,j-1) - v(i,j)

/// Four values per cell, used both for the upwind gradient and for its dual
/// multiplier field. Stored interleaved: entry 4*idx(i,j) + channel.
struct UpwindField {
    Grid grid;
    std::vector<double> p;

    UpwindField() = default;
    explicit UpwindField(const Grid& g) : grid(g), p(4 * g.cells(), 0.0) {}

    double at(int i, int j, int channel) const { return p[4 * grid.idx(i, j) + channel]; }
    double& at(int i, int j, int channel) { return p[4 * grid.idx(i, j) + channel]; }
};

}  // namespace yieldcrit
