#pragma once

// Small builders shared by the suites: hand-assembled masks for constraint
// tests that need full control over cell classes, and seeded random fields so
// every run sees identical data.

#include <random>
#include <stdexcept>
#include <vector>

#include "yieldcrit/fields.hpp"
#include "yieldcrit/grid.hpp"

namespace yieldcrit::testing {

// Builds DomainMasks straight from a class vector (kExterior, kFluid, or
// 1-based component ids). Bypasses rasterize() so layouts that it would
// reject, like touching components, are still constructible.
inline DomainMasks make_masks(const Grid& grid, std::vector<int> classes) {
    if (classes.size() != grid.cells()) throw std::invalid_argument("class vector size mismatch");
    DomainMasks masks;
    masks.grid = grid;
    masks.cell = std::move(classes);
    int ncomp = 0;
    for (int x : masks.cell) ncomp = std::max(ncomp, x);
    masks.component_cells.assign(ncomp, 0);
    long fluid = 0;
    for (int x : masks.cell) {
        if (x > 0) ++masks.component_cells[x - 1];
        if (x == kFluid) ++fluid;
    }
    masks.component_areas.resize(ncomp);
    masks.solid_area = 0.0;
    for (int k = 0; k < ncomp; ++k) {
        masks.component_areas[k] = masks.component_cells[k] * grid.h * grid.h;
        masks.solid_area += masks.component_areas[k];
    }
    masks.fluid_area = fluid * grid.h * grid.h;
    return masks;
}

inline ScalarField random_field(const Grid& grid, std::uint64_t seed, double lo = -1.0,
                                double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField v(grid);
    for (double& x : v.v) x = dist(rng);
    return v;
}

inline UpwindField random_dual(const Grid& grid, std::uint64_t seed, double lo = -1.0,
                               double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    UpwindField p(grid);
    for (double& x : p.p) x = dist(rng);
    return p;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

}  // namespace yieldcrit::testing
