#include "yieldcrit/projections.hpp"

#include <cmath>
#include <stdexcept>

namespace yieldcrit {

void project_dual_inplace(UpwindField& p, double radius) {
    if (radius < 0) throw std::invalid_argument("dual radius must be nonnegative");
    const std::size_t cells = p.grid.cells();
    const double r2 = radius * radius;
    for (std::size_t c = 0; c < cells; ++c) {
        double* x = &p.p[4 * c];
        for (int k = 0; k < 4; ++k)
            if (x[k] < 0) x[k] = 0;
        double nsq = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        if (nsq > r2) {
            double s = radius / std::sqrt(nsq);
            for (int k = 0; k < 4; ++k) x[k] *= s;
        }
    }
}

UpwindField project_dual(const UpwindField& p, double radius) {
    UpwindField out = p;
    project_dual_inplace(out, radius);
    return out;
}

namespace {

// Component means; a component whose values are already identical keeps that
// value exactly.
void component_means(const ScalarField& v, const DomainMasks& masks, std::vector<double>& mean) {
    const int nc = masks.n_components();
    mean.assign(nc, 0.0);
    std::vector<double> first(nc, 0.0);
    std::vector<char> seen(nc, 0), uniform(nc, 1);
    const std::size_t cells = v.grid.cells();
    for (std::size_t c = 0; c < cells; ++c) {
        int id = masks.cell[c];
        if (id <= 0) continue;
        double x = v.v[c];
        mean[id - 1] += x;
        if (!seen[id - 1]) {
            seen[id - 1] = 1;
            first[id - 1] = x;
        } else if (x != first[id - 1]) {
            uniform[id - 1] = 0;
        }
    }
    for (int k = 0; k < nc; ++k)
        mean[k] = uniform[k] ? first[k] : mean[k] / static_cast<double>(masks.component_cells[k]);
}

}  // namespace

void project_primal_inplace(ScalarField& v, const DomainMasks& masks, ConstraintMode mode) {
    if (v.grid.n != masks.grid.n) throw std::invalid_argument("grid size mismatch");
    if (masks.n_components() == 0 || masks.solid_area <= 0)
        throw std::runtime_error("normalization infeasible");
    const std::size_t cells = v.grid.cells();

    if (mode == ConstraintMode::SingleParticle) {
        for (std::size_t c = 0; c < cells; ++c) {
            int id = masks.cell[c];
            if (id == kExterior)
                v.v[c] = 0.0;
            else if (id > 0)
                v.v[c] = 1.0;
        }
        return;
    }

    // MultiParticle: component means plus the common shift that restores the
    // solid average, the exact Euclidean projection onto the normalization row.
    std::vector<double> mean;
    component_means(v, masks, mean);
    double total = 0.0, weighted = 0.0;
    for (int k = 0; k < masks.n_components(); ++k) {
        total += static_cast<double>(masks.component_cells[k]);
        weighted += static_cast<double>(masks.component_cells[k]) * mean[k];
    }
    double lambda = (total - weighted) / total;
    for (std::size_t c = 0; c < cells; ++c) {
        int id = masks.cell[c];
        if (id == kExterior)
            v.v[c] = 0.0;
        else if (id > 0)
            v.v[c] = mean[id - 1] + lambda;
    }
}

ScalarField project_primal(const ScalarField& v, const DomainMasks& masks, ConstraintMode mode) {
    ScalarField out = v;
    project_primal_inplace(out, masks, mode);
    return out;
}

void project_rigid_inplace(ScalarField& v, const DomainMasks& masks) {
    if (v.grid.n != masks.grid.n) throw std::invalid_argument("grid size mismatch");
    std::vector<double> mean;
    component_means(v, masks, mean);
    const std::size_t cells = v.grid.cells();
    for (std::size_t c = 0; c < cells; ++c) {
        int id = masks.cell[c];
        if (id == kExterior)
            v.v[c] = 0.0;
        else if (id > 0)
            v.v[c] = mean[id - 1];
    }
}

}  // namespace yieldcrit
