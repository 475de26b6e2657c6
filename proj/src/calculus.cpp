#include "yieldcrit/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace yieldcrit {

namespace {
void require_same_grid(const Grid& a, const Grid& b) {
    if (a.n != b.n) throw std::invalid_argument("grid size mismatch");
}
}  // namespace

void upwind_gradient_into(const ScalarField& f, UpwindField& out) {
    require_same_grid(f.grid, out.grid);
    const int n = f.grid.n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t c = f.grid.idx(i, j);
            double vc = f.v[c];
            double* g = &out.p[4 * c];
            g[kChanXF] = (i + 1 < n) ? f.v[c + 1] - vc : 0.0;
            g[kChanXB] = (i > 0) ? f.v[c - 1] - vc : 0.0;
            g[kChanYF] = (j + 1 < n) ? f.v[c + n] - vc : 0.0;
            g[kChanYB] = (j > 0) ? f.v[c - n] - vc : 0.0;
        }
}

UpwindField upwind_gradient(const ScalarField& f) {
    UpwindField out(f.grid);
    upwind_gradient_into(f, out);
    return out;
}

void signed_divergence_into(const UpwindField& p, ScalarField& out) {
    require_same_grid(p.grid, out.grid);
    const int n = p.grid.n;
    const double* q = p.p.data();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t c = p.grid.idx(i, j);
            double d = 0.0;
            if (i + 1 < n) d += q[4 * c + kChanXF];            // slot dead in last column
            if (i > 0) d -= q[4 * (c - 1) + kChanXF];
            if (i > 0) d += q[4 * c + kChanXB];                // slot dead in first column
            if (i + 1 < n) d -= q[4 * (c + 1) + kChanXB];
            if (j + 1 < n) d += q[4 * c + kChanYF];
            if (j > 0) d -= q[4 * (c - n) + kChanYF];
            if (j > 0) d += q[4 * c + kChanYB];
            if (j + 1 < n) d -= q[4 * (c + n) + kChanYB];
            out.v[c] = d;
        }
}

ScalarField signed_divergence(const UpwindField& p) {
    ScalarField out(p.grid);
    signed_divergence_into(p, out);
    return out;
}

double discrete_tv(const ScalarField& f) {
    const int n = f.grid.n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t c = f.grid.idx(i, j);
            double vc = f.v[c];
            double a = (i + 1 < n) ? f.v[c + 1] - vc : 0.0;
            double b = (i > 0) ? f.v[c - 1] - vc : 0.0;
            double d = (j + 1 < n) ? f.v[c + n] - vc : 0.0;
            double e = (j > 0) ? f.v[c - n] - vc : 0.0;
            if (a < 0) a = 0;
            if (b < 0) b = 0;
            if (d < 0) d = 0;
            if (e < 0) e = 0;
            double nsq = a * a + b * b + d * d + e * e;
            if (nsq > 0) acc += std::sqrt(nsq);
        }
    return f.grid.h * acc;
}

}  // namespace yieldcrit
