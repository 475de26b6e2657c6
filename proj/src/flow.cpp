#include "yieldcrit/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "yieldcrit/calculus.hpp"
#include "yieldcrit/projections.hpp"

namespace yieldcrit {

Buoyancy buoyancy_number(const PhysicalScales& s) {
    if (!(s.mu_f > 0) || !(s.g > 0) || !(s.l_hat > 0) || s.tau_y < 0)
        throw std::invalid_argument("invalid physical scales");
    if (!(s.rho_s > s.rho_f)) throw std::invalid_argument("no buoyancy contrast");
    double drho_g = (s.rho_s - s.rho_f) * s.g;
    return Buoyancy{s.tau_y / (drho_g * s.l_hat), drho_g * s.l_hat * s.l_hat / s.mu_f};
}

namespace {

struct FlowSteps {
    double tau, sigma, theta;
};

FlowSteps resolve_flow_steps(const SolverConfig& cfg) {
    double sigma = cfg.sigma > 0 ? cfg.sigma : 1.0 / std::sqrt(kOperatorNormSq);
    double tau = cfg.tau > 0 ? cfg.tau : 1.0 / (kQuadLipschitz + sigma * kOperatorNormSq);
    if (tau * (kQuadLipschitz + sigma * kOperatorNormSq) > 1.0 + 1e-12)
        throw std::invalid_argument("step sizes violate tau*(L_quad + sigma*L^2) <= 1");
    if (cfg.over_relaxation < 1.0 || cfg.over_relaxation > 2.0)
        throw std::invalid_argument("over-relaxation must lie in [1, 2]");
    if (cfg.tol <= 0 || cfg.max_iters <= 0 || cfg.check_every <= 0)
        throw std::invalid_argument("invalid solver configuration");
    return FlowSteps{tau, sigma, cfg.over_relaxation};
}

// Sum of squared forward differences over edges with at least one Fluid
// endpoint. For feasible fields this is the full Dirichlet integral.
double dirichlet_energy(const ScalarField& w, const DomainMasks& masks) {
    const int n = w.grid.n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t c = w.grid.idx(i, j);
            int id = masks.cell[c];
            if (i + 1 < n && (id == kFluid || masks.cell[c + 1] == kFluid)) {
                double d = w.v[c + 1] - w.v[c];
                acc += d * d;
            }
            if (j + 1 < n && (id == kFluid || masks.cell[c + n] == kFluid)) {
                double d = w.v[c + n] - w.v[c];
                acc += d * d;
            }
        }
    return acc;
}

}  // namespace

FlowSolution solve_flow(const DomainMasks& masks, double Y, const SolverConfig& cfg) {
    if (Y < 0) throw std::invalid_argument("yield number must be nonnegative");
    const FlowSteps st = resolve_flow_steps(cfg);
    const Grid grid = masks.grid;
    const int n = grid.n;
    const double h = grid.h;
    const double h2 = h * h;
    const double radius = Y * h;  // dual ball radius carrying the plastic term Y * tv
    const std::size_t cells = grid.cells();

    ScalarField w(grid), wnew(grid), wbar(grid), wcheck(grid);
    UpwindField p(grid);
    double q = 0.0;

    FlowSolution out;
    out.Y = Y;
    bool converged = false;
    long iter = 0;

    while (iter < cfg.max_iters) {
        ++iter;

        double sum_wbar = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                std::size_t c = grid.idx(i, j);
                double vc = wbar.v[c];
                sum_wbar += vc;
                double* x = &p.p[4 * c];
                double a = x[0] + ((i + 1 < n) ? st.sigma * (wbar.v[c + 1] - vc) : 0.0);
                double b = x[1] + ((i > 0) ? st.sigma * (wbar.v[c - 1] - vc) : 0.0);
                double d = x[2] + ((j + 1 < n) ? st.sigma * (wbar.v[c + n] - vc) : 0.0);
                double e = x[3] + ((j > 0) ? st.sigma * (wbar.v[c - n] - vc) : 0.0);
                if (a < 0) a = 0;
                if (b < 0) b = 0;
                if (d < 0) d = 0;
                if (e < 0) e = 0;
                double nsq = a * a + b * b + d * d + e * e;
                if (nsq > radius * radius) {
                    double s = radius / std::sqrt(nsq);
                    a *= s;
                    b *= s;
                    d *= s;
                    e *= s;
                }
                x[0] = a;
                x[1] = b;
                x[2] = d;
                x[3] = e;
            }
        q -= st.sigma * h2 * sum_wbar;

        // Explicit gradient of the smooth part (edge Laplacian minus the solid
        // drive) plus the adjoint of the dual rows, then the rigidity
        // projection.  As in the limit solver, the mean multiplier enters the
        // primal unweighted while its ascent carries h^2.
        const double* pp = p.p.data();
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                std::size_t c = grid.idx(i, j);
                int id = masks.cell[c];
                double lap = 0.0;
                double vc = w.v[c];
                if (i + 1 < n && (id == kFluid || masks.cell[c + 1] == kFluid))
                    lap += vc - w.v[c + 1];
                if (i > 0 && (id == kFluid || masks.cell[c - 1] == kFluid))
                    lap += vc - w.v[c - 1];
                if (j + 1 < n && (id == kFluid || masks.cell[c + n] == kFluid))
                    lap += vc - w.v[c + n];
                if (j > 0 && (id == kFluid || masks.cell[c - n] == kFluid))
                    lap += vc - w.v[c - n];
                double grad_smooth = lap - (id > 0 ? h2 : 0.0);

                double d = 0.0;
                if (i + 1 < n) d += pp[4 * c + kChanXF];
                if (i > 0) d -= pp[4 * (c - 1) + kChanXF];
                if (i > 0) d += pp[4 * c + kChanXB];
                if (i + 1 < n) d -= pp[4 * (c + 1) + kChanXB];
                if (j + 1 < n) d += pp[4 * c + kChanYF];
                if (j > 0) d -= pp[4 * (c - n) + kChanYF];
                if (j > 0) d += pp[4 * c + kChanYB];
                if (j + 1 < n) d -= pp[4 * (c + n) + kChanYB];

                wnew.v[c] = vc + st.tau * (d + q - grad_smooth);
            }
        project_rigid_inplace(wnew, masks);

        for (std::size_t c = 0; c < cells; ++c) {
            double nv = wnew.v[c];
            wbar.v[c] = nv + st.theta * (nv - w.v[c]);
            w.v[c] = nv;
        }

        if (iter % cfg.check_every == 0) {
            double sum = 0.0, asum = 0.0, dsq = 0.0, nsq = 0.0;
            for (std::size_t c = 0; c < cells; ++c) {
                double x = w.v[c];
                sum += x;
                asum += std::abs(x);
                double dd = x - wcheck.v[c];
                dsq += dd * dd;
                nsq += x * x;
            }
            if (!std::isfinite(sum) || !std::isfinite(nsq))
                throw std::runtime_error("divergence: check step sizes");
            wcheck = w;
            // Absolute floors at roundoff scale let the fully-stopped regime
            // (omega identically zero for Y above critical) terminate instead
            // of chasing a shrinking relative change through denormals.
            bool small_change = std::sqrt(dsq) <= cfg.tol * std::sqrt(nsq) + 1e-15;
            bool mean_ok = std::abs(h2 * sum) <= cfg.tol * h2 * asum + 1e-15;
            if (small_change && mean_ok) {
                converged = true;
                break;
            }
        }
    }

    out.dirichlet = dirichlet_energy(w, masks);
    out.tv = discrete_tv(w);
    double drive = 0.0;
    for (std::size_t c = 0; c < cells; ++c)
        if (masks.cell[c] > 0) drive += w.v[c];
    out.drive = drive * h2;
    out.omega = std::move(w);
    out.iters = iter;
    out.converged = converged;
    return out;
}

namespace {

void validate_sweep_points(const std::vector<double>& y_list) {
    if (y_list.empty()) throw std::invalid_argument("no sweep points");
    for (std::size_t k = 0; k < y_list.size(); ++k) {
        if (y_list[k] < 0) throw std::invalid_argument("yield number must be nonnegative");
        if (k > 0 && y_list[k] <= y_list[k - 1])
            throw std::invalid_argument("sweep points must be increasing");
    }
}

// Critical value from the limit solver on the same grid, multi-particle
// rigidity matching the flow constraint set.
YieldSolution solve_limit(const DomainMasks& masks, const SolverConfig& cfg) {
    SolverConfig limit_cfg = cfg;
    limit_cfg.tau = 0.0;
    limit_cfg.sigma = 0.0;
    return solve(masks, ConstraintMode::MultiParticle, limit_cfg);
}

SweepResult run_rows(const DomainMasks& masks, const std::vector<double>& y_list,
                     const SolverConfig& cfg, YieldSolution limit) {
    SweepResult out;
    out.yc = limit.yc;
    out.v_limit = std::move(limit.v);
    for (double Y : y_list) {
        FlowSolution fs = solve_flow(masks, Y, cfg);
        double gap = out.yc - Y;
        SweepRow row;
        row.Y = Y;
        row.tv = fs.tv;
        row.dirichlet = fs.dirichlet;
        row.drive = fs.drive;
        row.rate_bound_ok = fs.dirichlet <= masks.fluid_area * gap * gap + 1e-12;
        out.rows.push_back(row);
        if (fs.tv > 1e-12) {
            ScalarField prof = fs.omega;
            for (double& x : prof.v) x /= fs.tv;
            out.profiles.emplace_back(std::move(prof));
        } else {
            out.profiles.emplace_back(std::nullopt);
        }
    }
    return out;
}

}  // namespace

SweepResult sweep_to_critical(const DomainMasks& masks, const std::vector<double>& y_list,
                              const SolverConfig& cfg) {
    validate_sweep_points(y_list);
    return run_rows(masks, y_list, cfg, solve_limit(masks, cfg));
}

SweepResult sweep_fractions(const DomainMasks& masks, const std::vector<double>& fracs,
                            const SolverConfig& cfg) {
    validate_sweep_points(fracs);
    YieldSolution limit = solve_limit(masks, cfg);
    std::vector<double> y_list(fracs.size());
    for (std::size_t k = 0; k < fracs.size(); ++k) y_list[k] = fracs[k] * limit.yc;
    return run_rows(masks, y_list, cfg, std::move(limit));
}

}  // namespace yieldcrit
