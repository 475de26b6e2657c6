#pragma once

#include <vector>

#include "yieldcrit/fields.hpp"
#include "yieldcrit/grid.hpp"
#include "yieldcrit/projections.hpp"

namespace yieldcrit {

/// Safe bound on the squared norm of the stacked iteration operator
/// (four undivided difference channels, 4*4 = 16, plus the h^2-weighted mean
/// row, <= 1).
inline constexpr double kOperatorNormSq = 17.0;

struct SolverConfig {
    double tol = 1e-8;
    long max_iters = 200000;
    long check_every = 100;
    double tau = 0.0;             // 0 selects 1/sqrt(kOperatorNormSq)
    double sigma = 0.0;           // 0 selects 1/sqrt(kOperatorNormSq)
    double over_relaxation = 1.0; // theta in [1, 2]
};

struct TelemetryRecord {
    long iter = 0;
    double tv = 0.0;
    double mean = 0.0;                   // h^2 * sum v (exchange-flow residual)
    double normalization_residual = 0.0; // |solid average - 1|
    double rel_change = 0.0;
};

struct YieldSolution {
    ScalarField v;
    double yc = 0.0;
    double tv = 0.0;
    long iters = 0;
    bool converged = false;
    std::vector<TelemetryRecord> telemetry;
};

/// Critical-yield quotient (h^2 * sum of v over solid cells) / discrete_tv(v).
/// Throws std::runtime_error("quotient undefined") when the variation vanishes.
double compute_yc(const ScalarField& v, const DomainMasks& masks);

/// Minimizes the discrete total variation over the constraint set (exterior
/// zero, rigid particles, solid average one) subject to the exchange-flow
/// condition h^2 * sum v = 0, by a primal-dual iteration:
///
///   p <- project_dual(p + sigma * grad vbar)          per-cell positive ball
///   q <- q - sigma * h^2 * sum(vbar)                  scalar mean multiplier
///   v <- project_primal(v + tau * (div p + q))
///   vbar <- v + theta * (v - v_prev)
///
/// starting from v = project_primal(0), p = 0, q = 0. Stops when the relative
/// primal change and the mean residual both fall below tol, or at max_iters.
/// The returned quotient is the critical yield number for the rasterized
/// geometry.
YieldSolution solve(const DomainMasks& masks, ConstraintMode mode, const SolverConfig& cfg = {});

}  // namespace yieldcrit
