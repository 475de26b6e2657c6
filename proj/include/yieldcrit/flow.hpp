#pragma once

#include <optional>
#include <vector>

#include "yieldcrit/fields.hpp"
#include "yieldcrit/grid.hpp"
#include "yieldcrit/saddle.hpp"

namespace yieldcrit {

/// Dimensional inputs for the buoyancy scaling.
struct PhysicalScales {
    double tau_y = 0.0;  // yield stress
    double mu_f = 0.0;   // fluid viscosity
    double rho_s = 0.0;  // particle density
    double rho_f = 0.0;  // fluid density
    double g = 0.0;      // gravity
    double l_hat = 0.0;  // length scale
};

struct Buoyancy {
    double Y = 0.0;      // tau_y / ((rho_s - rho_f) * g * l_hat)
    double omega0 = 0.0; // (rho_s - rho_f) * g * l_hat^2 / mu_f
};

/// Throws std::invalid_argument("no buoyancy contrast") when rho_s <= rho_f,
/// and rejects nonpositive mu_f, g, l_hat or negative tau_y.
Buoyancy buoyancy_number(const PhysicalScales& scales);

/// Lipschitz bound for the gradient of the quadratic edge energy (grid graph
/// Laplacian, degree <= 4).
inline constexpr double kQuadLipschitz = 8.0;

struct FlowSolution {
    ScalarField omega;
    double Y = 0.0;
    double dirichlet = 0.0; // sum over counted edges of the squared difference
    double tv = 0.0;        // discrete_tv(omega)
    double drive = 0.0;     // h^2 * sum of omega over solid cells
    long iters = 0;
    bool converged = false;
};

/// Minimizes  (1/2) sum_edges (omega_b - omega_a)^2 + Y * discrete_tv(omega)
///            - h^2 * sum_solid omega
/// over fields that vanish outside the domain, are rigid on each particle and
/// have zero mean; the quadratic runs over edges with at least one Fluid
/// endpoint. Same primal-dual scheme as the limit solver with the smooth part
/// taken as an explicit gradient step; the plasticity dual lives in the
/// positive ball of radius Y*h. Default steps sigma = 1/sqrt(17),
/// tau = 1/(kQuadLipschitz + sigma * kOperatorNormSq).
FlowSolution solve_flow(const DomainMasks& masks, double Y, const SolverConfig& cfg = {});

struct SweepRow {
    double Y = 0.0;
    double tv = 0.0;
    double dirichlet = 0.0;
    double drive = 0.0;
    bool rate_bound_ok = false; // dirichlet <= fluid_area * (yc - Y)^2
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::optional<ScalarField>> profiles; // omega / tv where tv > 1e-12
    double yc = 0.0;       // from the limit solver on the same grid
    ScalarField v_limit;   // limiting rescaled profile
};

/// Runs solve_flow at each Y (nonnegative, increasing), records the energy
/// split per row, checks the quadratic rate bound against the limit solver's
/// critical value, and emits the rescaled profile omega/tv wherever the
/// variation has not yet vanished. Throws std::invalid_argument("no sweep
/// points") for an empty list.
SweepResult sweep_to_critical(const DomainMasks& masks, const std::vector<double>& y_list,
                              const SolverConfig& cfg = {});

/// Sweep at the given fractions of the critical value; runs the limit solver
/// once and scales its result into the absolute sweep points.
SweepResult sweep_fractions(const DomainMasks& masks, const std::vector<double>& fracs,
                            const SolverConfig& cfg = {});

}  // namespace yieldcrit
