#pragma once

#include "yieldcrit/fields.hpp"
#include "yieldcrit/grid.hpp"
#include "yieldcrit/projections.hpp"
#include "yieldcrit/saddle.hpp"

namespace yieldcrit {

/// Slow cross-check for the primal-dual solver, deliberately a different
/// algorithm family: minimizes an eps-Huber smoothing of the discrete total
/// variation by projected subgradient descent with diminishing steps
/// step_c / sqrt(k). Feasibility is restored after every step by alternating
/// 50 times between subtracting the mean over non-exterior cells and
/// reprojecting onto the constraint set. Desk-scale only: throws
/// std::invalid_argument for n > 32.
YieldSolution subgradient_reference(const DomainMasks& masks, ConstraintMode mode, long iters,
                                    double step_c = 0.5, double huber_eps = 1e-6);

struct VertexCheck {
    double beta_plus = 0.0;
    double beta_minus = 0.0;
    bool consistent = false;
};

/// Checks a (near-)three-valued field against the two-constraint linear
/// program its level sets induce: solves the 2x2 system exactly, verifies the
/// sign pattern (beta+ >= 0 >= beta-), verifies vertex optimality (zeroing
/// either value admits no cheaper feasible point), and compares the solved
/// values with the field's plateau averages to 1e-3 relative. Throws
/// std::runtime_error("level sets cannot satisfy constraints") when the system
/// is singular.
VertexCheck lp_vertex_check(const ScalarField& v, const DomainMasks& masks, double eps_q = 0.05);

}  // namespace yieldcrit
