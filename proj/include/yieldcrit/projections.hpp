#pragma once

#include "yieldcrit/fields.hpp"
#include "yieldcrit/grid.hpp"

namespace yieldcrit {

/// How solid cells are constrained during the limit solve.
///   SingleParticle: every solid cell is pinned to 1.
///   MultiParticle:  each component is constant, values chosen so the solid
///                   average is 1 (free rigid velocities + normalization row).
enum class ConstraintMode { SingleParticle, MultiParticle };

/// Euclidean projection of each per-cell 4-vector onto
/// { x >= 0 componentwise, ||x||_2 <= radius }: clamp negative components to
/// zero, then rescale if the norm exceeds the radius. Exact for this set.
void project_dual_inplace(UpwindField& p, double radius = 1.0);
UpwindField project_dual(const UpwindField& p, double radius = 1.0);

/// Euclidean projection onto the primal constraint set: Exterior cells to 0,
/// Fluid cells untouched. SingleParticle sets solid cells to 1. MultiParticle
/// replaces component i by its mean g_i shifted by the common multiplier
/// lambda = (|solid| - sum_i m_i g_i) / sum_i m_i, the exact KKT solution of the
/// normalization row. Throws std::runtime_error("normalization infeasible") if
/// there are no solid cells.
void project_primal_inplace(ScalarField& v, const DomainMasks& masks, ConstraintMode mode);
ScalarField project_primal(const ScalarField& v, const DomainMasks& masks, ConstraintMode mode);

/// Rigidity-only variant used by the viscous solver: Exterior to 0, each solid
/// component to its mean, no normalization row.
void project_rigid_inplace(ScalarField& v, const DomainMasks& masks);

}  // namespace yieldcrit
