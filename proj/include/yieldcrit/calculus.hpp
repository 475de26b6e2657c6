#pragma once

#include "yieldcrit/fields.hpp"

namespace yieldcrit {

/// Signed upwind differences per cell:
///   (v(i+1,j)-v(i,j), v(i-1,j)-v(i,j), v(i,j+1)-v(i,j), v(i,j-1)-v(i,j)),
/// undivided. Neighbors outside the grid replicate the center value, so the
/// corresponding difference is zero.
void upwind_gradient_into(const ScalarField& v, UpwindField& out);
UpwindField upwind_gradient(const ScalarField& v);

/// Negative adjoint of upwind_gradient: <upwind_gradient(v), p> = -<v, signed_divergence(p)>
/// holds exactly (up to rounding) for every v and p. Per cell,
///   div p = p_xf(i,j) - p_xf(i-1,j) + p_xb(i,j) - p_xb(i+1,j)
///         + p_yf(i,j) - p_yf(i,j-1) + p_yb(i,j) - p_yb(i,j+1),
/// with out-of-grid entries zero. Channel slots whose matching gradient
/// difference is identically zero at the grid edge (x-forward in the last
/// column, x-backward in the first, likewise in y) are ignored; this is what
/// makes the pairing identity hold for arbitrary p.
void signed_divergence_into(const UpwindField& p, ScalarField& out);
ScalarField signed_divergence(const UpwindField& p);

/// Discrete total variation: h * sum over cells of the Euclidean norm of the
/// componentwise positive part of the four upwind differences. Exact perimeter
/// for axis-aligned rectangle indicators. Accumulated in fixed row-major order.
double discrete_tv(const ScalarField& v);

}  // namespace yieldcrit
