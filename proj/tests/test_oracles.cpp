#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "yieldcrit/analysis.hpp"
#include "yieldcrit/grid.hpp"
#include "yieldcrit/oracles.hpp"
#include "yieldcrit/saddle.hpp"

#include "corpus.hpp"
#include "helpers.hpp"

using namespace yieldcrit;
using namespace yieldcrit::testing;

namespace {

// Same layout as the analysis suite's worked quantization example: solid 2x2
// block at value 1, a 12-cell strip at -0.5, zero elsewhere.  The level sets
// induce the 2x2 system with solution (1, -1/3), while the strip's actual
// plateau sits away from the solved value.
struct WorkedInstance {
    DomainMasks masks;
    ScalarField v;
};

WorkedInstance worked_instance() {
    const Grid g = build_grid(8);
    std::vector<int> classes(g.cells(), kFluid);
    for (int j = 3; j <= 4; ++j)
        for (int i = 3; i <= 4; ++i) classes[g.idx(i, j)] = 1;
    WorkedInstance w{make_masks(g, classes), ScalarField(g)};
    for (int j = 3; j <= 4; ++j)
        for (int i = 3; i <= 4; ++i) w.v.v[g.idx(i, j)] = 1.0;
    for (int i = 1; i <= 6; ++i) {
        w.v.v[g.idx(i, 1)] = -0.5;
        w.v.v[g.idx(i, 6)] = -0.5;
    }
    return w;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("reference solver agrees with the saddle solver") {
    SolverConfig cfg;
    cfg.tol = 1e-10;

    DomainMasks ref = rasterize(reference_block(), build_grid(16));
    YieldSolution main_ref = solve(ref, ConstraintMode::MultiParticle, cfg);
    YieldSolution orc_ref = subgradient_reference(ref, ConstraintMode::MultiParticle, 120000, 0.25);
    CHECK(relative_gap(main_ref.yc, orc_ref.yc) <= 1e-3);

    // A genuinely multi-component geometry exercises the per-particle rigidity
    // path of both solvers.
    DomainMasks pair = rasterize(two_unequal(), build_grid(16));
    YieldSolution main_pair = solve(pair, ConstraintMode::MultiParticle, cfg);
    YieldSolution orc_pair =
        subgradient_reference(pair, ConstraintMode::MultiParticle, 200000, 0.25);
    CHECK(relative_gap(main_pair.yc, orc_pair.yc) <= 1e-3);
}

TEST_CASE("reference solver is insensitive to its own knobs") {
    DomainMasks masks = rasterize(reference_block(), build_grid(16));

    // Doubling the iteration budget must not move the quotient beyond the
    // stated drift, and neither must halving the smoothing width.
    YieldSolution base = subgradient_reference(masks, ConstraintMode::MultiParticle, 100000, 0.25);
    YieldSolution twice = subgradient_reference(masks, ConstraintMode::MultiParticle, 200000, 0.25);
    CHECK(std::abs(twice.yc - base.yc) <= 1e-4);

    YieldSolution fine =
        subgradient_reference(masks, ConstraintMode::MultiParticle, 100000, 0.25, 5e-7);
    CHECK(std::abs(fine.yc - base.yc) < 1e-4);
}

TEST_CASE("reference solver output is feasible from an infeasible start") {
    DomainMasks masks = rasterize(reference_block(), build_grid(16));
    YieldSolution sol = subgradient_reference(masks, ConstraintMode::SingleParticle, 500, 0.25);
    CHECK(sol.converged);

    const Grid& g = masks.grid;
    const double h2 = g.h * g.h;
    double mean = 0.0, norm = 0.0;
    double plateau = 0.0;
    bool seen = false;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        int id = masks.cell[c];
        mean += sol.v.v[c];
        if (id == kExterior) CHECK(sol.v.v[c] == 0.0);
        if (id > 0) {
            if (!seen) {
                plateau = sol.v.v[c];
                seen = true;
            }
            CHECK(sol.v.v[c] == plateau);
            norm += sol.v.v[c];
        }
    }
    CHECK(std::abs(h2 * norm - masks.solid_area) <= 1e-12 * masks.solid_area);
    CHECK(std::abs(h2 * mean) <= 1e-10);
    CHECK(sol.tv > 0.0);
    CHECK(sol.yc > 0.0);
}

TEST_CASE("reference solver rejects desk-scale violations") {
    DomainMasks big = rasterize(reference_block(), build_grid(64));
    CHECK_THROWS_WITH_AS(subgradient_reference(big, ConstraintMode::SingleParticle, 100),
                         "reference solver is limited to n <= 32", std::invalid_argument);

    DomainMasks ok = rasterize(reference_block(), build_grid(16));
    CHECK_THROWS_AS(subgradient_reference(ok, ConstraintMode::SingleParticle, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(subgradient_reference(ok, ConstraintMode::SingleParticle, 100, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(subgradient_reference(ok, ConstraintMode::SingleParticle, 100, 0.25, 0.0),
                    std::invalid_argument);
}

TEST_CASE("vertex check recovers the worked plateau values") {
    WorkedInstance w = worked_instance();
    VertexCheck vc = lp_vertex_check(w.v, w.masks);
    CHECK(vc.beta_plus == 1.0);
    CHECK(vc.beta_minus == -1.0 / 3.0);

    // The raw field's negative plateau (-0.5) breaks zero mean, so the values
    // cannot be called consistent even though the system itself solves.
    CHECK(!vc.consistent);

    // After snapping to the solved plateaus the field passes in full.
    QuantizedSolution q = quantize_three(w.v, w.masks);
    VertexCheck snapped = lp_vertex_check(q.quantized, w.masks);
    CHECK(snapped.consistent);
    CHECK(snapped.beta_plus == q.beta_plus);
    CHECK(snapped.beta_minus == q.beta_minus);
}

TEST_CASE("vertex check accepts a quantized converged profile") {
    DomainMasks masks = rasterize(reference_block(), build_grid(16));
    SolverConfig cfg;
    cfg.tol = 1e-8;
    YieldSolution sol = solve(masks, ConstraintMode::SingleParticle, cfg);
    REQUIRE(sol.converged);

    QuantizedSolution q = quantize_three(sol.v, masks);
    VertexCheck vc = lp_vertex_check(q.quantized, masks, 0.02);
    CHECK(vc.consistent);
    CHECK(vc.beta_plus == doctest::Approx(q.beta_plus));
    CHECK(vc.beta_minus == doctest::Approx(q.beta_minus));
}

TEST_CASE("vertex check flags degenerate level sets") {
    WorkedInstance w = worked_instance();
    ScalarField zero(w.masks.grid);
    CHECK_THROWS_WITH_AS(lp_vertex_check(zero, w.masks), "level sets cannot satisfy constraints",
                         std::runtime_error);

    ScalarField wrong(build_grid(16));
    CHECK_THROWS_WITH_AS(lp_vertex_check(wrong, w.masks), "grid size mismatch",
                         std::invalid_argument);
}
