#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "yieldcrit/analysis.hpp"
#include "yieldcrit/fields.hpp"
#include "yieldcrit/flow.hpp"
#include "yieldcrit/grid.hpp"
#include "yieldcrit/saddle.hpp"

namespace yieldcrit {

/// Parses the line-oriented geometry format:
///
///   # comment
///   version 1
///   margin 1
///   domain [add|sub] rect CX CY W H
///   domain [add|sub] disk CX CY R
///   domain [add|sub] stencil PATH CX CY W H
///   solid  [add|sub] rect|disk|stencil ...
///
/// Coordinates are unit-square; stencil paths resolve relative to base_dir.
GeometrySpec parse_geometry(std::istream& in, const std::string& base_dir);
GeometrySpec load_geometry(const std::string& path);
void write_geometry(const GeometrySpec& spec, std::ostream& out);

/// 8-bit PGM (P5 or P2) -> stencil raster.
StencilData read_pgm8(const std::string& path);

/// 16-bit big-endian P5, one pixel per cell, top row = j = n-1. Values map
/// affinely from [vmin, vmax] to [0, 65535]; the caller records the map.
void write_pgm16(const std::string& path, const ScalarField& v, double vmin, double vmax);
struct Pgm16 {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> pixels;
};
Pgm16 read_pgm16(const std::string& path);

/// Cell dump "i,j,class,value" with 17 significant digits; reading it back
/// reproduces the field bit-exactly.
void write_field_csv(const std::string& path, const DomainMasks& masks, const ScalarField& v);
ScalarField read_field_csv(const std::string& path);

struct RunConfig {
    std::string command;        // solve | sweep | scale | analyze
    std::string geometry_path;
    int n = 0;
    ConstraintMode mode = ConstraintMode::SingleParticle;
    SolverConfig solver;
    std::string out_dir = ".";
    bool emit_pgm = true;
    bool emit_csv = true;
    bool emit_report = true;
    std::vector<double> y_values; // absolute sweep points; empty = use fractions
    std::vector<double> y_fracs = {0.25, 0.5, 0.75, 0.9};
    int bins = 64;
    std::string field_path;     // analyze input
    PhysicalScales scales;
};

/// Drivers behind the CLI subcommands. Return a process exit code; failures
/// print one diagnostic line to err naming the offending input.
int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_scale(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace yieldcrit
