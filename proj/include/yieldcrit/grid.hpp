#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace yieldcrit {

/// Uniform lattice of n x n cells covering the unit square, spacing h = 1/n.
/// Cell (i, j) occupies [i*h, (i+1)*h] x [j*h, (j+1)*h]; i runs along x, j along y.
struct Grid {
    int n = 0;
    double h = 0.0;

    std::size_t cells() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * n + i; }
};

/// Throws std::invalid_argument("resolution too coarse") for n < 8.
Grid build_grid(int n);

/// Cell classification codes stored in DomainMasks::cell.
/// Solid cells carry their component id (1-based).
inline constexpr int kExterior = -1;
inline constexpr int kFluid = 0;

/// Tri-level raster imported from an 8-bit PGM: 255 = solid, 128 = fluid, 0 = exterior.
/// Row 0 is the top scanline.
struct StencilData {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
    std::string source_path;

    std::uint8_t at(int col, int row) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
};

struct Shape {
    enum class Kind { Rect, Disk, Stencil };

    Kind kind = Kind::Rect;
    bool subtract = false;     // signed composition: region = union(adds) \ union(subs)
    double cx = 0.0, cy = 0.0; // center, unit-square coordinates
    double w = 0.0, h = 0.0;   // rect extent / stencil placement extent
    double r = 0.0;            // disk radius
    std::shared_ptr<const StencilData> stencil;
};

Shape make_rect(double cx, double cy, double w, double h, bool subtract = false);
Shape make_disk(double cx, double cy, double r, bool subtract = false);
Shape make_stencil(std::shared_ptr<const StencilData> data, double cx, double cy, double w,
                   double h, bool subtract = false);

/// Continuum description of the flow domain and the rigid particles, in unit-square
/// coordinates. The domain region must sit strictly inside the unit square and every
/// solid shape strictly inside the domain (checked partly here, partly after
/// rasterization).
struct GeometrySpec {
    std::vector<Shape> domain_shapes;
    std::vector<Shape> solid_shapes;
    int margin_cells = 1;  // exterior ring enforced at the grid edge
};

/// Cell classification plus per-component bookkeeping produced by rasterize().
struct DomainMasks {
    Grid grid;
    std::vector<int> cell;               // kExterior, kFluid, or component id 1..N
    std::vector<long> component_cells;   // cell count per component
    std::vector<double> component_areas; // m_i = count * h^2
    double solid_area = 0.0;             // sum of m_i
    double fluid_area = 0.0;

    int n_components() const { return static_cast<int>(component_cells.size()); }
    int at(int i, int j) const { return cell[grid.idx(i, j)]; }
    bool is_solid(std::size_t c) const { return cell[c] > 0; }
};

/// Classifies every cell with the inset rule: a cell is Solid iff its closed square
/// lies inside the solid region eroded by h, Exterior iff it lies inside the
/// complement of the domain eroded by h, Fluid otherwise. Solid components are
/// labeled by 4-connectivity in row-major discovery order.
///
/// Throws std::runtime_error on degenerate input:
///   "component vanishes at this resolution"  - a solid shape rasterizes to no cells
///   "particle touches boundary after rasterization" - Solid 8-adjacent to Exterior
///   "solid components touch after rasterization" - two components 8-adjacent
///   "domain touches grid margin"              - non-Exterior cell in the margin ring
DomainMasks rasterize(const GeometrySpec& spec, const Grid& grid);

struct ComponentInfo {
    int id = 0;
    long cells = 0;
    double area = 0.0;
};

/// Re-derives the component table from the stored labels.
std::vector<ComponentInfo> label_components(const DomainMasks& masks);

}  // namespace yieldcrit
