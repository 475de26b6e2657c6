#include "yieldcrit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace yieldcrit {

Grid build_grid(int n) {
    if (n < 8) throw std::invalid_argument("resolution too coarse");
    return Grid{n, 1.0 / n};
}

Shape make_rect(double cx, double cy, double w, double h, bool subtract) {
    Shape s;
    s.kind = Shape::Kind::Rect;
    s.subtract = subtract;
    s.cx = cx;
    s.cy = cy;
    s.w = w;
    s.h = h;
    return s;
}

Shape make_disk(double cx, double cy, double r, bool subtract) {
    Shape s;
    s.kind = Shape::Kind::Disk;
    s.subtract = subtract;
    s.cx = cx;
    s.cy = cy;
    s.r = r;
    return s;
}

Shape make_stencil(std::shared_ptr<const StencilData> data, double cx, double cy, double w,
                   double h, bool subtract) {
    Shape s;
    s.kind = Shape::Kind::Stencil;
    s.subtract = subtract;
    s.stencil = std::move(data);
    s.cx = cx;
    s.cy = cy;
    s.w = w;
    s.h = h;
    return s;
}

namespace {

struct CellRect {
    double x0, x1, y0, y1;
};

// Binary 4-neighborhood morphology on a stencil mask; outside the raster counts
// as empty.
std::vector<std::uint8_t> erode1(const std::vector<std::uint8_t>& m, int w, int h) {
    std::vector<std::uint8_t> out(m.size(), 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            std::size_t k = static_cast<std::size_t>(r) * w + c;
            if (!m[k]) continue;
            bool keep = c > 0 && m[k - 1] && c + 1 < w && m[k + 1] && r > 0 && m[k - w] &&
                        r + 1 < h && m[k + w];
            out[k] = keep ? 1 : 0;
        }
    return out;
}

std::vector<std::uint8_t> dilate1(const std::vector<std::uint8_t>& m, int w, int h) {
    std::vector<std::uint8_t> out(m.size(), 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            std::size_t k = static_cast<std::size_t>(r) * w + c;
            if (m[k] || (c > 0 && m[k - 1]) || (c + 1 < w && m[k + 1]) || (r > 0 && m[k - w]) ||
                (r + 1 < h && m[k + w]))
                out[k] = 1;
        }
    return out;
}

// One shape prepared for cell tests. For pixel stencils the h-morphology is
// replaced by one-pixel morphology on the source raster.
struct ShapeTest {
    const Shape* s = nullptr;
    std::vector<std::uint8_t> eroded;   // stencil only
    std::vector<std::uint8_t> dilated;  // stencil only

    // Pixel index range overlapping [x0,x1] x [y0,y1]; false if disjoint from
    // the placement rectangle.
    bool pixel_range(const CellRect& c, int& a0, int& a1, int& b0, int& b1) const {
        const StencilData& st = *s->stencil;
        double px0 = s->cx - s->w / 2, px1 = s->cx + s->w / 2;
        double py0 = s->cy - s->h / 2, py1 = s->cy + s->h / 2;
        if (c.x1 <= px0 || c.x0 >= px1 || c.y1 <= py0 || c.y0 >= py1) return false;
        double pw = s->w / st.width, ph = s->h / st.height;
        a0 = std::max(0, static_cast<int>(std::floor((c.x0 - px0) / pw)));
        a1 = std::min(st.width - 1, static_cast<int>(std::ceil((c.x1 - px0) / pw)) - 1);
        b0 = std::max(0, static_cast<int>(std::floor((py1 - c.y1) / ph)));
        b1 = std::min(st.height - 1, static_cast<int>(std::ceil((py1 - c.y0) / ph)) - 1);
        return a1 >= a0 && b1 >= b0;
    }

    // Closed cell square inside the shape region eroded by margin.
    bool cell_inside_eroded(const CellRect& c, double margin) const {
        switch (s->kind) {
            case Shape::Kind::Rect: {
                double x0 = s->cx - s->w / 2 + margin, x1 = s->cx + s->w / 2 - margin;
                double y0 = s->cy - s->h / 2 + margin, y1 = s->cy + s->h / 2 - margin;
                return c.x0 >= x0 && c.x1 <= x1 && c.y0 >= y0 && c.y1 <= y1;
            }
            case Shape::Kind::Disk: {
                double rr = s->r - margin;
                if (rr <= 0) return false;
                double dx = std::max(std::abs(c.x0 - s->cx), std::abs(c.x1 - s->cx));
                double dy = std::max(std::abs(c.y0 - s->cy), std::abs(c.y1 - s->cy));
                return dx * dx + dy * dy <= rr * rr;
            }
            case Shape::Kind::Stencil: {
                const StencilData& st = *s->stencil;
                double px0 = s->cx - s->w / 2, px1 = s->cx + s->w / 2;
                double py0 = s->cy - s->h / 2, py1 = s->cy + s->h / 2;
                if (c.x0 < px0 || c.x1 > px1 || c.y0 < py0 || c.y1 > py1) return false;
                int a0, a1, b0, b1;
                if (!pixel_range(c, a0, a1, b0, b1)) return false;
                for (int b = b0; b <= b1; ++b)
                    for (int a = a0; a <= a1; ++a)
                        if (!eroded[static_cast<std::size_t>(b) * st.width + a]) return false;
                return true;
            }
        }
        return false;
    }

    // Cell square at distance >= margin from the shape region.
    bool cell_clear_of(const CellRect& c, double margin) const {
        switch (s->kind) {
            case Shape::Kind::Rect: {
                double x0 = s->cx - s->w / 2, x1 = s->cx + s->w / 2;
                double y0 = s->cy - s->h / 2, y1 = s->cy + s->h / 2;
                double dx = std::max({0.0, x0 - c.x1, c.x0 - x1});
                double dy = std::max({0.0, y0 - c.y1, c.y0 - y1});
                return dx * dx + dy * dy >= margin * margin;
            }
            case Shape::Kind::Disk: {
                double dx = std::max({0.0, s->cx - c.x1, c.x0 - s->cx});
                double dy = std::max({0.0, s->cy - c.y1, c.y0 - s->cy});
                double d = std::sqrt(dx * dx + dy * dy) - s->r;
                return d >= margin;
            }
            case Shape::Kind::Stencil: {
                const StencilData& st = *s->stencil;
                int a0, a1, b0, b1;
                if (!pixel_range(c, a0, a1, b0, b1)) return true;
                for (int b = b0; b <= b1; ++b)
                    for (int a = a0; a <= a1; ++a)
                        if (dilated[static_cast<std::size_t>(b) * st.width + a]) return false;
                return true;
            }
        }
        return true;
    }
};

ShapeTest prepare(const Shape& s, std::uint8_t stencil_threshold) {
    ShapeTest t;
    t.s = &s;
    if (s.kind == Shape::Kind::Stencil) {
        if (!s.stencil || s.stencil->width <= 0 || s.stencil->height <= 0)
            throw std::invalid_argument("stencil shape has no raster data");
        const StencilData& st = *s.stencil;
        std::vector<std::uint8_t> mask(st.pixels.size());
        for (std::size_t k = 0; k < mask.size(); ++k)
            mask[k] = st.pixels[k] >= stencil_threshold ? 1 : 0;
        t.eroded = erode1(mask, st.width, st.height);
        t.dilated = dilate1(mask, st.width, st.height);
    }
    return t;
}

// Dilated cell disjoint from the region: clear of every positive shape, or
// buried inside a subtracted one.
bool outside_region(const std::vector<ShapeTest>& pos, const std::vector<ShapeTest>& neg,
                    const CellRect& c, double margin) {
    bool clear = true;
    for (const auto& t : pos)
        if (!t.cell_clear_of(c, margin)) {
            clear = false;
            break;
        }
    if (clear) return true;
    for (const auto& t : neg)
        if (t.cell_inside_eroded(c, margin)) return true;
    return false;
}

void check_unit_square(const Shape& s) {
    if (s.subtract) return;
    double x0, x1, y0, y1;
    if (s.kind == Shape::Kind::Disk) {
        x0 = s.cx - s.r;
        x1 = s.cx + s.r;
        y0 = s.cy - s.r;
        y1 = s.cy + s.r;
    } else {
        x0 = s.cx - s.w / 2;
        x1 = s.cx + s.w / 2;
        y0 = s.cy - s.h / 2;
        y1 = s.cy + s.h / 2;
    }
    if (!(x0 > 0.0 && y0 > 0.0 && x1 < 1.0 && y1 < 1.0))
        throw std::invalid_argument("shape not strictly inside the unit square");
}

}  // namespace

DomainMasks rasterize(const GeometrySpec& spec, const Grid& grid) {
    if (grid.n < 8) throw std::invalid_argument("resolution too coarse");
    if (spec.domain_shapes.empty()) throw std::invalid_argument("geometry has no domain shapes");
    if (spec.margin_cells < 1 || 2 * spec.margin_cells >= grid.n)
        throw std::invalid_argument("invalid margin width");
    for (const auto& s : spec.domain_shapes) check_unit_square(s);
    for (const auto& s : spec.solid_shapes) check_unit_square(s);

    std::vector<ShapeTest> dom_pos, dom_neg, sol_pos, sol_neg;
    for (const auto& s : spec.domain_shapes)
        (s.subtract ? dom_neg : dom_pos).push_back(prepare(s, 128));
    for (const auto& s : spec.solid_shapes)
        (s.subtract ? sol_neg : sol_pos).push_back(prepare(s, 192));
    if (sol_pos.empty()) throw std::runtime_error("component vanishes at this resolution");

    const int n = grid.n;
    const double h = grid.h;
    DomainMasks masks;
    masks.grid = grid;
    masks.cell.assign(grid.cells(), kExterior);

    // Inset classification; remember which positive solid shapes produced cells.
    std::vector<char> shape_hit(sol_pos.size(), 0);
    std::vector<char> solid(grid.cells(), 0);
    long fluid_count = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            CellRect c{i * h, (i + 1) * h, j * h, (j + 1) * h};
            std::size_t k = grid.idx(i, j);
            bool is_solid = false;
            for (std::size_t si = 0; si < sol_pos.size(); ++si)
                if (sol_pos[si].cell_inside_eroded(c, h)) {
                    is_solid = true;
                    shape_hit[si] = 1;
                }
            if (is_solid)
                for (const auto& t : sol_neg)
                    if (!t.cell_clear_of(c, h)) {
                        is_solid = false;
                        break;
                    }
            if (is_solid) {
                solid[k] = 1;
                masks.cell[k] = 0;  // labeled below
            } else if (!outside_region(dom_pos, dom_neg, c, h)) {
                masks.cell[k] = kFluid;
                ++fluid_count;
            }
        }
    for (std::size_t si = 0; si < sol_pos.size(); ++si)
        if (!shape_hit[si]) throw std::runtime_error("component vanishes at this resolution");

    // Margin ring must have stayed Exterior.
    const int m = spec.margin_cells;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            bool ring = i < m || j < m || i >= n - m || j >= n - m;
            if (ring && masks.cell[grid.idx(i, j)] != kExterior)
                throw std::runtime_error("domain touches grid margin");
        }

    // Label solid components, 4-connectivity, row-major discovery order.
    int next_id = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t k = grid.idx(i, j);
            if (!solid[k] || masks.cell[k] > 0) continue;
            ++next_id;
            long count = 0;
            std::queue<std::size_t> bfs;
            masks.cell[k] = next_id;
            bfs.push(k);
            while (!bfs.empty()) {
                std::size_t cur = bfs.front();
                bfs.pop();
                ++count;
                int ci = static_cast<int>(cur % n), cj = static_cast<int>(cur / n);
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int ni = ci + di[d], nj = cj + dj[d];
                    if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
                    std::size_t nk = grid.idx(ni, nj);
                    if (solid[nk] && masks.cell[nk] == 0) {
                        masks.cell[nk] = next_id;
                        bfs.push(nk);
                    }
                }
            }
            masks.component_cells.push_back(count);
            masks.component_areas.push_back(count * h * h);
        }
    if (next_id == 0) throw std::runtime_error("component vanishes at this resolution");

    // Adjacency checks under 8-connectivity.
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int id = masks.cell[grid.idx(i, j)];
            if (id <= 0) continue;
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
                    int nb = masks.cell[grid.idx(ni, nj)];
                    if (nb == kExterior)
                        throw std::runtime_error("particle touches boundary after rasterization");
                    if (nb > 0 && nb != id)
                        throw std::runtime_error("solid components touch after rasterization");
                }
        }

    for (double a : masks.component_areas) masks.solid_area += a;
    masks.fluid_area = fluid_count * h * h;
    return masks;
}

std::vector<ComponentInfo> label_components(const DomainMasks& masks) {
    std::vector<ComponentInfo> out(masks.n_components());
    for (int c = 0; c < masks.n_components(); ++c)
        out[c] = ComponentInfo{c + 1, masks.component_cells[c], masks.component_areas[c]};
    return out;
}

}  // namespace yieldcrit
