#include "yieldcrit/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace yieldcrit {

namespace {

// All floating-point output funnels through here; 17 significant digits make
// the decimal text round-trip to the same double.
std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Next whitespace-delimited token of a PNM header, skipping '#' comments. The
// delimiter after the token is left unconsumed.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
        tok.push_back(static_cast<char>(in.get()));
    return tok;
}

long pnm_int(std::istream& in, const std::string& path) {
    const std::string tok = pnm_token(in);
    try {
        std::size_t used = 0;
        long value = std::stol(tok, &used);
        if (used != tok.size() || value < 0) throw std::invalid_argument(tok);
        return value;
    } catch (const std::exception&) {
        throw std::runtime_error("invalid raster header in " + path);
    }
}

}  // namespace

StencilData read_pgm8(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open stencil: " + path);
    const std::string magic = pnm_token(in);
    if (magic != "P5" && magic != "P2") throw std::runtime_error("unsupported stencil format in " + path);
    const long w = pnm_int(in, path);
    const long h = pnm_int(in, path);
    const long maxval = pnm_int(in, path);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255)
        throw std::runtime_error("invalid raster header in " + path);

    StencilData data;
    data.width = static_cast<int>(w);
    data.height = static_cast<int>(h);
    data.source_path = path;
    data.pixels.resize(static_cast<std::size_t>(w) * h);
    if (magic == "P5") {
        in.get();  // single delimiter byte between header and raster
        in.read(reinterpret_cast<char*>(data.pixels.data()),
                static_cast<std::streamsize>(data.pixels.size()));
        if (in.gcount() != static_cast<std::streamsize>(data.pixels.size()))
            throw std::runtime_error("truncated raster in " + path);
    } else {
        for (auto& px : data.pixels) {
            const long value = pnm_int(in, path);
            if (value > maxval) throw std::runtime_error("invalid raster sample in " + path);
            px = static_cast<std::uint8_t>(value);
        }
    }
    if (maxval != 255)
        for (auto& px : data.pixels)
            px = static_cast<std::uint8_t>(std::lround(px * 255.0 / maxval));
    return data;
}

void write_pgm16(const std::string& path, const ScalarField& v, double vmin, double vmax) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    const int n = v.grid.n;
    out << "P5\n" << n << " " << n << "\n65535\n";
    const double span = vmax - vmin;
    std::vector<unsigned char> row(2 * static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        const int j = n - 1 - r;  // top scanline is the top of the grid
        for (int i = 0; i < n; ++i) {
            const double t = span > 0 ? std::clamp((v.at(i, j) - vmin) / span, 0.0, 1.0) : 0.0;
            const long pix = std::lround(t * 65535.0);
            row[2 * static_cast<std::size_t>(i)] = static_cast<unsigned char>((pix >> 8) & 0xff);
            row[2 * static_cast<std::size_t>(i) + 1] = static_cast<unsigned char>(pix & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("cannot write file: " + path);
}

Pgm16 read_pgm16(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open raster: " + path);
    if (pnm_token(in) != "P5") throw std::runtime_error("invalid raster header in " + path);
    Pgm16 out;
    out.width = static_cast<int>(pnm_int(in, path));
    out.height = static_cast<int>(pnm_int(in, path));
    const long maxval = pnm_int(in, path);
    if (out.width < 1 || out.height < 1 || maxval != 65535)
        throw std::runtime_error("invalid raster header in " + path);
    in.get();
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height);
    std::vector<unsigned char> raw(2 * out.pixels.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw std::runtime_error("truncated raster in " + path);
    for (std::size_t k = 0; k < out.pixels.size(); ++k)
        out.pixels[k] = static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1]);
    return out;
}

GeometrySpec parse_geometry(std::istream& in, const std::string& base_dir) {
    GeometrySpec spec;
    bool have_version = false;
    std::string line;
    int lineno = 0;
    auto fail = [&lineno](const std::string& what) {
        throw std::runtime_error("geometry parse error at line " + std::to_string(lineno) + ": " +
                                 what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "version") {
            int ver = 0;
            if (!(ls >> ver)) fail("missing version number");
            if (ver != 1) fail("unsupported version " + std::to_string(ver));
            have_version = true;
        } else if (tok == "margin") {
            int m = 0;
            if (!(ls >> m) || m < 1) fail("margin must be a positive integer");
            spec.margin_cells = m;
        } else if (tok == "domain" || tok == "solid") {
            if (!have_version) fail("version line must come first");
            std::string word;
            if (!(ls >> word)) fail("missing shape");
            bool subtract = false;
            if (word == "add" || word == "sub") {
                subtract = word == "sub";
                if (!(ls >> word)) fail("missing shape");
            }
            Shape shape;
            if (word == "rect") {
                double cx, cy, w, h;
                if (!(ls >> cx >> cy >> w >> h)) fail("rect needs CX CY W H");
                shape = make_rect(cx, cy, w, h, subtract);
            } else if (word == "disk") {
                double cx, cy, r;
                if (!(ls >> cx >> cy >> r)) fail("disk needs CX CY R");
                shape = make_disk(cx, cy, r, subtract);
            } else if (word == "stencil") {
                std::string p;
                double cx, cy, w, h;
                if (!(ls >> p >> cx >> cy >> w >> h)) fail("stencil needs PATH CX CY W H");
                std::filesystem::path full(p);
                if (full.is_relative() && !base_dir.empty())
                    full = std::filesystem::path(base_dir) / full;
                auto data = std::make_shared<StencilData>(read_pgm8(full.string()));
                shape = make_stencil(std::move(data), cx, cy, w, h, subtract);
            } else {
                fail("unknown shape '" + word + "'");
            }
            std::string extra;
            if (ls >> extra) fail("trailing tokens after shape");
            (tok == "domain" ? spec.domain_shapes : spec.solid_shapes).push_back(std::move(shape));
        } else {
            fail("unknown directive '" + tok + "'");
        }
    }
    if (!have_version) throw std::runtime_error("geometry parse error: missing version line");
    return spec;
}

GeometrySpec load_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open geometry file: " + path);
    return parse_geometry(in, std::filesystem::path(path).parent_path().string());
}

void write_geometry(const GeometrySpec& spec, std::ostream& out) {
    out << "version 1\n";
    out << "margin " << spec.margin_cells << "\n";
    auto emit = [&out](const char* which, const Shape& s) {
        out << which << ' ' << (s.subtract ? "sub" : "add") << ' ';
        switch (s.kind) {
            case Shape::Kind::Rect:
                out << "rect " << fmt(s.cx) << ' ' << fmt(s.cy) << ' ' << fmt(s.w) << ' '
                    << fmt(s.h);
                break;
            case Shape::Kind::Disk:
                out << "disk " << fmt(s.cx) << ' ' << fmt(s.cy) << ' ' << fmt(s.r);
                break;
            case Shape::Kind::Stencil:
                out << "stencil " << (s.stencil ? s.stencil->source_path : "?") << ' ' << fmt(s.cx)
                    << ' ' << fmt(s.cy) << ' ' << fmt(s.w) << ' ' << fmt(s.h);
                break;
        }
        out << '\n';
    };
    for (const Shape& s : spec.domain_shapes) emit("domain", s);
    for (const Shape& s : spec.solid_shapes) emit("solid", s);
}

void write_field_csv(const std::string& path, const DomainMasks& masks, const ScalarField& v) {
    if (masks.grid.n != v.grid.n) throw std::invalid_argument("grid size mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "i,j,class,value\n";
    const int n = v.grid.n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out << i << ',' << j << ',' << masks.at(i, j) << ',' << fmt(v.at(i, j)) << '\n';
    if (!out) throw std::runtime_error("cannot write file: " + path);
}

namespace {

// Shared CSV reader; the class column carries enough to rebuild the masks,
// which lets the analyze pass run without the original geometry file.
void read_field_csv_into(const std::string& path, ScalarField& field, DomainMasks* masks_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field dump: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "i,j,class,value")
        throw std::runtime_error("invalid field dump header in " + path);

    struct Row {
        int i, j, cls;
        double value;
    };
    std::vector<Row> rows;
    int maxidx = -1;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Row r;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%lf", &r.i, &r.j, &r.cls, &r.value) != 4 ||
            r.i < 0 || r.j < 0)
            throw std::runtime_error("invalid field dump row at line " + std::to_string(lineno) +
                                     " in " + path);
        maxidx = std::max({maxidx, r.i, r.j});
        rows.push_back(r);
    }
    const int n = maxidx + 1;
    if (n < 8 || rows.size() != static_cast<std::size_t>(n) * n)
        throw std::runtime_error("field dump is not a full square grid: " + path);

    const Grid grid = build_grid(n);
    field = ScalarField(grid);
    std::vector<int> cls(grid.cells(), kExterior);
    std::vector<char> seen(grid.cells(), 0);
    for (const Row& r : rows) {
        const std::size_t c = grid.idx(r.i, r.j);
        if (seen[c]) throw std::runtime_error("duplicate cell in field dump: " + path);
        seen[c] = 1;
        field.v[c] = r.value;
        cls[c] = r.cls;
    }

    if (!masks_out) return;
    int ncomp = 0;
    for (int x : cls) {
        if (x < kExterior) throw std::runtime_error("invalid class label in field dump: " + path);
        ncomp = std::max(ncomp, x);
    }
    masks_out->grid = grid;
    masks_out->cell = std::move(cls);
    masks_out->component_cells.assign(ncomp, 0);
    long fluid = 0;
    for (int x : masks_out->cell) {
        if (x > 0)
            ++masks_out->component_cells[x - 1];
        else if (x == kFluid)
            ++fluid;
    }
    masks_out->component_areas.resize(ncomp);
    masks_out->solid_area = 0.0;
    for (int k = 0; k < ncomp; ++k) {
        if (masks_out->component_cells[k] == 0)
            throw std::runtime_error("invalid class label in field dump: " + path);
        masks_out->component_areas[k] = masks_out->component_cells[k] * grid.h * grid.h;
        masks_out->solid_area += masks_out->component_areas[k];
    }
    masks_out->fluid_area = fluid * grid.h * grid.h;
}

}  // namespace

ScalarField read_field_csv(const std::string& path) {
    ScalarField field;
    read_field_csv_into(path, field, nullptr);
    return field;
}

namespace {

std::filesystem::path prep_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    return dir;
}

const char* mode_name(ConstraintMode mode) {
    return mode == ConstraintMode::SingleParticle ? "single" : "multi";
}

void field_range(const ScalarField& v, double& lo, double& hi) {
    lo = v.v[0];
    hi = v.v[0];
    for (double x : v.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
}

void write_level_table(std::ostream& os, const char* title, const Grid& grid,
                       const std::vector<std::uint8_t>& member) {
    os << title << " level sets\n";
    os << "id cells boundary_length\n";
    for (const LevelSetComponent& c : level_set_components(grid, member))
        os << c.id << ' ' << c.cells << ' ' << fmt(c.boundary_length) << '\n';
}

void write_quantization_table(std::ostream& os, const QuantizedSolution& q) {
    os << "quantization table\n";
    os << "beta_plus " << fmt(q.beta_plus) << '\n';
    os << "beta_minus " << fmt(q.beta_minus) << '\n';
    os << "tv_original " << fmt(q.tv_original) << '\n';
    os << "tv_quantized " << fmt(q.tv_quantized) << '\n';
    os << "tv_ratio " << fmt(q.tv_quantized / q.tv_original) << '\n';
}

std::ofstream open_text(const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write file: " + p.string());
    return os;
}

void finish_text(std::ofstream& os, const std::filesystem::path& p) {
    os.flush();
    if (!os) throw std::runtime_error("cannot write file: " + p.string());
}

}  // namespace

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const GeometrySpec spec = load_geometry(cfg.geometry_path);
        const Grid grid = build_grid(cfg.n);
        const DomainMasks masks = rasterize(spec, grid);
        const YieldSolution sol = solve(masks, cfg.mode, cfg.solver);
        const QuantizedSolution q = quantize_three(sol.v, masks);
        double lo, hi;
        field_range(sol.v, lo, hi);

        const auto dir = prep_out_dir(cfg);
        if (cfg.emit_pgm) write_pgm16((dir / "field.pgm").string(), sol.v, lo, hi);
        if (cfg.emit_csv) write_field_csv((dir / "field.csv").string(), masks, sol.v);
        if (cfg.emit_report) {
            const auto rp = dir / "solve_report.txt";
            std::ofstream rep = open_text(rp);
            rep << "solve report\n";
            rep << "schema 1\n";
            rep << "geometry " << cfg.geometry_path << '\n';
            rep << "n " << grid.n << '\n';
            rep << "mode " << mode_name(cfg.mode) << '\n';
            rep << "components " << masks.n_components() << '\n';
            for (int k = 0; k < masks.n_components(); ++k)
                rep << "component " << k + 1 << " cells " << masks.component_cells[k] << " area "
                    << fmt(masks.component_areas[k]) << '\n';
            rep << "solid_area " << fmt(masks.solid_area) << '\n';
            rep << "fluid_area " << fmt(masks.fluid_area) << '\n';
            rep << "converged " << (sol.converged ? "yes" : "no") << '\n';
            rep << "iterations " << sol.iters << '\n';
            rep << "tv " << fmt(sol.tv) << '\n';
            rep << "Y_c = " << fmt(sol.yc) << '\n';
            double mean_res = 0.0, norm_res = 0.0, rel = 0.0;
            if (!sol.telemetry.empty()) {
                const TelemetryRecord& t = sol.telemetry.back();
                mean_res = t.mean;
                norm_res = t.normalization_residual;
                rel = t.rel_change;
            }
            rep << "residual_mean " << fmt(mean_res) << '\n';
            rep << "residual_normalization " << fmt(norm_res) << '\n';
            rep << "rel_change " << fmt(rel) << '\n';
            rep << "pgm_map vmin " << fmt(lo) << " vmax " << fmt(hi) << " maxpix 65535\n";
            write_quantization_table(rep, q);
            write_level_table(rep, "positive", grid, q.positive_set);
            write_level_table(rep, "negative", grid, q.negative_set);
            finish_text(rep, rp);
        }
        out << "Y_c = " << fmt(sol.yc) << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "yieldcrit: " << e.what() << '\n';
        return 1;
    }
}

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const GeometrySpec spec = load_geometry(cfg.geometry_path);
        const Grid grid = build_grid(cfg.n);
        const DomainMasks masks = rasterize(spec, grid);
        const SweepResult sw = cfg.y_values.empty()
                                   ? sweep_fractions(masks, cfg.y_fracs, cfg.solver)
                                   : sweep_to_critical(masks, cfg.y_values, cfg.solver);

        const auto dir = prep_out_dir(cfg);
        const auto tablep = dir / "sweep.csv";
        std::ofstream table = open_text(tablep);
        table << "Y,tv,dirichlet,drive,rate_bound_ok\n";
        for (const SweepRow& row : sw.rows)
            table << fmt(row.Y) << ',' << fmt(row.tv) << ',' << fmt(row.dirichlet) << ','
                  << fmt(row.drive) << ',' << (row.rate_bound_ok ? 1 : 0) << '\n';
        finish_text(table, tablep);

        double llo, lhi;
        field_range(sw.v_limit, llo, lhi);
        if (cfg.emit_pgm) write_pgm16((dir / "limit.pgm").string(), sw.v_limit, llo, lhi);
        if (cfg.emit_csv) write_field_csv((dir / "limit.csv").string(), masks, sw.v_limit);

        std::vector<std::string> profile_lines;
        for (std::size_t k = 0; k < sw.rows.size(); ++k) {
            std::ostringstream pl;
            pl << "profile " << k << " Y " << fmt(sw.rows[k].Y);
            if (sw.profiles[k]) {
                double plo, phi;
                field_range(*sw.profiles[k], plo, phi);
                const std::string name = "profile_" + std::to_string(k) + ".pgm";
                if (cfg.emit_pgm) write_pgm16((dir / name).string(), *sw.profiles[k], plo, phi);
                pl << " file " << name << " vmin " << fmt(plo) << " vmax " << fmt(phi);
            } else {
                pl << " stopped";
            }
            profile_lines.push_back(pl.str());
        }

        if (cfg.emit_report) {
            const auto rp = dir / "sweep_report.txt";
            std::ofstream rep = open_text(rp);
            rep << "sweep report\n";
            rep << "schema 1\n";
            rep << "geometry " << cfg.geometry_path << '\n';
            rep << "n " << grid.n << '\n';
            rep << "rows " << sw.rows.size() << '\n';
            rep << "Y_c = " << fmt(sw.yc) << '\n';
            rep << "limit_map vmin " << fmt(llo) << " vmax " << fmt(lhi) << " maxpix 65535\n";
            rep << "table Y tv dirichlet drive rate_bound_ok\n";
            for (const SweepRow& row : sw.rows)
                rep << fmt(row.Y) << ' ' << fmt(row.tv) << ' ' << fmt(row.dirichlet) << ' '
                    << fmt(row.drive) << ' ' << (row.rate_bound_ok ? 1 : 0) << '\n';
            for (const std::string& pl : profile_lines) rep << pl << '\n';
            finish_text(rep, rp);
        }
        out << "Y_c = " << fmt(sw.yc) << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "yieldcrit: " << e.what() << '\n';
        return 1;
    }
}

int run_scale(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        const Buoyancy b = buoyancy_number(cfg.scales);
        out << "Y = " << fmt(b.Y) << '\n';
        out << "omega0 = " << fmt(b.omega0) << '\n';
        if (!cfg.geometry_path.empty()) {
            const GeometrySpec spec = load_geometry(cfg.geometry_path);
            const Grid grid = build_grid(cfg.n);
            const DomainMasks masks = rasterize(spec, grid);
            const YieldSolution sol = solve(masks, cfg.mode, cfg.solver);
            out << "Y_c = " << fmt(sol.yc) << '\n';
            if (b.Y >= sol.yc)
                out << "SETTLED\n";
            else
                out << "FLOWING (margin = " << fmt(sol.yc - b.Y) << ")\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "yieldcrit: " << e.what() << '\n';
        return 1;
    }
}

int run_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.field_path.empty()) throw std::invalid_argument("no field input");
        ScalarField v;
        DomainMasks masks;
        read_field_csv_into(cfg.field_path, v, &masks);
        const std::vector<HistogramBin> hist = histogram(v, cfg.bins);
        const QuantizedSolution q = quantize_three(v, masks);

        const auto dir = prep_out_dir(cfg);
        if (cfg.emit_csv) {
            const auto hp = dir / "histogram.csv";
            std::ofstream hcsv = open_text(hp);
            hcsv << "center,count\n";
            for (const HistogramBin& b : hist) hcsv << fmt(b.center) << ',' << b.count << '\n';
            finish_text(hcsv, hp);
        }
        if (cfg.emit_report) {
            const auto rp = dir / "analyze_report.txt";
            std::ofstream rep = open_text(rp);
            rep << "analyze report\n";
            rep << "schema 1\n";
            rep << "field " << cfg.field_path << '\n';
            rep << "n " << v.grid.n << '\n';
            rep << "bins " << cfg.bins << '\n';
            write_quantization_table(rep, q);
            write_level_table(rep, "positive", v.grid, q.positive_set);
            write_level_table(rep, "negative", v.grid, q.negative_set);
            finish_text(rep, rp);
        }
        out << "beta_plus = " << fmt(q.beta_plus) << '\n';
        out << "beta_minus = " << fmt(q.beta_minus) << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "yieldcrit: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace yieldcrit
