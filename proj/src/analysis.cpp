#include "yieldcrit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "yieldcrit/calculus.hpp"

namespace yieldcrit {

std::vector<HistogramBin> histogram(const ScalarField& v, int bins) {
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    double lo = v.v[0], hi = v.v[0];
    for (double x : v.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    std::vector<HistogramBin> out(bins);
    double width = (hi - lo) / bins;
    if (width <= 0) {
        // Constant field: everything in the first bin, centered on the value.
        for (int k = 0; k < bins; ++k) out[k].center = lo;
        out[0].count = static_cast<long>(v.grid.cells());
        return out;
    }
    for (int k = 0; k < bins; ++k) out[k].center = lo + (k + 0.5) * width;
    for (double x : v.v) {
        int k = static_cast<int>((x - lo) / width);
        if (k >= bins) k = bins - 1;
        if (k < 0) k = 0;
        ++out[k].count;
    }
    return out;
}

QuantizedSolution quantize_three(const ScalarField& v, const DomainMasks& masks, double eps_q) {
    if (v.grid.n != masks.grid.n) throw std::invalid_argument("grid size mismatch");
    if (eps_q <= 0 || eps_q >= 1) throw std::invalid_argument("threshold fraction out of range");
    const std::size_t cells = v.grid.cells();

    double vmax = 0.0;
    for (double x : v.v) vmax = std::max(vmax, std::abs(x));
    double thr = eps_q * vmax;

    QuantizedSolution out;
    out.positive_set.assign(cells, 0);
    out.negative_set.assign(cells, 0);
    long cp = 0, cm = 0, sp = 0, sm = 0, stotal = 0;
    for (std::size_t c = 0; c < cells; ++c) {
        bool solid = masks.cell[c] > 0;
        if (solid) ++stotal;
        if (vmax > 0 && v.v[c] > thr) {
            out.positive_set[c] = 1;
            ++cp;
            if (solid) ++sp;
        } else if (vmax > 0 && v.v[c] < -thr) {
            out.negative_set[c] = 1;
            ++cm;
            if (solid) ++sm;
        }
    }

    // Plateau values: means first, then the exact 2x2 solve of the zero-mean
    // and normalization rows (cell counts; h^2 cancels).
    double det = static_cast<double>(cp) * sm - static_cast<double>(cm) * sp;
    if (det == 0.0) throw std::runtime_error("quantization infeasible");
    out.beta_plus = -static_cast<double>(cm) * stotal / det;
    out.beta_minus = static_cast<double>(cp) * stotal / det;

    out.quantized = ScalarField(v.grid);
    for (std::size_t c = 0; c < cells; ++c)
        out.quantized.v[c] =
            out.positive_set[c] ? out.beta_plus : (out.negative_set[c] ? out.beta_minus : 0.0);
    out.tv_original = discrete_tv(v);
    out.tv_quantized = discrete_tv(out.quantized);
    return out;
}

std::vector<LevelSetComponent> level_set_components(const Grid& grid,
                                                    const std::vector<std::uint8_t>& member) {
    if (member.size() != grid.cells()) throw std::invalid_argument("cell set size mismatch");
    const int n = grid.n;
    std::vector<int> label(member.size(), 0);
    std::vector<LevelSetComponent> out;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t k = grid.idx(i, j);
            if (!member[k] || label[k]) continue;
            int id = static_cast<int>(out.size()) + 1;
            long count = 0;
            std::queue<std::size_t> bfs;
            label[k] = id;
            bfs.push(k);
            ScalarField indicator(grid);
            while (!bfs.empty()) {
                std::size_t cur = bfs.front();
                bfs.pop();
                ++count;
                indicator.v[cur] = 1.0;
                int ci = static_cast<int>(cur % n), cj = static_cast<int>(cur / n);
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int ni = ci + di[d], nj = cj + dj[d];
                    if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
                    std::size_t nk = grid.idx(ni, nj);
                    if (member[nk] && !label[nk]) {
                        label[nk] = id;
                        bfs.push(nk);
                    }
                }
            }
            out.push_back(LevelSetComponent{id, count, discrete_tv(indicator)});
        }
    return out;
}

}  // namespace yieldcrit
