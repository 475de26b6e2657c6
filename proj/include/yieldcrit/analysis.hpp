#pragma once

#include <cstdint>
#include <vector>

#include "yieldcrit/fields.hpp"
#include "yieldcrit/grid.hpp"

namespace yieldcrit {

struct HistogramBin {
    double center = 0.0;
    long count = 0;
};

/// Uniform bins over [min v, max v]; counts sum to the cell count. A constant
/// field puts all mass in the first bin. bins must be at least 2.
std::vector<HistogramBin> histogram(const ScalarField& v, int bins);

struct QuantizedSolution {
    double beta_plus = 0.0;
    double beta_minus = 0.0;
    std::vector<std::uint8_t> positive_set; // 1 per cell in E+
    std::vector<std::uint8_t> negative_set; // 1 per cell in E-
    ScalarField quantized;
    double tv_original = 0.0;
    double tv_quantized = 0.0;
};

/// Collapses a converged profile onto three values. Cells above
/// eps_q * ||v||_inf go to E+, below the negative threshold to E-, the rest to
/// zero; the plateau values are then the exact solution of the 2x2 system
///   beta+ * |E+|        + beta- * |E-|        = 0          (zero mean)
///   beta+ * |E+ ∩ solid| + beta- * |E- ∩ solid| = |solid|   (normalization)
/// Throws std::runtime_error("quantization infeasible") when that system is
/// singular.  The default threshold fraction keeps a small particle's shallow
/// negative plateau, which can sit below 5 percent of the peak, out of the
/// zero band.
QuantizedSolution quantize_three(const ScalarField& v, const DomainMasks& masks,
                                 double eps_q = 0.02);

struct LevelSetComponent {
    int id = 0;
    long cells = 0;
    double boundary_length = 0.0; // discrete_tv of the component indicator
};

/// 4-connected components of a cell set (1 = member), labeled in row-major
/// discovery order.
std::vector<LevelSetComponent> level_set_components(const Grid& grid,
                                                    const std::vector<std::uint8_t>& member);

}  // namespace yieldcrit
