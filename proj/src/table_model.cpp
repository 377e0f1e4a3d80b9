#include "tmag/table_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tmag {

TableModel::TableModel(double h_sat, int grid_n, std::vector<double> tri_values,
                       double h_clip)
    : h_sat_(h_sat), n_(grid_n), step_(2.0 * h_sat / (grid_n - 1)),
      h_clip_(h_clip), e_(std::move(tri_values)) {
    if (grid_n < 11) throw ValidationError("table grid needs at least 11 nodes");
    if (!(h_sat > 0) || h_clip < h_sat)
        throw ValidationError("table model field limits are inconsistent");
    if (e_.size() != tri_offset(n_ - 1) + static_cast<std::size_t>(n_))
        throw ValidationError("table value count does not match the triangular grid");
    for (int p = 0; p < n_; ++p) {
        if (e_[tri_offset(p) + p] != 0.0)
            throw ValidationError("Everett diagonal must be exactly zero");
    }
    b_sat_ = 0.5 * node(n_ - 1, 0);
}

TableModel TableModel::from_model(const HysteresisModel& source, int grid_n) {
    const double hs = source.h_sat();
    const double step = 2.0 * hs / (grid_n - 1);
    std::vector<double> values(tri_offset(grid_n - 1) + grid_n);
#pragma omp parallel for schedule(dynamic, 8)
    for (int p = 0; p < grid_n; ++p) {
        const double alpha = -hs + p * step;
        for (int q = 0; q <= p; ++q) {
            const double beta = -hs + q * step;
            const double irr = source.everett(alpha, beta);
            values[tri_offset(p) + q] =
                p == q ? 0.0 : irr + source.chi_rev() * (alpha - beta);
        }
    }
    return TableModel(hs, grid_n, std::move(values), source.h_clip());
}

TableModel TableModel::perturbed(Rng& rng, double sigma) const {
    TableModel out = *this;
    for (double& v : out.e_) v *= 1.0 + rng.gaussian(0.0, sigma);
    out.strict_ = false;
    out.b_sat_ = 0.5 * out.node(n_ - 1, 0);
    return out;
}

double TableModel::everett(double alpha, double beta) const {
    alpha = std::clamp(alpha, -h_sat_, h_sat_);
    beta = std::clamp(beta, -h_sat_, h_sat_);
    if (alpha <= beta) return 0.0;

    int p0 = static_cast<int>(std::floor((alpha + h_sat_) / step_));
    int q0 = static_cast<int>(std::floor((beta + h_sat_) / step_));
    p0 = std::clamp(p0, 0, n_ - 2);
    q0 = std::clamp(q0, 0, n_ - 2);
    if (q0 > p0) q0 = p0;
    const double xi = std::clamp((alpha - node_coord(p0)) / step_, 0.0, 1.0);
    const double eta = std::clamp((beta - node_coord(q0)) / step_, 0.0, 1.0);

    if (q0 == p0) {
        // Cell straddling the diagonal: affine on the triangle with vertices
        // (p,p), (p+1,p), (p+1,p+1); vanishes on the diagonal itself.
        return std::max(0.0, node(p0 + 1, q0) * (xi - eta));
    }
    const double v00 = node(p0, q0), v10 = node(p0 + 1, q0);
    const double v01 = node(p0, q0 + 1), v11 = node(p0 + 1, q0 + 1);
    return (1 - xi) * (1 - eta) * v00 + xi * (1 - eta) * v10 +
           (1 - xi) * eta * v01 + xi * eta * v11;
}

} // namespace tmag
