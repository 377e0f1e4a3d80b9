#pragma once

#include <vector>

#include "tmag/hysteresis.hpp"
#include "tmag/rng.hpp"

namespace tmag {

// Everett surface tabulated on a uniform triangular (alpha, beta) grid with
// bilinear interpolation between nodes. The stored values are the total
// surface (irreversible plus reversible ramp), so chi_rev() is zero and the
// telescoping evaluation needs no separate linear term.
class TableModel final : public HysteresisModel {
public:
    // tri_values: row-major lower triangle, row p holding E(alpha_p, beta_q)
    // for q = 0..p, with alpha_p = -h_sat + p * step on an n-node axis.
    TableModel(double h_sat, int grid_n, std::vector<double> tri_values,
               double h_clip);

    // Samples any model's surface at the grid nodes (exact there).
    static TableModel from_model(const HysteresisModel& source, int grid_n);

    double everett(double alpha, double beta) const override;
    double h_sat() const override { return h_sat_; }
    double b_sat() const override { return b_sat_; }
    double chi_rev() const override { return 0.0; }
    double h_clip() const override { return h_clip_; }
    bool strict_bounds() const override { return strict_; }

    // Per-node multiplicative perturbation E -> E * (1 + eps), eps drawn
    // N(0, sigma^2) from `rng` in row-major node order. Models plant/model
    // mismatch; the result may violate the monotone-surface bounds and is
    // flagged non-strict.
    TableModel perturbed(Rng& rng, double sigma) const;

    int grid_n() const { return n_; }
    double node_coord(int idx) const { return -h_sat_ + idx * step_; }
    double node(int p, int q) const { return e_[tri_offset(p) + q]; }
    const std::vector<double>& values() const { return e_; }

private:
    static std::size_t tri_offset(int p) {
        return static_cast<std::size_t>(p) * (p + 1) / 2;
    }

    double h_sat_;
    int n_;
    double step_;
    double h_clip_;
    double b_sat_ = 0.0;
    bool strict_ = true;
    std::vector<double> e_;
};

} // namespace tmag
