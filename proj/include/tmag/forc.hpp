#pragma once

#include <string>
#include <vector>

#include "tmag/hysteresis.hpp"
#include "tmag/table_model.hpp"

namespace tmag {

// One first-order reversal curve: saturate positive, descend to h_reversal,
// then sweep the field back upward recording b(h).
struct ForcCurve {
    double h_reversal = 0.0;
    std::vector<double> h; // strictly increasing, A/m
    std::vector<double> b; // T
};

struct ForcTable {
    std::vector<ForcCurve> curves; // strictly increasing h_reversal

    void validate() const;
    double min_reversal() const;
    double max_reversal() const;
};

// Measurement protocol applied to a model: n_curves reversal fields spanning
// [-h_sat, +h_sat], n_points samples per sweep back to saturation.
ForcTable sample_forc(const HysteresisModel& model, int n_curves, int n_points);

ForcTable load_forc_csv(const std::string& path);
void save_forc_csv(const ForcTable& table, const std::string& path,
                   const std::string& meta_line);

struct IdentifiedModel {
    TableModel model;
    // Fraction of finite-difference increments clipped to keep the surface
    // monotone; zero for noise-free data.
    double clip_fraction = 0.0;
};

// Everett construction by differencing the reversal curves against the
// descending branch on a grid_n-node triangular grid.
IdentifiedModel identify_from_forc(const ForcTable& table, int grid_n);

} // namespace tmag
