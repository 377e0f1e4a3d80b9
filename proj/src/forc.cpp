#include "tmag/forc.hpp"

#include <algorithm>
#include <cmath>

#include "tmag/csv.hpp"

namespace tmag {

void ForcTable::validate() const {
    if (curves.empty()) throw ValidationError("FORC table is empty");
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& cv = curves[c];
        if (cv.h.size() != cv.b.size() || cv.h.empty())
            throw ValidationError("FORC curve " + std::to_string(c) + " is malformed");
        if (cv.h.front() < cv.h_reversal - 1e-9 * std::abs(cv.h_reversal) - 1e-6)
            throw ValidationError("FORC curve " + std::to_string(c) +
                                  " starts below its reversal field");
        for (std::size_t i = 1; i < cv.h.size(); ++i)
            if (!(cv.h[i] > cv.h[i - 1]))
                throw ValidationError("FORC curve " + std::to_string(c) +
                                      " field samples are not strictly increasing");
        if (c > 0 && !(cv.h_reversal > curves[c - 1].h_reversal))
            throw ValidationError("FORC reversal fields are not strictly increasing");
    }
}

double ForcTable::min_reversal() const { return curves.front().h_reversal; }
double ForcTable::max_reversal() const { return curves.back().h_reversal; }

ForcTable sample_forc(const HysteresisModel& model, int n_curves, int n_points) {
    if (n_curves < 2 || n_points < 2)
        throw ValidationError("FORC sampling needs at least 2 curves and 2 points");
    const double hs = model.h_sat();
    ForcTable table;
    table.curves.reserve(n_curves);
    for (int c = 0; c < n_curves; ++c) {
        ForcCurve curve;
        curve.h_reversal = -hs + 2.0 * hs * c / (n_curves - 1);
        MagnetState state = MagnetState::saturated(model, +1);
        state.apply_field(curve.h_reversal);
        const double lo = curve.h_reversal;
        for (int i = 0; i < n_points; ++i) {
            const double h = lo + (hs - lo) * i / (n_points - 1);
            if (!curve.h.empty() && h <= curve.h.back()) continue; // degenerate top curve
            state.apply_field(h);
            curve.h.push_back(h);
            curve.b.push_back(state.b());
        }
        if (curve.h.empty()) { // reversal exactly at +h_sat
            curve.h.push_back(hs);
            curve.b.push_back(model.b_sat());
        }
        table.curves.push_back(std::move(curve));
    }
    table.validate();
    return table;
}

namespace {

// Piecewise-linear read of one curve, clamped flat outside its samples.
double curve_at(const ForcCurve& c, double h) {
    if (h <= c.h.front()) return c.b.front();
    if (h >= c.h.back()) return c.b.back();
    const auto it = std::upper_bound(c.h.begin(), c.h.end(), h);
    const std::size_t i = static_cast<std::size_t>(it - c.h.begin());
    const double t = (h - c.h[i - 1]) / (c.h[i] - c.h[i - 1]);
    return c.b[i - 1] + t * (c.b[i] - c.b[i - 1]);
}

std::size_t tri_offset(int p) { return static_cast<std::size_t>(p) * (p + 1) / 2; }

} // namespace

IdentifiedModel identify_from_forc(const ForcTable& table, int grid_n) {
    table.validate();
    if (grid_n < 11) throw ValidationError("identification grid must have >= 11 nodes");
    if (table.curves.size() < 2)
        throw IdentificationError("cannot build an Everett surface from a single "
                                  "reversal curve");
    if (table.curves.size() < 20)
        throw IdentificationError("insufficient coverage: " +
                                  std::to_string(table.curves.size()) +
                                  " reversal curves, need at least 20 spanning "
                                  "[-h_sat, h_sat]");

    // The field range of the surface is taken from the data itself.
    const double hs = std::max(std::abs(table.min_reversal()),
                               std::abs(table.curves.back().h.back()));
    const double step = 2.0 * hs / (grid_n - 1);
    if (table.min_reversal() > -hs + 1e-9 * hs)
        throw IdentificationError("coverage gap: most negative reversal field is " +
                                  std::to_string(table.min_reversal()) +
                                  " A/m, grid needs " + std::to_string(-hs) + " A/m");
    for (const auto& cv : table.curves)
        if (cv.h.back() < hs - 0.01 * hs)
            throw IdentificationError("coverage gap: curve at reversal " +
                                      std::to_string(cv.h_reversal) +
                                      " A/m stops at " + std::to_string(cv.h.back()) +
                                      " A/m before the saturation field");

    std::vector<double> values(tri_offset(grid_n - 1) + grid_n, 0.0);
    long clipped = 0, total = 0;

    for (int q = 0; q < grid_n - 1; ++q) {
        const double beta = -hs + q * step;
        // Bracketing curves for this reversal field.
        auto hi = std::lower_bound(table.curves.begin(), table.curves.end(), beta,
                                   [](const ForcCurve& c, double v) {
                                       return c.h_reversal < v;
                                   });
        if (hi == table.curves.end()) {
            if (beta > table.max_reversal() + 1e-9 * hs)
                throw IdentificationError("coverage gap above reversal field " +
                                          std::to_string(table.max_reversal()) + " A/m");
            hi = table.curves.end() - 1;
        }
        const ForcCurve& c1 = *hi;
        const ForcCurve& c0 = hi == table.curves.begin() ? *hi : *(hi - 1);
        const double r0 = c0.h_reversal, r1 = c1.h_reversal;
        const double t = r1 > r0 ? std::clamp((beta - r0) / (r1 - r0), 0.0, 1.0) : 0.0;

        auto b_row = [&](double alpha) {
            // The upper curve only exists for fields above its own reversal;
            // clamping both arguments makes its contribution vanish there.
            const double a1 = std::max(alpha, r1), b1 = std::max(beta, r1);
            return t * (curve_at(c1, a1) - curve_at(c1, b1)) +
                   (1.0 - t) * (curve_at(c0, alpha) - curve_at(c0, beta));
        };

        // Clipped cumulative differences keep E nondecreasing along alpha.
        double prev_raw = 0.0; // E(beta, beta) = 0 by definition
        double acc = 0.0;
        for (int p = q + 1; p < grid_n; ++p) {
            const double raw = b_row(-hs + p * step);
            const double inc = raw - prev_raw;
            ++total;
            if (inc < 0.0)
                ++clipped;
            else
                acc += inc;
            prev_raw = raw;
            values[tri_offset(p) + q] = acc;
        }
    }

    // Running minimum along beta restores the nonincreasing direction without
    // breaking the alpha monotonicity just enforced.
    for (int p = 1; p < grid_n; ++p) {
        for (int q = 1; q <= p; ++q) {
            double& v = values[tri_offset(p) + q];
            const double left = values[tri_offset(p) + q - 1];
            ++total;
            if (v > left) {
                v = left;
                ++clipped;
            }
        }
    }

    IdentifiedModel out{TableModel(hs, grid_n, std::move(values), 10.0 * hs),
                        total > 0 ? static_cast<double>(clipped) / total : 0.0};
    return out;
}

ForcTable load_forc_csv(const std::string& path) {
    const CsvDoc doc = read_csv(path, {"h_reversal", "h", "b"});
    ForcTable table;
    for (const auto& row : doc.rows) {
        if (table.curves.empty() || row[0] != table.curves.back().h_reversal) {
            table.curves.push_back(ForcCurve{row[0], {}, {}});
        }
        table.curves.back().h.push_back(row[1]);
        table.curves.back().b.push_back(row[2]);
    }
    table.validate();
    return table;
}

void save_forc_csv(const ForcTable& table, const std::string& path,
                   const std::string& meta_line) {
    CsvWriter w(path, meta_line, {"h_reversal", "h", "b"});
    for (const auto& cv : table.curves)
        for (std::size_t i = 0; i < cv.h.size(); ++i)
            w.row({cv.h_reversal, cv.h[i], cv.b[i]});
}

} // namespace tmag
