#include "tmag/actuator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "tmag/csv.hpp"

namespace tmag {

void TmaGeometry::validate() const {
    if (!(a_gap > 0) || !(g0 > 0) || !(l_m > 0) || !(a_m > 0))
        throw ValidationError("actuator lengths and areas must be positive");
    if (!(mu_rec >= 1.0) || !(mu_rec <= 20.0))
        throw ValidationError("recoil permeability must lie in [1, 20]");
    if (n_gaps < 1) throw ValidationError("n_gaps must be at least 1");
}

void HtmaGeometry::validate() const {
    TmaGeometry::validate();
    if (!(b_r_bias > 0) || !(l_bias > 0) || !(a_bias > 0))
        throw ValidationError("bias magnet parameters must be positive");
    if (!(x_range > 0) || !(x_range < g0))
        throw ValidationError("x_range must be positive and below the gap length");
}

namespace {

void check_gap_open(double g0, double x) {
    if (!(std::abs(x) < g0))
        throw ValidationError("mover position " + fmt_num(x) +
                              " m closes an air gap (g0 = " + fmt_num(g0) + " m)");
}

struct HtmaMesh {
    double phi_c, phi_b1, phi_b2;
    double r_m, r_1, r_2, r_b;
};

// Mesh fluxes of the three-source network. Mesh c runs through the tunable
// magnet and both gaps; meshes b1/b2 couple each bias magnet to its gap with
// circulation chosen so bias flux aids the control flux in gap 1 and opposes
// it in gap 2.
HtmaMesh solve_htma_mesh(const HtmaGeometry& g, double b_r, double x) {
    g.validate();
    check_gap_open(g.g0, x);
    HtmaMesh m{};
    m.r_m = g.l_m / (kMu0 * g.mu_rec * g.a_m);
    m.r_1 = (g.g0 - x) / (kMu0 * g.a_gap);
    m.r_2 = (g.g0 + x) / (kMu0 * g.a_gap);
    m.r_b = g.l_bias / (kMu0 * g.mu_rec * g.a_bias);
    const double f_c = b_r * g.l_m / (kMu0 * g.mu_rec);
    const double f_b = g.b_r_bias * g.l_bias / (kMu0 * g.mu_rec);

    // [ r_m+r_1+r_2   r_1        -r_2      ] [phi_c ]   [f_c]
    // [ r_1           r_b+r_1     0        ] [phi_b1] = [f_b]
    // [ -r_2          0           r_b+r_2  ] [phi_b2]   [f_b]
    double a[3][4] = {{m.r_m + m.r_1 + m.r_2, m.r_1, -m.r_2, f_c},
                      {m.r_1, m.r_b + m.r_1, 0.0, f_b},
                      {-m.r_2, 0.0, m.r_b + m.r_2, f_b}};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        if (a[col][col] == 0.0) throw SolverError("singular magnetic network");
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    m.phi_c = a[0][3] / a[0][0];
    m.phi_b1 = a[1][3] / a[1][1];
    m.phi_b2 = a[2][3] / a[2][2];
    return m;
}

} // namespace

FluxSolution solve_circuit_tma(const TmaGeometry& geom, double b_r, double x) {
    geom.validate();
    check_gap_open(geom.g0, x);
    const double r_m = geom.l_m / (kMu0 * geom.mu_rec * geom.a_m);
    const double r_g = (geom.g0 - x) * geom.n_gaps / (kMu0 * geom.a_gap);
    const double f_m = b_r * geom.l_m / (kMu0 * geom.mu_rec);
    FluxSolution sol;
    sol.phi_tm = f_m / (r_m + r_g);
    sol.phi_g1 = sol.phi_tm;
    sol.phi_g2 = sol.phi_tm;
    sol.b_m = sol.phi_tm / geom.a_m;
    sol.h_m = (sol.b_m - b_r) / (kMu0 * geom.mu_rec);
    return sol;
}

double force_tma(const FluxSolution& sol, const TmaGeometry& geom) {
    return geom.n_gaps * sol.phi_g1 * sol.phi_g1 / (2.0 * kMu0 * geom.a_gap);
}

FluxSolution solve_circuit_htma(const HtmaGeometry& geom, double b_r, double x) {
    const HtmaMesh m = solve_htma_mesh(geom, b_r, x);
    FluxSolution sol;
    sol.phi_tm = m.phi_c;
    sol.phi_g1 = m.phi_c + m.phi_b1;
    sol.phi_g2 = m.phi_c - m.phi_b2;
    sol.b_m = m.phi_c / geom.a_m;
    sol.h_m = (sol.b_m - b_r) / (kMu0 * geom.mu_rec);
    return sol;
}

double force_htma(const FluxSolution& sol, const HtmaGeometry& geom) {
    return (sol.phi_g1 * sol.phi_g1 - sol.phi_g2 * sol.phi_g2) /
           (2.0 * kMu0 * geom.a_gap);
}

double coenergy_tma(const TmaGeometry& geom, double b_r, double x) {
    const FluxSolution sol = solve_circuit_tma(geom, b_r, x);
    const double r_m = geom.l_m / (kMu0 * geom.mu_rec * geom.a_m);
    const double r_g = (geom.g0 - x) * geom.n_gaps / (kMu0 * geom.a_gap);
    return 0.5 * (r_m + r_g) * sol.phi_tm * sol.phi_tm;
}

double coenergy_htma(const HtmaGeometry& geom, double b_r, double x) {
    const HtmaMesh m = solve_htma_mesh(geom, b_r, x);
    const double phi_g1 = m.phi_c + m.phi_b1;
    const double phi_g2 = m.phi_c - m.phi_b2;
    return 0.5 * (m.r_m * m.phi_c * m.phi_c + m.r_1 * phi_g1 * phi_g1 +
                  m.r_2 * phi_g2 * phi_g2 +
                  m.r_b * (m.phi_b1 * m.phi_b1 + m.phi_b2 * m.phi_b2));
}

ForceFit fit_piecewise_linear(const std::vector<ForceSample>& samples, int n_segments) {
    if (n_segments < 1) throw ValidationError("n_segments must be at least 1");
    if (samples.size() < 2) throw ValidationError("need at least two force samples");

    auto fit_range = [&](double x_lo, double x_hi, bool last) {
        SegmentFit seg;
        seg.x_lo = x_lo;
        seg.x_hi = x_hi;
        std::vector<const ForceSample*> in;
        for (const auto& s : samples)
            if (s.x >= x_lo && (last ? s.x <= x_hi : s.x < x_hi)) in.push_back(&s);
        const long n = static_cast<long>(in.size());
        if (n < 2) throw ValidationError("force-fit segment holds fewer than 2 samples");

        double p_min = in[0]->phi_tm, p_max = p_min, xv_min = in[0]->x, xv_max = xv_min;
        for (const auto* s : in) {
            p_min = std::min(p_min, s->phi_tm);
            p_max = std::max(p_max, s->phi_tm);
            xv_min = std::min(xv_min, s->x);
            xv_max = std::max(xv_max, s->x);
        }
        const double p_scale = std::max(std::abs(p_min), std::abs(p_max));
        if (!(p_max - p_min > 1e-12 * std::max(p_scale, 1e-300)))
            throw ValidationError("rank-deficient force samples: phi_tm is constant, "
                                  "k_m is indeterminate");
        const double x_scale = std::max(std::abs(xv_min), std::abs(xv_max));
        const bool x_varies = xv_max - xv_min > 1e-12 * std::max(x_scale, 1e-300);

        double spp = 0, spx = 0, sxx = 0, spf = 0, sxf = 0, sf = 0, sp = 0, sff = 0;
        for (const auto* s : in) {
            spp += s->phi_tm * s->phi_tm;
            spx += s->phi_tm * s->x;
            sxx += s->x * s->x;
            spf += s->phi_tm * s->force;
            sxf += s->x * s->force;
            sp += s->phi_tm;
            sf += s->force;
            sff += s->force * s->force;
        }
        if (x_varies) {
            const double det = spp * sxx - spx * spx;
            if (det == 0.0) throw ValidationError("rank-deficient force samples");
            seg.k_m = (spf * sxx - sxf * spx) / det;
            seg.k_a = (sxf * spp - spf * spx) / det;
        } else {
            // Single mover position: fit F = k_m phi + c; the stiffness term
            // is the intercept divided by that position (zero at x = 0).
            const double det = n * spp - sp * sp;
            if (det == 0.0) throw ValidationError("rank-deficient force samples");
            seg.k_m = (n * spf - sp * sf) / det;
            const double c = (sf - seg.k_m * sp) / n;
            seg.k_a = xv_min != 0.0 ? c / xv_min : 0.0;
        }
        double ss_res = 0.0;
        const double f_mean = sf / n;
        const double ss_tot = sff - n * f_mean * f_mean;
        for (const auto* s : in) {
            const double r = s->force - seg.k_m * s->phi_tm - seg.k_a * s->x;
            ss_res += r * r;
            seg.max_residual = std::max(seg.max_residual, std::abs(r));
        }
        seg.r2 = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
        return seg;
    };

    double x_min = samples.front().x, x_max = samples.front().x;
    for (const auto& s : samples) {
        x_min = std::min(x_min, s.x);
        x_max = std::max(x_max, s.x);
    }
    ForceFit fit;
    const SegmentFit whole = fit_range(x_min, x_max, true);
    fit.k_m = whole.k_m;
    fit.k_a = whole.k_a;
    fit.r2 = whole.r2;
    if (n_segments == 1 || x_max == x_min) {
        fit.segments.push_back(whole);
        return fit;
    }
    const double w = (x_max - x_min) / n_segments;
    for (int i = 0; i < n_segments; ++i)
        fit.segments.push_back(
            fit_range(x_min + i * w, x_min + (i + 1) * w, i + 1 == n_segments));
    return fit;
}

std::vector<ForceSample> sweep_force_map(ActuatorMode mode, const HtmaGeometry& geom,
                                         const std::vector<double>& positions,
                                         double b_r_lo, double b_r_hi, int n_flux) {
    if (n_flux < 2) throw ValidationError("flux sweep needs at least 2 points");
    std::vector<ForceSample> samples;
    samples.reserve(positions.size() * n_flux);
    for (double x : positions) {
        for (int i = 0; i < n_flux; ++i) {
            const double b_r = b_r_lo + (b_r_hi - b_r_lo) * i / (n_flux - 1);
            ForceSample s;
            s.x = x;
            if (mode == ActuatorMode::Tma) {
                const FluxSolution sol = solve_circuit_tma(geom, b_r, x);
                s.phi_tm = sol.phi_tm;
                s.force = force_tma(sol, geom);
            } else {
                const FluxSolution sol = solve_circuit_htma(geom, b_r, x);
                s.phi_tm = sol.phi_tm;
                s.force = force_htma(sol, geom);
            }
            samples.push_back(s);
        }
    }
    return samples;
}

std::string force_fit_to_text(const ForceFit& fit) {
    std::ostringstream os;
    os << "k_m_n_per_wb = " << fmt_num(fit.k_m) << "\n";
    os << "k_a_n_per_m = " << fmt_num(fit.k_a) << "\n";
    os << "r2 = " << fmt_num(fit.r2) << "\n";
    os << "segments = " << fit.segments.size() << "\n";
    for (std::size_t i = 0; i < fit.segments.size(); ++i) {
        const auto& s = fit.segments[i];
        os << "segment_" << i << " = x[" << fmt_num(s.x_lo) << ", " << fmt_num(s.x_hi)
           << "] k_m " << fmt_num(s.k_m) << " k_a " << fmt_num(s.k_a) << " r2 "
           << fmt_num(s.r2) << " max_residual " << fmt_num(s.max_residual) << "\n";
    }
    return os.str();
}

} // namespace tmag
