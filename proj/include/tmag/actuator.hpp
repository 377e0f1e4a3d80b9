#pragma once

#include <vector>

#include "tmag/errors.hpp"

namespace tmag {

inline constexpr double kMu0 = 1.25663706212e-6; // H/m

// C-shaped actuator: one tunable magnet driving n_gaps series air-gap faces.
struct TmaGeometry {
    double a_gap = 1e-4;  // m^2 pole-face area
    double g0 = 0.5e-3;   // m nominal air-gap length
    double l_m = 10e-3;   // m soft-PM length along magnetization
    double a_m = 1e-4;    // m^2 soft-PM cross-section
    double mu_rec = 1.05; // relative recoil permeability
    int n_gaps = 2;       // working gap faces in series

    void validate() const;
};

// Hybrid actuator: mover between two gaps g0 -+ x, tunable magnet driving
// control flux through both gaps in series, one bias hard PM per gap leg.
struct HtmaGeometry : TmaGeometry {
    double b_r_bias = 1.2;   // T bias hard-PM remanence
    double l_bias = 60e-3;   // m
    double a_bias = 0.5e-4;  // m^2
    double x_range = 250e-6; // m, admissible |x|

    void validate() const;
};

// Sign conventions, fixed here for the whole project:
//  - mover position x > 0 closes gap 1 (length g0 - x) and opens gap 2,
//  - gap fluxes are positive in the control-flux direction through the
//    mover, so a symmetric HTMA at b_r = 0, x = 0 has phi_g1 = -phi_g2,
//  - force is positive toward closing gap 1.
struct FluxSolution {
    double phi_tm = 0.0; // Wb through the tunable magnet
    double phi_g1 = 0.0; // Wb
    double phi_g2 = 0.0; // Wb
    double h_m = 0.0;    // A/m soft-PM operating point
    double b_m = 0.0;    // T
};

FluxSolution solve_circuit_tma(const TmaGeometry& geom, double b_r, double x);
double force_tma(const FluxSolution& sol, const TmaGeometry& geom);

FluxSolution solve_circuit_htma(const HtmaGeometry& geom, double b_r, double x);
double force_htma(const FluxSolution& sol, const HtmaGeometry& geom);

// Magnetic co-energy of the solved network (all branches, 1/2 R phi^2).
// Its x-derivative at constant source MMFs reproduces the force; tests use
// it as the independent check on the Maxwell-stress expressions.
double coenergy_tma(const TmaGeometry& geom, double b_r, double x);
double coenergy_htma(const HtmaGeometry& geom, double b_r, double x);

struct ForceSample {
    double x = 0.0;      // m
    double phi_tm = 0.0; // Wb
    double force = 0.0;  // N
};

struct SegmentFit {
    double x_lo = 0.0, x_hi = 0.0;
    double k_m = 0.0; // N/Wb
    double k_a = 0.0; // N/m
    double r2 = 0.0;
    double max_residual = 0.0; // N
};

// F = k_m * phi_tm + k_a * x, fitted per equal-width x segment plus one
// whole-range fit.
struct ForceFit {
    double k_m = 0.0;
    double k_a = 0.0;
    double r2 = 0.0;
    std::vector<SegmentFit> segments;
};

ForceFit fit_piecewise_linear(const std::vector<ForceSample>& samples, int n_segments);

enum class ActuatorMode { Tma, Htma };

// Force map over positions x remanence grid; phi_tm comes from the circuit
// solution at each grid point.
std::vector<ForceSample> sweep_force_map(ActuatorMode mode, const HtmaGeometry& geom,
                                         const std::vector<double>& positions,
                                         double b_r_lo, double b_r_hi, int n_flux);

std::string force_fit_to_text(const ForceFit& fit);

} // namespace tmag
