#pragma once

#include <vector>

#include "tmag/errors.hpp"
#include "tmag/tuning.hpp"

namespace tmag {

struct CoilParams {
    double n_turns = 500;
    double resistance = 2.0; // Ohm
    double l_m = 0.01;       // m, magnetic path length through the PM

    void validate() const {
        if (!(n_turns > 0) || !(resistance > 0) || !(l_m > 0))
            throw ValidationError("coil parameters must be positive");
    }
};

// Symmetric triangular current pulse with an optional dwell at the peak.
struct PulseWaveform {
    double slew = 5e6; // (A/m)/s field slew rate
    double hold = 0.0; // s dwell at the peak

    void validate() const {
        if (!(slew > 0) || hold < 0)
            throw ValidationError("waveform needs slew > 0 and hold >= 0");
    }
};

struct PulseEnergy {
    double h_peak = 0.0;    // A/m
    double duration_s = 0.0;
    double energy_j = 0.0;
};

struct EnergyReport {
    std::vector<PulseEnergy> per_pulse;
    double total_j = 0.0;
};

// Ampere's law through the coil: i = h * l_m / n_turns.
double current_for_field(double h, const CoilParams& coil);

// Resistive heat of one triangular pulse 0 -> h_peak -> 0 plus hold:
// the integral of i^2 over the ramps equals i_peak^2 * T_ramp_total / 3 with
// T_ramp_total = 2|h_peak|/slew.
double pulse_energy(double h_peak, const PulseWaveform& wf, const CoilParams& coil);

// One pulse per nonzero setpoint; successive setpoints are separate pulses
// returning through zero.
EnergyReport plan_energy(const TuningPlan& plan, const PulseWaveform& wf,
                         const CoilParams& coil);

} // namespace tmag
