#include "tmag/energy.hpp"

#include <cmath>

namespace tmag {

double current_for_field(double h, const CoilParams& coil) {
    coil.validate();
    return h * coil.l_m / coil.n_turns;
}

double pulse_energy(double h_peak, const PulseWaveform& wf, const CoilParams& coil) {
    wf.validate();
    coil.validate();
    if (!std::isfinite(h_peak)) throw ValidationError("pulse peak must be finite");
    if (h_peak == 0.0) return 0.0;
    const double i_peak = std::abs(current_for_field(h_peak, coil));
    const double t_ramp = 2.0 * std::abs(h_peak) / wf.slew;
    return coil.resistance * i_peak * i_peak * (t_ramp / 3.0 + wf.hold);
}

EnergyReport plan_energy(const TuningPlan& plan, const PulseWaveform& wf,
                         const CoilParams& coil) {
    EnergyReport report;
    for (double sp : plan.setpoints) {
        if (sp == 0.0) continue;
        PulseEnergy p;
        p.h_peak = sp;
        p.duration_s = 2.0 * std::abs(sp) / wf.slew + wf.hold;
        p.energy_j = pulse_energy(sp, wf, coil);
        report.per_pulse.push_back(p);
        report.total_j += p.energy_j;
    }
    return report;
}

} // namespace tmag
