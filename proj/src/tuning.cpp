#include "tmag/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tmag/csv.hpp"

namespace tmag {

const char* method_name(Method m) { return m == Method::Smst ? "smst" : "emst"; }

namespace {

// Corner points never touch the saturation threshold itself.
double cp_limit(const HysteresisModel& model) { return model.h_sat() * (1.0 - 1e-6); }

double remanence_after_excursion(const HysteresisModel& model, const MemoryStack& stack,
                                 double h_now, double h_cp) {
    MagnetState probe(model, stack, h_now);
    probe.apply_field(h_cp);
    probe.apply_field(0.0);
    return probe.b();
}

void append_setpoint(std::vector<double>& sp, double v) {
    if (sp.empty() || sp.back() != v) sp.push_back(v);
}

TuningPlan finish_plan(Method method, std::vector<double> raw_setpoints, double target,
                       const MagnetState& state) {
    TuningPlan plan;
    plan.method = method;
    plan.target_b = target;
    for (double v : raw_setpoints) append_setpoint(plan.setpoints, v);
    append_setpoint(plan.setpoints, 0.0);
    MagnetState predicted = state;
    for (double sp : plan.setpoints) predicted.apply_field(sp);
    plan.predicted_remanence = predicted.b();
    plan.predicted_history = predicted.stack();
    return plan;
}

} // namespace

SmstCalibration smst_calibrate(const HysteresisModel& model, int n_samples) {
    if (n_samples < 2)
        throw ValidationError("corner-point calibration needs at least 2 samples");

    // Working interval of the descending branch: outside of it the remanence
    // map saturates and corner points carry no information. Uniform samples
    // across the full branch would cluster on those plateaus and ruin the
    // fit, so the interval ends are located first. The span stops at 75% of
    // the saturation remanence: the approach to full remanence is where the
    // branch bends and a linear model stops being a fair description.
    const double span = 0.75 * model.remanence_sat();
    const double tol = 1e-3 * model.remanence_sat();
    const MagnetState sat = MagnetState::saturated(model, +1);
    double cp_lo, cp_hi;
    try {
        cp_lo = solve_corner_point(-span, sat.stack(), sat.h(), model, tol).h_cp;
        cp_hi = solve_corner_point(+span, sat.stack(), sat.h(), model, tol).h_cp;
    } catch (const UnreachableTargetError&) {
        throw ValidationError("degenerate model: descending-branch remanence does "
                              "not span the requested calibration range");
    }
    if (!(cp_hi > cp_lo))
        throw ValidationError("degenerate model: empty corner-point interval");

    std::vector<double> b(n_samples), cp(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        cp[i] = cp_lo + (cp_hi - cp_lo) * i / (n_samples - 1);
        MagnetState state = MagnetState::saturated(model, +1);
        state.apply_field(cp[i]);
        state.apply_field(0.0);
        b[i] = state.b();
    }
    double b_mean = 0.0, cp_mean = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        b_mean += b[i];
        cp_mean += cp[i];
    }
    b_mean /= n_samples;
    cp_mean /= n_samples;
    double sbb = 0.0, sbc = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        sbb += (b[i] - b_mean) * (b[i] - b_mean);
        sbc += (b[i] - b_mean) * (cp[i] - cp_mean);
    }
    const double b_span = *std::max_element(b.begin(), b.end()) -
                          *std::min_element(b.begin(), b.end());
    if (!(b_span > 1e-9))
        throw ValidationError("degenerate model: remanence does not vary with the "
                              "corner point");
    SmstCalibration cal;
    cal.slope_a = sbc / sbb;
    cal.intercept_b0 = cp_mean - cal.slope_a * b_mean;
    double ss = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double r = cp[i] - (cal.slope_a * b[i] + cal.intercept_b0);
        ss += r * r;
    }
    cal.fit_residual = std::sqrt(ss / n_samples);
    cal.b_min = *std::min_element(b.begin(), b.end());
    cal.b_max = *std::max_element(b.begin(), b.end());
    cal.exact_fit = n_samples == 2;
    if (!(cal.slope_a > 0))
        throw ValidationError("corner-point map is not monotone increasing");
    return cal;
}

TuningPlan smst_plan(double target_b, const MagnetState& state,
                     const SmstCalibration& cal) {
    if (target_b < cal.b_min - 1e-12 || target_b > cal.b_max + 1e-12)
        throw ValidationError("tuning target " + fmt_num(target_b) +
                              " T outside the calibrated range [" + fmt_num(cal.b_min) +
                              ", " + fmt_num(cal.b_max) + "] T");
    const HysteresisModel& model = state.model();
    const double current = state.remanence_now();
    if (target_b == current) return finish_plan(Method::Smst, {}, target_b, state);

    // Demagnetization corner point from the linear model, clamped to the
    // descending-branch validity (nonpositive, above the wipe threshold).
    double h_cp = cal.slope_a * target_b + cal.intercept_b0;
    h_cp = std::clamp(h_cp, -cp_limit(model), 0.0);

    std::vector<double> sp;
    if (target_b > current) sp.push_back(model.h_sat()); // up-step saturates first
    sp.push_back(h_cp);
    return finish_plan(Method::Smst, sp, target_b, state);
}

CornerPoint solve_corner_point(double target_b, const MemoryStack& stack, double h_now,
                               const HysteresisModel& model, double tol_b) {
    if (!(tol_b > 0)) throw ValidationError("tol_b must be positive");

    auto rem = [&](double h_cp) {
        return remanence_after_excursion(model, stack, h_now, h_cp);
    };

    const double current = remanence(model, stack, h_now);
    auto classify = [&](double h_cp) {
        MagnetState probe(model, stack, h_now);
        probe.apply_field(h_cp);
        return probe.stack().empty() ? CornerPoint::Branch::DescendingMajor
                                     : CornerPoint::Branch::MinorReversal;
    };
    if (target_b == current) return CornerPoint{0.0, classify(0.0)};

    double lo = -cp_limit(model), hi = cp_limit(model);
    double f_lo = rem(lo) - target_b;
    double f_hi = rem(hi) - target_b;
    if (f_lo > tol_b || f_hi < -tol_b)
        throw UnreachableTargetError(target_b, f_lo + target_b, f_hi + target_b);
    if (std::abs(f_lo) <= tol_b) return CornerPoint{lo, classify(lo)};
    if (std::abs(f_hi) <= tol_b) return CornerPoint{hi, classify(hi)};

    // Bisection on the monotone (but kinked at wiping boundaries) remanence
    // map down to a narrow bracket, then secant refinements inside it.
    const double coarse_width = 1e-3 * model.h_sat();
    while (hi - lo > coarse_width) {
        const double mid = 0.5 * (lo + hi);
        const double f = rem(mid) - target_b;
        if (std::abs(f) <= tol_b) return CornerPoint{mid, classify(mid)};
        (f < 0.0 ? lo : hi) = mid;
        (f < 0.0 ? f_lo : f_hi) = f;
    }
    double x0 = lo, f0 = f_lo, x1 = hi, f1 = f_hi;
    for (int it = 0; it < 5; ++it) {
        double x2 = f1 != f0 ? x1 - f1 * (x1 - x0) / (f1 - f0) : 0.5 * (lo + hi);
        if (!(x2 > lo && x2 < hi)) x2 = 0.5 * (lo + hi);
        const double f2 = rem(x2) - target_b;
        if (std::abs(f2) <= tol_b) return CornerPoint{x2, classify(x2)};
        (f2 < 0.0 ? lo : hi) = x2;
        (f2 < 0.0 ? f_lo : f_hi) = f2;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    // Remanence steps of the discrete density can be wider than the secant
    // stride; fall back to plain bisection until the tolerance or the field
    // resolution floor is hit.
    while (hi - lo > 0.25) {
        const double mid = 0.5 * (lo + hi);
        const double f = rem(mid) - target_b;
        if (std::abs(f) <= tol_b) return CornerPoint{mid, classify(mid)};
        (f < 0.0 ? lo : hi) = mid;
        (f < 0.0 ? f_lo : f_hi) = f;
    }
    const double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    if (std::abs(rem(best) - target_b) <= tol_b) return CornerPoint{best, classify(best)};
    throw SolverError("corner-point search stalled: remanence map cannot meet tol_b=" +
                      fmt_num(tol_b) + " T near h_cp=" + fmt_num(best) + " A/m");
}

TuningPlan emst_plan(double target_b, const MagnetState& state,
                     const HysteresisModel& model, double tol_b) {
    if (std::abs(target_b) > model.remanence_sat() + 1e-12)
        throw ValidationError("tuning target " + fmt_num(target_b) +
                              " T beyond the saturation remanence");
    const double current = state.remanence_now();
    if (target_b == current) return finish_plan(Method::Emst, {}, target_b, state);
    const CornerPoint cp =
        solve_corner_point(target_b, state.stack(), state.h(), model, tol_b);
    TuningPlan plan = finish_plan(Method::Emst, {cp.h_cp}, target_b, state);
    for (double sp : plan.setpoints)
        if (std::abs(sp) >= model.h_sat())
            throw SolverError("envelope plan produced a saturating setpoint");
    return plan;
}

ExecutionResult execute_plan(const TuningPlan& plan, MagnetState& plant) {
    if (plan.setpoints.empty() || plan.setpoints.back() != 0.0)
        throw ValidationError("tuning plan must end with a zero setpoint");
    for (double sp : plan.setpoints) plant.apply_field(sp);
    ExecutionResult res;
    res.achieved_b = plant.b();
    res.error_b = res.achieved_b - plan.target_b;
    return res;
}

SmstPlanner::SmstPlanner(const HysteresisModel& model, SmstCalibration cal)
    : model_(&model), cal_(cal), predicted_(MagnetState::saturated(model, +1)) {
    predicted_.apply_field(0.0);
}

TuningPlan SmstPlanner::plan_and_advance(double target_b) {
    TuningPlan plan = smst_plan(target_b, predicted_, cal_);
    execute_plan(plan, predicted_);
    return plan;
}

EmstPlanner::EmstPlanner(const HysteresisModel& model, double tol_b)
    : model_(&model), tol_b_(tol_b), predicted_(MagnetState::saturated(model, +1)) {
    predicted_.apply_field(0.0);
}

TuningPlan EmstPlanner::plan_and_advance(double target_b) {
    TuningPlan plan = emst_plan(target_b, predicted_, *model_, tol_b_);
    execute_plan(plan, predicted_);
    return plan;
}

std::string plan_to_text(const TuningPlan& plan) {
    std::ostringstream os;
    os << "method = " << method_name(plan.method) << "\n";
    os << "target_t = " << fmt_num(plan.target_b) << "\n";
    os << "setpoints_am =";
    for (double sp : plan.setpoints) os << " " << fmt_num(sp);
    os << "\npredicted_remanence_t = " << fmt_num(plan.predicted_remanence) << "\n";
    os << "predicted_history_origin = " << plan.predicted_history.origin() << "\n";
    os << "predicted_history_am =";
    for (double e : plan.predicted_history.extrema()) os << " " << fmt_num(e);
    os << "\n";
    return os.str();
}

} // namespace tmag
