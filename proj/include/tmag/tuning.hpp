#pragma once

#include <string>
#include <vector>

#include "tmag/hysteresis.hpp"

namespace tmag {

enum class Method { Smst, Emst };

const char* method_name(Method m);

struct CornerPoint {
    enum class Branch { DescendingMajor, MinorReversal };
    double h_cp = 0.0; // A/m
    Branch branch = Branch::MinorReversal;
};

// One magnetization-state change as an ordered field-setpoint sequence. The
// last setpoint is always exactly zero (the decay to remanence). EMST plans
// never contain a setpoint with |h| >= h_sat.
struct TuningPlan {
    Method method = Method::Emst;
    std::vector<double> setpoints; // A/m
    double target_b = 0.0;              // T
    double predicted_remanence = 0.0;   // T, planner-model prediction
    MemoryStack predicted_history;      // planner-model stack after the plan
};

// Linear corner-point model h_cp = slope_a * b_target + intercept_b0 fitted
// on the descending major branch.
struct SmstCalibration {
    double slope_a = 0.0;      // (A/m) per T
    double intercept_b0 = 0.0; // A/m
    double fit_residual = 0.0; // A/m, RMS over the calibration samples
    double b_min = 0.0, b_max = 0.0; // T, valid target range
    bool exact_fit = false; // two-point fit, residual zero by construction
};

// Samples n corner points on the descending major branch and fits the linear
// corner-point model by least squares.
SmstCalibration smst_calibrate(const HysteresisModel& model, int n_samples);

// Saturation-based plan: [+h_sat, h_cp, 0] when raising the MS, [h_cp, 0]
// when lowering it (loop closure makes the saturation step unnecessary
// then), [0] when the target equals the current remanence.
TuningPlan smst_plan(double target_b, const MagnetState& state,
                     const SmstCalibration& cal);

// Finds h_cp so that the excursion h_now -> h_cp -> 0 (with wiping applied)
// lands the remanence on target_b within tol_b. Bracketed bisection on the
// monotone remanence map, refined with safeguarded secant steps. Throws
// UnreachableTargetError with the reachable interval when no saturation-free
// corner point exists.
CornerPoint solve_corner_point(double target_b, const MemoryStack& stack,
                               double h_now, const HysteresisModel& model,
                               double tol_b);

// Envelope plan: a single excursion [h_cp, 0] on the reversal curve of the
// tracked history; no saturation setpoint ever.
TuningPlan emst_plan(double target_b, const MagnetState& state,
                     const HysteresisModel& model, double tol_b);

struct ExecutionResult {
    double achieved_b = 0.0; // T, remanence reached on the plant
    double error_b = 0.0;    // T, achieved - target
};

// Applies the plan's setpoints to a plant state, which may belong to a
// different model instance than the planner's (model mismatch).
ExecutionResult execute_plan(const TuningPlan& plan, MagnetState& plant);

// Sensorless sequence planners: both track their own predicted state on the
// planner model instead of reading the plant back.
class SmstPlanner {
public:
    SmstPlanner(const HysteresisModel& model, SmstCalibration cal);
    TuningPlan plan_and_advance(double target_b);
    const MagnetState& predicted() const { return predicted_; }
    const SmstCalibration& calibration() const { return cal_; }

private:
    const HysteresisModel* model_;
    SmstCalibration cal_;
    MagnetState predicted_;
};

class EmstPlanner {
public:
    EmstPlanner(const HysteresisModel& model, double tol_b);
    TuningPlan plan_and_advance(double target_b);
    const MagnetState& predicted() const { return predicted_; }

private:
    const HysteresisModel* model_;
    double tol_b_;
    MagnetState predicted_;
};

// Audit/replay record of one plan.
std::string plan_to_text(const TuningPlan& plan);

} // namespace tmag
