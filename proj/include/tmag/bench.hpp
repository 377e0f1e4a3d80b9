#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmag/energy.hpp"
#include "tmag/hysteresis.hpp"
#include "tmag/tuning.hpp"

namespace tmag {

enum class FallbackPolicy { Error, Smst };

// Randomized comparison of the two tuning methods against a mismatched
// plant: n_sequences random target sequences, each run once per method on a
// fresh plant copy, reporting per-sequence RMSE of the reached magnetization
// states and the average heat dissipated per tuning step.
struct BenchConfig {
    int n_sequences = 20;
    int seq_length = 10;
    double b_lo = -1.0; // T
    double b_hi = 1.0;  // T
    // Relative per-node sigma of the plant's Everett-surface perturbation.
    // Calibrated once by bisection so the SMST RMSE at the default seed and
    // magnet lands on 4.8 mT; rerun `tmag_calibrate` after model changes.
    double mismatch_sigma = 0.00211;
    std::uint64_t rng_seed = 1;
    int plant_grid_n = 1001;
    double tol_b = 1e-4; // T, corner-point solver tolerance
    int smst_samples = 21;
    FallbackPolicy fallback = FallbackPolicy::Smst;
    bool parallel = true;

    void validate(double b_r_max) const;
};

struct StepRecord {
    int sequence = 0;
    int step = 0;
    Method method = Method::Emst;
    double target_t = 0.0;
    double achieved_t = 0.0;
    double error_t = 0.0;
    double energy_j = 0.0;
    std::vector<PulseEnergy> pulses; // per-pulse heat breakdown
    bool up_step = false;  // target above the planner's remanence before the step
    bool fell_back = false; // EMST target served by an SMST plan
};

struct MethodSummary {
    double rmse_mean_t = 0.0; // mean of per-sequence RMSEs
    double rmse_std_t = 0.0;  // sample std over sequences
    double mean_e_tune_j = 0.0;
    double mean_e_up_j = 0.0;   // up-steps only
    double mean_e_down_j = 0.0; // down-steps only
};

struct SequenceResult {
    int index = 0;
    double rmse_smst_t = 0.0;
    double rmse_emst_t = 0.0;
    double energy_smst_j = 0.0; // sequence total
    double energy_emst_j = 0.0;
};

struct ComparisonReport {
    MethodSummary smst;
    MethodSummary emst;
    std::vector<SequenceResult> sequences;
    std::vector<StepRecord> steps; // all sequences, smst rows then emst per sequence
    int fallback_count = 0;
    BenchConfig config;
    std::string config_echo; // canonical config text of the producing run

    bool operator==(const ComparisonReport& other) const;
};

ComparisonReport run_comparison(const BenchConfig& cfg,
                                const HysteresisModel& planner_model,
                                const PulseWaveform& wf, const CoilParams& coil,
                                const std::string& config_echo);

// Table-1-shaped text table: methods as columns, RMSE and E_tune as rows.
std::string report_table(const ComparisonReport& report);
// Versioned JSON document with full per-step detail.
std::string report_json(const ComparisonReport& report);
ComparisonReport report_from_json(const std::string& text);
// Flat per-step CSV: seq,step,method,target_t,achieved_t,error_t,energy_j.
std::string report_csv(const ComparisonReport& report);

} // namespace tmag
