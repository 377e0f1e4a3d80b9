#include "tmag/bench.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "tmag/csv.hpp"
#include "tmag/rng.hpp"
#include "tmag/table_model.hpp"

namespace tmag {

void BenchConfig::validate(double b_r_max) const {
    if (n_sequences < 1 || seq_length < 1)
        throw ValidationError("bench needs at least one sequence and one target");
    if (!(b_lo < b_hi))
        throw ValidationError("bench target range must satisfy b_lo < b_hi");
    if (std::max(std::abs(b_lo), std::abs(b_hi)) > b_r_max + 1e-12)
        throw ValidationError("bench target range exceeds the saturation remanence " +
                              fmt_num(b_r_max) + " T");
    if (mismatch_sigma < 0) throw ValidationError("mismatch_sigma must be >= 0");
    if (plant_grid_n < 11) throw ValidationError("plant_grid_n must be at least 11");
    if (!(tol_b > 0)) throw ValidationError("tol_b must be positive");
    if (smst_samples < 2) throw ValidationError("smst_samples must be at least 2");
}

namespace {

struct SequenceOutcome {
    std::vector<StepRecord> smst_steps;
    std::vector<StepRecord> emst_steps;
    int fallbacks = 0;
};

std::vector<StepRecord> run_sequence(Method method, const std::vector<double>& targets,
                                     const HysteresisModel& planner_model,
                                     const SmstCalibration& cal,
                                     const HysteresisModel& plant_model,
                                     const BenchConfig& cfg, const PulseWaveform& wf,
                                     const CoilParams& coil, int seq_index,
                                     int* fallbacks) {
    MagnetState plant = MagnetState::saturated(plant_model, +1);
    plant.apply_field(0.0);
    MagnetState predicted = MagnetState::saturated(planner_model, +1);
    predicted.apply_field(0.0);

    std::vector<StepRecord> steps;
    steps.reserve(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const double target = targets[k];
        StepRecord rec;
        rec.sequence = seq_index;
        rec.step = static_cast<int>(k);
        rec.method = method;
        rec.target_t = target;
        rec.up_step = target > predicted.remanence_now();

        TuningPlan plan;
        if (method == Method::Smst) {
            plan = smst_plan(target, predicted, cal);
        } else {
            try {
                plan = emst_plan(target, predicted, planner_model, cfg.tol_b);
            } catch (const UnreachableTargetError&) {
                if (cfg.fallback == FallbackPolicy::Error) throw;
                plan = smst_plan(target, predicted, cal);
                rec.fell_back = true;
                if (fallbacks) ++*fallbacks;
            }
        }
        const ExecutionResult res = execute_plan(plan, plant);
        execute_plan(plan, predicted); // sensorless tracking on the planner model
        rec.achieved_t = res.achieved_b;
        rec.error_t = res.error_b;
        const EnergyReport heat = plan_energy(plan, wf, coil);
        rec.energy_j = heat.total_j;
        rec.pulses = heat.per_pulse;
        steps.push_back(rec);
    }
    return steps;
}

double rmse(const std::vector<StepRecord>& steps) {
    double ss = 0.0;
    for (const auto& s : steps) ss += s.error_t * s.error_t;
    return steps.empty() ? 0.0 : std::sqrt(ss / steps.size());
}

MethodSummary summarize(const std::vector<double>& seq_rmse,
                        const std::vector<StepRecord>& steps) {
    MethodSummary out;
    const int n = static_cast<int>(seq_rmse.size());
    for (double r : seq_rmse) out.rmse_mean_t += r;
    out.rmse_mean_t /= n;
    if (n > 1) {
        double ss = 0.0;
        for (double r : seq_rmse) ss += (r - out.rmse_mean_t) * (r - out.rmse_mean_t);
        out.rmse_std_t = std::sqrt(ss / (n - 1));
    }
    double e_all = 0.0, e_up = 0.0, e_down = 0.0;
    long n_up = 0, n_down = 0;
    for (const auto& s : steps) {
        e_all += s.energy_j;
        if (s.up_step) {
            e_up += s.energy_j;
            ++n_up;
        } else {
            e_down += s.energy_j;
            ++n_down;
        }
    }
    out.mean_e_tune_j = steps.empty() ? 0.0 : e_all / static_cast<double>(steps.size());
    out.mean_e_up_j = n_up ? e_up / n_up : 0.0;
    out.mean_e_down_j = n_down ? e_down / n_down : 0.0;
    return out;
}

} // namespace

ComparisonReport run_comparison(const BenchConfig& cfg,
                                const HysteresisModel& planner_model,
                                const PulseWaveform& wf, const CoilParams& coil,
                                const std::string& config_echo) {
    cfg.validate(planner_model.remanence_sat());
    wf.validate();
    coil.validate();

    const SmstCalibration cal = smst_calibrate(planner_model, cfg.smst_samples);

    // Base plant surface; per-sequence plants perturb a copy of it. Built
    // before the parallel loop so every sequence shares one table.
    std::optional<TableModel> base;
    if (cfg.mismatch_sigma > 0)
        base.emplace(TableModel::from_model(planner_model, cfg.plant_grid_n));

    const Rng root(cfg.rng_seed);
    std::vector<SequenceOutcome> outcomes(cfg.n_sequences);

#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
    for (int s = 0; s < cfg.n_sequences; ++s) {
        Rng rng_targets = root.child(2 * static_cast<std::uint64_t>(s));
        Rng rng_plant = root.child(2 * static_cast<std::uint64_t>(s) + 1);
        std::vector<double> targets(cfg.seq_length);
        for (double& t : targets) t = rng_targets.uniform(cfg.b_lo, cfg.b_hi);

        std::optional<TableModel> plant;
        if (base) plant.emplace(base->perturbed(rng_plant, cfg.mismatch_sigma));
        const HysteresisModel& plant_model =
            plant ? static_cast<const HysteresisModel&>(*plant) : planner_model;

        SequenceOutcome& out = outcomes[s];
        out.smst_steps = run_sequence(Method::Smst, targets, planner_model, cal,
                                      plant_model, cfg, wf, coil, s, nullptr);
        out.emst_steps = run_sequence(Method::Emst, targets, planner_model, cal,
                                      plant_model, cfg, wf, coil, s, &out.fallbacks);
    }

    // Aggregation in sequence order: identical result for any thread count.
    ComparisonReport report;
    report.config = cfg;
    report.config_echo = config_echo;
    std::vector<double> rmse_smst, rmse_emst;
    for (int s = 0; s < cfg.n_sequences; ++s) {
        const auto& out = outcomes[s];
        SequenceResult sr;
        sr.index = s;
        sr.rmse_smst_t = rmse(out.smst_steps);
        sr.rmse_emst_t = rmse(out.emst_steps);
        for (const auto& st : out.smst_steps) sr.energy_smst_j += st.energy_j;
        for (const auto& st : out.emst_steps) sr.energy_emst_j += st.energy_j;
        report.sequences.push_back(sr);
        rmse_smst.push_back(sr.rmse_smst_t);
        rmse_emst.push_back(sr.rmse_emst_t);
        report.fallback_count += out.fallbacks;
        report.steps.insert(report.steps.end(), out.smst_steps.begin(),
                            out.smst_steps.end());
        report.steps.insert(report.steps.end(), out.emst_steps.begin(),
                            out.emst_steps.end());
    }
    std::vector<StepRecord> smst_all, emst_all;
    for (const auto& st : report.steps)
        (st.method == Method::Smst ? smst_all : emst_all).push_back(st);
    report.smst = summarize(rmse_smst, smst_all);
    report.emst = summarize(rmse_emst, emst_all);
    return report;
}

bool ComparisonReport::operator==(const ComparisonReport& other) const {
    return report_json(*this) == report_json(other);
}

namespace {

nlohmann::ordered_json summary_json(const MethodSummary& m) {
    return {{"rmse_t", m.rmse_mean_t},
            {"rmse_std_t", m.rmse_std_t},
            {"mean_e_tune_j", m.mean_e_tune_j},
            {"mean_e_up_j", m.mean_e_up_j},
            {"mean_e_down_j", m.mean_e_down_j}};
}

MethodSummary summary_from_json(const nlohmann::ordered_json& j) {
    MethodSummary m;
    m.rmse_mean_t = j.at("rmse_t");
    m.rmse_std_t = j.at("rmse_std_t");
    m.mean_e_tune_j = j.at("mean_e_tune_j");
    m.mean_e_up_j = j.at("mean_e_up_j");
    m.mean_e_down_j = j.at("mean_e_down_j");
    return m;
}

void require_complete(const ComparisonReport& r) {
    if (r.sequences.empty() || r.steps.empty())
        throw ValidationError("comparison report has no per-sequence detail");
}

} // namespace

std::string report_table(const ComparisonReport& r) {
    require_complete(r);
    std::ostringstream os;
    char line[160];
    os << "                    SMST                 EMST\n";
    std::snprintf(line, sizeof(line), "RMSE      %7.2f mT +- %5.2f mT %7.2f mT +- %5.2f mT\n",
                  1e3 * r.smst.rmse_mean_t, 1e3 * r.smst.rmse_std_t,
                  1e3 * r.emst.rmse_mean_t, 1e3 * r.emst.rmse_std_t);
    os << line;
    std::snprintf(line, sizeof(line), "E_tune    %10.4f J        %10.4f J\n",
                  r.smst.mean_e_tune_j, r.emst.mean_e_tune_j);
    os << line;
    std::snprintf(line, sizeof(line),
                  "ratio EMST/SMST: energy %.4f, rmse %.4f, fallbacks %d\n",
                  r.emst.mean_e_tune_j / r.smst.mean_e_tune_j,
                  r.emst.rmse_mean_t / r.smst.rmse_mean_t, r.fallback_count);
    os << line;
    return os.str();
}

std::string report_json(const ComparisonReport& r) {
    require_complete(r);
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["config_echo"] = r.config_echo;
    j["config"] = {{"n_sequences", r.config.n_sequences},
                   {"seq_length", r.config.seq_length},
                   {"b_lo", r.config.b_lo},
                   {"b_hi", r.config.b_hi},
                   {"mismatch_sigma", r.config.mismatch_sigma},
                   {"rng_seed", r.config.rng_seed},
                   {"plant_grid_n", r.config.plant_grid_n},
                   {"tol_b", r.config.tol_b},
                   {"smst_samples", r.config.smst_samples},
                   {"fallback", r.config.fallback == FallbackPolicy::Smst ? "smst"
                                                                          : "error"}};
    j["methods"] = {{"smst", summary_json(r.smst)}, {"emst", summary_json(r.emst)}};
    nlohmann::ordered_json seqs = nlohmann::ordered_json::array();
    for (const auto& s : r.sequences)
        seqs.push_back({{"index", s.index},
                        {"rmse_smst_t", s.rmse_smst_t},
                        {"rmse_emst_t", s.rmse_emst_t},
                        {"energy_smst_j", s.energy_smst_j},
                        {"energy_emst_j", s.energy_emst_j}});
    j["sequences"] = seqs;
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const auto& st : r.steps) {
        nlohmann::ordered_json pulses = nlohmann::ordered_json::array();
        for (const auto& p : st.pulses)
            pulses.push_back({{"h_peak", p.h_peak},
                              {"duration_s", p.duration_s},
                              {"energy_j", p.energy_j}});
        steps.push_back({{"seq", st.sequence},
                         {"step", st.step},
                         {"method", method_name(st.method)},
                         {"target_t", st.target_t},
                         {"achieved_t", st.achieved_t},
                         {"error_t", st.error_t},
                         {"energy", {{"pulses", pulses}, {"total_j", st.energy_j}}},
                         {"up", st.up_step},
                         {"fallback", st.fell_back}});
    }
    j["steps"] = steps;
    j["fallbacks"] = r.fallback_count;
    return j.dump(2) + "\n";
}

ComparisonReport report_from_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("cannot parse report JSON: ") + e.what());
    }
    if (j.at("format_version") != 1)
        throw ValidationError("unsupported report format_version");
    ComparisonReport r;
    r.config_echo = j.at("config_echo");
    const auto& c = j.at("config");
    r.config.n_sequences = c.at("n_sequences");
    r.config.seq_length = c.at("seq_length");
    r.config.b_lo = c.at("b_lo");
    r.config.b_hi = c.at("b_hi");
    r.config.mismatch_sigma = c.at("mismatch_sigma");
    r.config.rng_seed = c.at("rng_seed");
    r.config.plant_grid_n = c.at("plant_grid_n");
    r.config.tol_b = c.at("tol_b");
    r.config.smst_samples = c.at("smst_samples");
    r.config.fallback = c.at("fallback") == "smst" ? FallbackPolicy::Smst
                                                   : FallbackPolicy::Error;
    r.smst = summary_from_json(j.at("methods").at("smst"));
    r.emst = summary_from_json(j.at("methods").at("emst"));
    for (const auto& s : j.at("sequences")) {
        SequenceResult sr;
        sr.index = s.at("index");
        sr.rmse_smst_t = s.at("rmse_smst_t");
        sr.rmse_emst_t = s.at("rmse_emst_t");
        sr.energy_smst_j = s.at("energy_smst_j");
        sr.energy_emst_j = s.at("energy_emst_j");
        r.sequences.push_back(sr);
    }
    for (const auto& s : j.at("steps")) {
        StepRecord st;
        st.sequence = s.at("seq");
        st.step = s.at("step");
        st.method = s.at("method") == "smst" ? Method::Smst : Method::Emst;
        st.target_t = s.at("target_t");
        st.achieved_t = s.at("achieved_t");
        st.error_t = s.at("error_t");
        const auto& energy = s.at("energy");
        st.energy_j = energy.at("total_j");
        for (const auto& p : energy.at("pulses")) {
            PulseEnergy pe;
            pe.h_peak = p.at("h_peak");
            pe.duration_s = p.at("duration_s");
            pe.energy_j = p.at("energy_j");
            st.pulses.push_back(pe);
        }
        st.up_step = s.at("up");
        st.fell_back = s.at("fallback");
        r.steps.push_back(st);
    }
    r.fallback_count = j.at("fallbacks");
    return r;
}

std::string report_csv(const ComparisonReport& r) {
    require_complete(r);
    std::ostringstream os;
    os << "seq,step,method,target_t,achieved_t,error_t,energy_j\n";
    for (const auto& st : r.steps)
        os << st.sequence << "," << st.step << "," << method_name(st.method) << ","
           << fmt_num(st.target_t) << "," << fmt_num(st.achieved_t) << ","
           << fmt_num(st.error_t) << "," << fmt_num(st.energy_j) << "\n";
    return os.str();
}

} // namespace tmag
