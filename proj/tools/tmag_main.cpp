#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmag/actuator.hpp"
#include "tmag/bench.hpp"
#include "tmag/config.hpp"
#include "tmag/csv.hpp"
#include "tmag/energy.hpp"
#include "tmag/forc.hpp"
#include "tmag/model_io.hpp"
#include "tmag/table_model.hpp"
#include "tmag/tuning.hpp"
#include "tmag/version.hpp"

namespace {

using namespace tmag;

std::string meta_line(const std::string& command, const RunConfig& cfg) {
    return "tmag " + std::string(kVersion) + " " + command + " config=" + cfg.hash_hex();
}

RunConfig load_config(const std::string& path) {
    return path.empty() ? RunConfig::defaults() : RunConfig::load(path);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        std::size_t pos = 0;
        const double v = std::stod(cur, &pos);
        if (pos != cur.size()) throw ValidationError("cannot parse number '" + cur + "'");
        out.push_back(v);
        cur.clear();
    };
    for (char ch : text) {
        if (ch == ',')
            flush();
        else if (!std::isspace(static_cast<unsigned char>(ch)))
            cur += ch;
    }
    flush();
    return out;
}

std::unique_ptr<HysteresisModel> make_model(const RunConfig& cfg,
                                            const std::string& model_path) {
    if (!model_path.empty()) return load_model(model_path);
    return std::make_unique<GaussianPreisachModel>(cfg.magnet);
}

int cmd_simulate(const std::string& config_path, const std::string& sequence,
                 const std::string& model_path, const std::string& out, int resolution) {
    const RunConfig cfg = load_config(config_path);
    const auto model = make_model(cfg, model_path);
    if (resolution < 1) throw ValidationError("--resolution must be at least 1");

    std::vector<double> setpoints;
    if (!sequence.empty()) {
        if (std::filesystem::exists(sequence)) {
            for (const auto& row : read_csv(sequence, {"h"}).rows)
                setpoints.push_back(row[0]);
        } else {
            setpoints = parse_list(sequence);
        }
    }
    for (double h : setpoints)
        if (std::abs(h) > model->h_clip())
            throw ValidationError("sequence field " + fmt_num(h) +
                                  " A/m exceeds the clip limit " +
                                  fmt_num(model->h_clip()) + " A/m");

    CsvWriter w(out, meta_line("simulate", cfg), {"step", "h", "b"});
    MagnetState state = MagnetState::saturated(*model, +1);
    state.apply_field(0.0); // fresh magnet: saturated once, decayed to zero
    for (std::size_t k = 0; k < setpoints.size(); ++k) {
        const double from = state.h(), to = setpoints[k];
        const int n_sub = std::max(1, static_cast<int>(std::ceil(
                                          std::abs(to - from) /
                                          (model->h_sat() / resolution))));
        for (int i = 1; i <= n_sub; ++i) {
            state.apply_field(from + (to - from) * i / n_sub);
            w.row({static_cast<double>(k), state.h(), state.b()});
        }
    }
    w.close();
    return 0;
}

int cmd_identify(const std::string& forc_path, int grid, const std::string& out) {
    const ForcTable table = load_forc_csv(forc_path);
    const IdentifiedModel identified = identify_from_forc(table, grid);
    save_model(identified.model, out);
    std::printf("identified %d-node surface from %zu curves, clip fraction %.4f\n",
                identified.model.grid_n(), table.curves.size(), identified.clip_fraction);
    return 0;
}

int cmd_tune(const std::string& config_path, const std::string& method_arg,
             const std::string& targets_arg, const std::string& fallback_arg,
             const std::string& model_path, const std::string& out) {
    const RunConfig cfg = load_config(config_path);
    const auto model = make_model(cfg, model_path);
    const std::vector<double> targets = parse_list(targets_arg);
    if (targets.empty()) throw ValidationError("--targets is empty");
    const bool use_smst = method_arg == "smst";
    const bool fallback_smst = fallback_arg == "smst";

    const SmstCalibration cal = smst_calibrate(*model, cfg.smst_samples);
    MagnetState plant = MagnetState::saturated(*model, +1);
    plant.apply_field(0.0);
    MagnetState predicted = plant;

    std::ofstream os(out);
    if (!os) throw IoError("cannot write " + out);
    os << "# " << meta_line("tune", cfg) << "\n";
    os << "step,method,target_t,h_cp_am,achieved_t,error_t,energy_j\n";
    if (cal.exact_fit)
        os << "# note: two-point corner-point calibration, residual zero by "
              "construction\n";
    for (std::size_t k = 0; k < targets.size(); ++k) {
        TuningPlan plan;
        if (use_smst) {
            plan = smst_plan(targets[k], predicted, cal);
        } else {
            try {
                plan = emst_plan(targets[k], predicted, *model, cfg.tol_b);
            } catch (const UnreachableTargetError& e) {
                if (!fallback_smst) throw;
                os << "# step " << k << ": EMST fallback to SMST (" << e.what()
                   << ")\n";
                plan = smst_plan(targets[k], predicted, cal);
            }
        }
        const ExecutionResult res = execute_plan(plan, plant);
        execute_plan(plan, predicted);
        const EnergyReport energy = plan_energy(plan, cfg.waveform, cfg.coil);
        const double h_cp =
            plan.setpoints.size() >= 2 ? plan.setpoints[plan.setpoints.size() - 2] : 0.0;
        os << k << "," << method_name(plan.method) << "," << fmt_num(targets[k]) << ","
           << fmt_num(h_cp) << "," << fmt_num(res.achieved_b) << ","
           << fmt_num(res.error_b) << "," << fmt_num(energy.total_j) << "\n";
        std::istringstream plan_text(plan_to_text(plan));
        std::string line;
        while (std::getline(plan_text, line)) os << "# " << line << "\n";
    }
    if (!os) throw IoError("write failure on " + out);
    return 0;
}

int cmd_actuator(const std::string& config_path, const std::string& mode_arg,
                 const std::string& positions_arg, const std::string& out, int segments,
                 int flux_points) {
    const RunConfig cfg = load_config(config_path);
    const ActuatorMode mode = mode_arg == "tma" ? ActuatorMode::Tma : ActuatorMode::Htma;
    const std::vector<double> positions = parse_list(positions_arg);
    for (double x : positions)
        if (std::abs(x) > cfg.geometry.x_range)
            throw ValidationError("position " + fmt_num(x) + " m outside travel +-" +
                                  fmt_num(cfg.geometry.x_range) + " m");

    CsvWriter w(out, meta_line("actuator", cfg), {"x_m", "phi_tm_Wb", "force_N"});
    const auto samples =
        sweep_force_map(mode, cfg.geometry, positions, -cfg.magnet.b_r_max,
                        cfg.magnet.b_r_max, flux_points);
    for (const auto& s : samples) w.row({s.x, s.phi_tm, s.force});
    w.close();
    if (!samples.empty()) {
        std::vector<double> distinct = positions;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        segments = std::min<int>(segments, static_cast<int>(distinct.size()));
        const ForceFit fit = fit_piecewise_linear(samples, segments);
        const std::string text = force_fit_to_text(fit);
        std::ofstream fit_os(out + ".fit");
        if (!fit_os) throw IoError("cannot write " + out + ".fit");
        fit_os << "# " << meta_line("actuator", cfg) << "\n" << text;
        std::fputs(text.c_str(), stdout);
    }
    return 0;
}

int cmd_bench(const std::string& config_path, long seed, int sequences, int length,
              const std::string& format, const std::string& out) {
    RunConfig cfg = load_config(config_path);
    if (seed >= 0) cfg.bench.rng_seed = static_cast<std::uint64_t>(seed);
    if (sequences > 0) cfg.bench.n_sequences = sequences;
    if (length > 0) cfg.bench.seq_length = length;

    const GaussianPreisachModel model(cfg.magnet);
    const ComparisonReport report =
        run_comparison(cfg.bench, model, cfg.waveform, cfg.coil, cfg.canonical_text());

    std::string body;
    if (format == "json") {
        body = report_json(report);
    } else if (format == "csv") {
        body = "# " + meta_line("bench", cfg) + "\n" + report_csv(report);
    } else {
        body = "# " + meta_line("bench", cfg) + "\n" + report_table(report);
    }
    if (out.empty()) {
        std::fputs(body.c_str(), stdout);
    } else {
        std::ofstream os(out);
        if (!os) throw IoError("cannot write " + out);
        os << body;
        if (!os) throw IoError("write failure on " + out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tunable-magnet actuator toolkit"};
    app.require_subcommand(1);

    std::string config_path, sequence, model_path, out, forc_path;
    std::string method = "emst", fallback = "smst", mode = "htma", format = "table";
    std::string targets, positions;
    int resolution = 200, grid = 201, segments = 5, flux_points = 41;
    int sequences = 0, length = 0;
    long seed = -1;

    auto* sim = app.add_subcommand("simulate", "replay a field sequence, emit a B trace");
    sim->add_option("--config", config_path, "run configuration file");
    sim->add_option("--sequence", sequence,
                    "comma list of fields (A/m) or CSV with column h");
    sim->add_option("--model", model_path, "model file overriding the configured magnet");
    sim->add_option("--resolution", resolution, "sweep samples per h_sat of field change");
    sim->add_option("--out", out, "output CSV path")->required();

    auto* ident = app.add_subcommand("identify", "build a model from measured FORC data");
    ident->add_option("--forc", forc_path, "FORC CSV (h_reversal,h,b)")->required();
    ident->add_option("--grid", grid, "Everett grid nodes per axis");
    ident->add_option("--out", out, "output model file")->required();

    auto* tune = app.add_subcommand("tune", "plan and execute MS tuning steps");
    tune->add_option("--config", config_path, "run configuration file");
    tune->add_option("--method", method, "smst or emst")
        ->check(CLI::IsMember({"smst", "emst"}));
    tune->add_option("--targets", targets, "comma list of target MSs (T)")->required();
    tune->add_option("--fallback", fallback, "EMST unreachable-target policy")
        ->check(CLI::IsMember({"error", "smst"}));
    tune->add_option("--model", model_path, "model file overriding the configured magnet");
    tune->add_option("--out", out, "output report CSV")->required();

    auto* act = app.add_subcommand("actuator", "force map over positions and fluxes");
    act->add_option("--config", config_path, "run configuration file");
    act->add_option("--mode", mode, "tma or htma")->check(CLI::IsMember({"tma", "htma"}));
    act->add_option("--positions", positions, "comma list of mover positions (m)");
    act->add_option("--segments", segments, "piece-wise fit segment count");
    act->add_option("--flux-points", flux_points, "remanence grid points per position");
    act->add_option("--out", out, "output CSV path")->required();

    auto* bench = app.add_subcommand("bench", "tuning-method comparison benchmark");
    bench->add_option("--config", config_path, "run configuration file");
    bench->add_option("--seed", seed, "RNG seed override");
    bench->add_option("--sequences", sequences, "sequence count override");
    bench->add_option("--length", length, "targets per sequence override");
    bench->add_option("--format", format, "table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    bench->add_option("--out", out, "output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, sequence, model_path, out, resolution);
        if (ident->parsed()) return cmd_identify(forc_path, grid, out);
        if (tune->parsed())
            return cmd_tune(config_path, method, targets, fallback, model_path, out);
        if (act->parsed())
            return cmd_actuator(config_path, mode, positions, out, segments, flux_points);
        if (bench->parsed())
            return cmd_bench(config_path, seed, sequences, length, format, out);
    } catch (const tmag::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const tmag::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const tmag::StateError& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    } catch (const tmag::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
