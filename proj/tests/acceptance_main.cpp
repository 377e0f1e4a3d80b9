// Acceptance suite: every release criterion as one timed pass/fail line.
// Exits nonzero when any criterion fails. Needs TMAG_CLI pointing at the
// built tmag binary for the determinism checks.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "relay_grid.hpp"
#include "test_util.hpp"
#include "tmag/actuator.hpp"
#include "tmag/bench.hpp"
#include "tmag/config.hpp"
#include "tmag/forc.hpp"
#include "tmag/rng.hpp"
#include "tmag/table_model.hpp"
#include "tmag/tuning.hpp"

using namespace tmag;
using tmag::testing::default_model;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    double seconds = 0.0;
};

struct Check {
    bool ok = true;
    std::ostringstream msg;
    long failures = 0;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (failures < 3) msg << (failures ? "; " : "") << what;
            ++failures;
        }
    }
    std::string detail() const {
        return ok ? msg.str() : msg.str() + " (" + std::to_string(failures) + " failures)";
    }
};

std::string fmt(double v, const char* unit = "") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g%s", v, unit);
    return buf;
}

// ---- C1: hysteresis property suite --------------------------------------

Outcome c1_properties() {
    const auto& m = default_model();
    const double hs = m.h_sat();
    const double tol = 1e-9 * m.b_sat();
    Rng rng(101);
    Check c;

    for (int trial = 0; trial < 1000; ++trial) {
        const int origin = rng.uniform() < 0.5 ? -1 : +1;
        const int len = 1 + static_cast<int>(rng.uniform() * 12);
        std::vector<double> seq(len);
        for (double& h : seq)
            h = rng.uniform() < 0.08 ? (rng.uniform() < 0.5 ? -1.1 : 1.1) * hs
                                     : rng.uniform(-0.92 * hs, 0.92 * hs);

        // Bounds, sweep direction and rate independence along the sequence.
        MagnetState direct = MagnetState::saturated(m, origin);
        MagnetState split = MagnetState::saturated(m, origin);
        for (double h : seq) {
            const double before = direct.b();
            const bool up = h > direct.h();
            direct.apply_field(h);
            c.expect(std::abs(direct.b()) <= m.b_sat() * (1 + 1e-12), "bounds");
            c.expect(up ? direct.b() >= before - 1e-12 : direct.b() <= before + 1e-12,
                     "sweep monotonicity");
            const double from = split.h();
            split.apply_field(from + 0.5 * (h - from));
            split.apply_field(h);
            split.apply_field(h);
        }
        c.expect(direct.stack() == split.stack() && direct.b() == split.b(),
                 "rate independence");

        // Loop closure at a reversal made from the current state.
        MagnetState probe = direct;
        const double h1 = rng.uniform(-0.85 * hs, 0.85 * hs);
        probe.apply_field(h1);
        const double b1 = probe.b();
        const MemoryStack stack1 = probe.stack();
        const int arrive = stack1.segment_direction(h1);
        const double h2 = h1 - arrive * rng.uniform(1e3, 80e3);
        if (std::abs(h2) < 0.95 * hs) {
            probe.apply_field(h2);
            if (!probe.stack().empty() && probe.stack().top() == h1) {
                probe.apply_field(h1);
                c.expect(std::abs(probe.b() - b1) <= tol, "loop closure");
                c.expect(probe.stack() == stack1, "loop closure stack");
            }
        }

        // Wiping out: a dominated reversal pair never matters afterwards.
        {
            const double outer = rng.uniform(0.3 * hs, 0.9 * hs);
            const double inner_min = rng.uniform(-0.2 * hs, 0.2 * hs);
            const double inner_max = rng.uniform(inner_min + 0.02 * hs, outer - 0.01 * hs);
            const double past = rng.uniform(inner_max + 0.005 * hs, outer);
            MagnetState with_loop = MagnetState::saturated(m, -1);
            with_loop.apply_field(outer);
            with_loop.apply_field(inner_min);
            with_loop.apply_field(inner_max);
            with_loop.apply_field(inner_min + 1.0); // sit on the inner branch
            with_loop.apply_field(past);            // wipes the inner pair
            MagnetState without_loop = MagnetState::saturated(m, -1);
            without_loop.apply_field(outer);
            without_loop.apply_field(inner_min);
            without_loop.apply_field(past);
            c.expect(with_loop.stack() == without_loop.stack() &&
                         with_loop.b() == without_loop.b(),
                     "wiping out");
        }

        // Congruency: the same loop leg from two different histories.
        if (trial % 4 == 0) {
            const double h_a = rng.uniform(-0.7 * hs, 0.5 * hs);
            const double h_b = rng.uniform(h_a + 0.02 * hs, 0.8 * hs);
            auto leg = [&](MagnetState s) {
                s.apply_field(0.88 * hs); // arrive at h_a from above
                s.apply_field(h_a);
                const double b_a = s.b();
                s.apply_field(h_b);
                return s.b() - b_a;
            };
            const double d1 = leg(direct);
            MagnetState other = MagnetState::saturated(m, rng.uniform() < 0.5 ? -1 : 1);
            other.apply_field(rng.uniform(-0.5 * hs, 0.5 * hs));
            const double d2 = leg(other);
            c.expect(std::abs(d1 - d2) <= tol, "congruency");
        }
    }
    return {c.ok, c.detail(), 0.0};
}

// ---- C2: relay-grid oracle equivalence ----------------------------------

Outcome c2_oracle() {
    const auto& m = default_model();
    testing::RelayGrid grid(m.shape(), true);
    Rng rng(202);
    Check c;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int origin = rng.uniform() < 0.5 ? -1 : +1;
        MagnetState state = MagnetState::saturated(m, origin);
        grid.saturate(origin);
        const int len = 1 + static_cast<int>(rng.uniform() * 8);
        for (int i = 0; i < len; ++i) {
            const double h = rng.uniform() < 0.1
                                 ? (rng.uniform() < 0.5 ? -1.0 : 1.0) * 1.05 * m.h_sat()
                                 : rng.uniform(-0.95 * m.h_sat(), 0.95 * m.h_sat());
            state.apply_field(h);
            grid.apply(h);
        }
        worst = std::max(worst, std::abs(state.b() - grid.flux(state.h())));
    }
    c.expect(worst <= 1e-6 * m.b_sat(), "oracle deviation " + fmt(worst, " T"));
    return {c.ok, "worst |model - relay grid| = " + fmt(worst, " T"), 0.0};
}

// ---- C3: corner-point solver --------------------------------------------

Outcome c3_solver() {
    const auto& m = default_model();
    const double tol_b = 1e-4;
    Rng rng(303);
    Check c;
    double worst = 0.0, worst_cp = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        MagnetState state = tmag::testing::random_state(rng, m, 6);
        state.apply_field(0.0);
        const double target = rng.uniform(-0.98, 0.98) * m.remanence_sat();
        const TuningPlan plan = emst_plan(target, state, m, tol_b);
        for (double sp : plan.setpoints) worst_cp = std::max(worst_cp, std::abs(sp));
        MagnetState plant = state;
        const ExecutionResult res = execute_plan(plan, plant);
        worst = std::max(worst, std::abs(res.error_b));
    }
    c.expect(worst <= tol_b, "solver error " + fmt(worst, " T"));
    c.expect(worst_cp < m.h_sat(), "setpoint " + fmt(worst_cp, " A/m"));
    return {c.ok,
            "worst |achieved - target| = " + fmt(worst, " T") + ", max |setpoint| = " +
                fmt(worst_cp, " A/m") + " < h_sat",
            0.0};
}

// ---- C4: saturation-plan structure --------------------------------------

Outcome c4_plan_structure() {
    const auto& m = default_model();
    const SmstCalibration cal = smst_calibrate(m, 21);
    Rng rng(404);
    Check c;
    SmstPlanner planner(m, cal);
    int ups = 0, downs = 0;
    for (int i = 0; i < 400; ++i) {
        const double target = rng.uniform(-1.1, 1.1);
        const double current = planner.predicted().remanence_now();
        const TuningPlan plan = planner.plan_and_advance(target);
        if (target > current) {
            ++ups;
            c.expect(plan.setpoints.front() == m.h_sat(), "up-step saturation first");
            c.expect(plan.setpoints.size() >= 2 && plan.setpoints[1] <= 0.0,
                     "up-step corner sign");
        } else if (target < current) {
            ++downs;
            for (double sp : plan.setpoints)
                c.expect(sp < m.h_sat(), "down-step must not saturate");
        }
        c.expect(plan.setpoints.back() == 0.0, "plans end at zero");
    }
    return {c.ok, std::to_string(ups) + " up-steps saturate, " + std::to_string(downs) +
                      " down-steps do not",
            0.0};
}

// ---- C5 & C6: benchmark energy and accuracy -----------------------------

struct BenchOutcomes {
    Outcome energy;
    Outcome protocol;
};

BenchOutcomes bench_criteria() {
    const RunConfig rc = RunConfig::defaults();
    const GaussianPreisachModel model(rc.magnet);
    BenchOutcomes out;

    // Default protocol run, timed on its own for the runtime bound.
    const auto t0 = std::chrono::steady_clock::now();
    const ComparisonReport rep =
        run_comparison(rc.bench, model, rc.waveform, rc.coil, rc.canonical_text());
    const double run_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    {
        Check c;
        // Paired per-step ordering on every saturating up-step.
        for (const auto& st : rep.steps) {
            if (st.method != Method::Smst || !st.up_step) continue;
            for (const auto& other : rep.steps)
                if (other.method == Method::Emst && other.sequence == st.sequence &&
                    other.step == st.step)
                    c.expect(other.energy_j < st.energy_j, "up-step energy ordering");
        }
        const double ratio = rep.emst.mean_e_tune_j / rep.smst.mean_e_tune_j;
        c.expect(ratio <= 0.5, "mean energy ratio " + fmt(ratio));
        // Pinned regression value from the first calibrated run.
        c.expect(std::abs(ratio - 0.1121) <= 0.015,
                 "energy ratio regression " + fmt(ratio) + " vs pinned 0.1121");
        out.energy = {c.ok,
                      "mean E_tune EMST/SMST = " + fmt(ratio) + " (EMST " +
                          fmt(rep.emst.mean_e_tune_j, " J") + ", SMST " +
                          fmt(rep.smst.mean_e_tune_j, " J") + ")",
                      0.0};
    }

    {
        Check c;
        const double smst_mt = 1e3 * rep.smst.rmse_mean_t;
        const double emst_mt = 1e3 * rep.emst.rmse_mean_t;
        c.expect(run_seconds < 120.0, "runtime " + fmt(run_seconds, " s"));
        c.expect(smst_mt >= 4.0 && smst_mt <= 5.6,
                 "SMST RMSE " + fmt(smst_mt, " mT") + " outside 4.8 +- 0.8 mT");
        // Pinned regression values at the calibrated default seed.
        c.expect(std::abs(smst_mt - 4.8067) <= 0.5,
                 "SMST regression " + fmt(smst_mt, " mT"));
        c.expect(std::abs(emst_mt - 4.9006) <= 0.5,
                 "EMST regression " + fmt(emst_mt, " mT"));

        // Directional claims over 21 seeds: median EMST RMSE at or above the
        // median SMST RMSE, strictly lower energy on every seed.
        std::vector<double> smst_all, emst_all;
        bool energy_lower_everywhere = true;
        for (std::uint64_t seed = 1; seed <= 21; ++seed) {
            BenchConfig cfg = rc.bench;
            cfg.rng_seed = seed;
            const ComparisonReport r =
                run_comparison(cfg, model, rc.waveform, rc.coil, "seed sweep");
            smst_all.push_back(r.smst.rmse_mean_t);
            emst_all.push_back(r.emst.rmse_mean_t);
            energy_lower_everywhere &= r.emst.mean_e_tune_j < r.smst.mean_e_tune_j;
        }
        std::sort(smst_all.begin(), smst_all.end());
        std::sort(emst_all.begin(), emst_all.end());
        const double med_smst = smst_all[smst_all.size() / 2];
        const double med_emst = emst_all[emst_all.size() / 2];
        c.expect(med_emst >= med_smst, "median EMST " + fmt(1e3 * med_emst, " mT") +
                                           " < median SMST " + fmt(1e3 * med_smst, " mT"));
        c.expect(energy_lower_everywhere, "energy ordering broke on some seed");
        out.protocol = {c.ok,
                        "SMST " + fmt(smst_mt, " mT") + ", EMST " + fmt(emst_mt, " mT") +
                            ", medians over 21 seeds " + fmt(1e3 * med_smst, " mT") +
                            " / " + fmt(1e3 * med_emst, " mT") + ", default run " +
                            fmt(run_seconds, " s"),
                        0.0};
    }
    return out;
}

// ---- C7: force-flux linearity -------------------------------------------

Outcome c7_linearity() {
    const HtmaGeometry g;
    Check c;
    double worst_r2 = 1.0, worst_fd = 0.0, worst_an = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double x = -g.x_range + 2.0 * g.x_range * i / 10; // 500 um travel
        std::vector<double> phi, force;
        for (int k = 0; k <= 40; ++k) {
            const FluxSolution sol = solve_circuit_htma(g, -1.5 + 3.0 * k / 40, x);
            phi.push_back(sol.phi_tm);
            force.push_back(force_htma(sol, g));
        }
        const int n = static_cast<int>(phi.size());
        double sp = 0, sf = 0, spp = 0, spf = 0, sff = 0;
        for (int k = 0; k < n; ++k) {
            sp += phi[k];
            sf += force[k];
            spp += phi[k] * phi[k];
            spf += phi[k] * force[k];
            sff += force[k] * force[k];
        }
        const double det = n * spp - sp * sp;
        const double slope = (n * spf - sp * sf) / det;
        const double icept = (sf - slope * sp) / n;
        double ss_res = 0;
        const double f_mean = sf / n;
        const double ss_tot = sff - n * f_mean * f_mean;
        for (int k = 0; k < n; ++k) {
            const double r = force[k] - slope * phi[k] - icept;
            ss_res += r * r;
        }
        const double r2 = 1.0 - ss_res / ss_tot;
        worst_r2 = std::min(worst_r2, r2);
        c.expect(r2 >= 0.999, "r2 " + fmt(r2) + " at x " + fmt(x, " m"));

        // Slope against central finite differences of the solver.
        const FluxSolution lo = solve_circuit_htma(g, -0.01, x);
        const FluxSolution hi = solve_circuit_htma(g, +0.01, x);
        const double fd =
            (force_htma(hi, g) - force_htma(lo, g)) / (hi.phi_tm - lo.phi_tm);
        worst_fd = std::max(worst_fd, std::abs(slope - fd) / std::abs(fd));
        c.expect(std::abs(slope - fd) <= 0.005 * std::abs(fd), "k_m vs dF/dphi");

        // Slope against the difference-of-squares constant 2 phi_b/(mu0 A).
        const FluxSolution bias = solve_circuit_htma(g, 0.0, x);
        const double phi_b = 0.5 * (bias.phi_g1 - bias.phi_g2);
        const double analytic = 2.0 * phi_b / (kMu0 * g.a_gap);
        worst_an = std::max(worst_an, std::abs(slope - analytic) / analytic);
        c.expect(std::abs(slope - analytic) <= 0.01 * analytic, "k_m vs analytic");
    }

    // The plain C-shape stays quadratic to machine precision.
    std::vector<double> phi, force;
    for (int k = 0; k <= 40; ++k) {
        const FluxSolution sol = solve_circuit_tma(g, -1.5 + 3.0 * k / 40, 0.0);
        phi.push_back(sol.phi_tm);
        force.push_back(force_tma(sol, g));
    }
    double num = 0, den = 0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        num += force[k] * phi[k] * phi[k];
        den += phi[k] * phi[k] * phi[k] * phi[k];
    }
    const double a = num / den;
    double worst_quad = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k)
        if (force[k] > 0)
            worst_quad = std::max(worst_quad,
                                  std::abs(force[k] - a * phi[k] * phi[k]) / force[k]);
    c.expect(worst_quad <= 1e-9, "quadratic residual " + fmt(worst_quad));

    return {c.ok,
            "min r2 = " + fmt(worst_r2) + ", k_m off by " + fmt(1e2 * worst_fd, "%") +
                " (FD) / " + fmt(1e2 * worst_an, "%") +
                " (analytic), TMA quad residual " + fmt(worst_quad),
            0.0};
}

// ---- C8: energy consistency of the circuit solver -----------------------

Outcome c8_coenergy() {
    const HtmaGeometry g;
    const double dx = 1e-9;
    Check c;
    double worst = 0.0;
    for (double b_r : {-1.2, 0.0, 0.6, 1.5}) {
        for (int i = 0; i <= 8; ++i) {
            const double x = -g.x_range + 2.0 * g.x_range * i / 8;
            const double f_h = force_htma(solve_circuit_htma(g, b_r, x), g);
            const double fd_h =
                (coenergy_htma(g, b_r, x + dx) - coenergy_htma(g, b_r, x - dx)) /
                (2.0 * dx);
            const double rel_h = std::abs(fd_h - f_h) / std::max(std::abs(f_h), 1e-9);
            worst = std::max(worst, rel_h);
            c.expect(rel_h <= 1e-3, "HTMA co-energy at x " + fmt(x));
            const double f_t = force_tma(solve_circuit_tma(g, b_r, x), g);
            const double fd_t =
                (coenergy_tma(g, b_r, x + dx) - coenergy_tma(g, b_r, x - dx)) /
                (2.0 * dx);
            const double rel_t =
                std::abs(fd_t - f_t) / std::max(std::abs(f_t), 1e-9);
            if (std::abs(f_t) > 1e-9) {
                worst = std::max(worst, rel_t);
                c.expect(rel_t <= 1e-3, "TMA co-energy at x " + fmt(x));
            }
        }
    }
    return {c.ok, "worst |F - dW/dx|/F = " + fmt(worst), 0.0};
}

// ---- C9: determinism and identification round trip ----------------------

Outcome c9_determinism() {
    Check c;

    // Byte-identical reports through the CLI for one config and seed.
    const char* cli = std::getenv("TMAG_CLI");
    c.expect(cli != nullptr, "TMAG_CLI not set");
    if (cli) {
        auto slurp = [](const std::string& p) {
            std::ifstream in(p);
            std::ostringstream os;
            os << in.rdbuf();
            return os.str();
        };
        const std::string base = std::string(cli) +
                                 " bench --sequences 3 --length 4 --seed 11 "
                                 "--format json --out ";
        c.expect(std::system((base + "acc_b1.json >/dev/null 2>&1").c_str()) == 0,
                 "bench run 1");
        c.expect(std::system((base + "acc_b2.json >/dev/null 2>&1").c_str()) == 0,
                 "bench run 2");
        const std::string r1 = slurp("acc_b1.json"), r2 = slurp("acc_b2.json");
        c.expect(!r1.empty() && r1 == r2, "reports not byte-identical");
        std::remove("acc_b1.json");
        std::remove("acc_b2.json");
    }

    // Identification round trip within 2e-3 b_sat over random histories.
    const auto& m = default_model();
    const ForcTable table = sample_forc(m, 251, 601);
    const IdentifiedModel ident = identify_from_forc(table, 401);
    Rng rng(909);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        MagnetState a = MagnetState::saturated(m, +1);
        MagnetState b = MagnetState::saturated(ident.model, +1);
        for (double h : tmag::testing::random_sequence(rng, 10, true)) {
            a.apply_field(h);
            b.apply_field(h);
            worst = std::max(worst, std::abs(a.b() - b.b()));
        }
    }
    c.expect(worst <= 2e-3 * m.b_sat(), "round trip " + fmt(worst, " T"));
    return {c.ok, "identify round trip worst = " + fmt(worst, " T"), 0.0};
}

int report(const char* name, const char* title, Outcome (*fn)()) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = fn();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s %s (%.1f s)%s%s\n", out.pass ? "PASS" : "FAIL", name, title,
                out.seconds, out.detail.empty() ? "" : " -- ", out.detail.c_str());
    std::fflush(stdout);
    return out.pass ? 0 : 1;
}

} // namespace

int main() {
    int failures = 0;
    failures += report("C1", "hysteresis memory properties (1000 sequences)",
                       c1_properties);
    failures += report("C2", "relay-grid oracle equivalence (100 histories, grid 2001)",
                       c2_oracle);
    failures += report("C3", "corner-point solver accuracy (1000 targets)", c3_solver);
    failures += report("C4", "saturation-plan structure", c4_plan_structure);

    // C5/C6 share the default benchmark run.
    static BenchOutcomes bo;
    const auto t0 = std::chrono::steady_clock::now();
    bool bench_threw = false;
    std::string bench_err;
    try {
        bo = bench_criteria();
    } catch (const std::exception& e) {
        bench_threw = true;
        bench_err = e.what();
    }
    const double bench_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (bench_threw) {
        std::printf("[FAIL] C5 tuning energy ordering (%.1f s) -- exception: %s\n",
                    bench_secs, bench_err.c_str());
        std::printf("[FAIL] C6 comparison protocol (%.1f s) -- exception: %s\n",
                    bench_secs, bench_err.c_str());
        failures += 2;
    } else {
        std::printf("[%s] C5 tuning energy ordering (%.1f s) -- %s\n",
                    bo.energy.pass ? "PASS" : "FAIL", bench_secs,
                    bo.energy.detail.c_str());
        std::printf("[%s] C6 comparison protocol, 20 sequences x 10 targets -- %s\n",
                    bo.protocol.pass ? "PASS" : "FAIL", bo.protocol.detail.c_str());
        failures += (bo.energy.pass ? 0 : 1) + (bo.protocol.pass ? 0 : 1);
    }
    std::fflush(stdout);

    failures += report("C7", "hybrid force-flux linearity across 500 um travel",
                       c7_linearity);
    failures += report("C8", "maxwell force vs co-energy derivative", c8_coenergy);
    failures += report("C9", "report determinism and identification round trip",
                       c9_determinism);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
