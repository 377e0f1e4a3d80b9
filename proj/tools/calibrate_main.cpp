// Maintenance tool: re-derives the default mismatch_sigma by bisecting the
// plant perturbation level until the SMST benchmark RMSE hits the requested
// anchor at the default seed. Run after changing the magnet defaults and
// copy the printed value into BenchConfig::mismatch_sigma.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "tmag/bench.hpp"
#include "tmag/config.hpp"

using namespace tmag;

int main(int argc, char** argv) {
    double anchor = 4.8e-3; // T
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--anchor" && i + 1 < argc)
            anchor = std::atof(argv[++i]);
        else if (arg == "--config" && i + 1 < argc)
            config_path = argv[++i];
        else {
            std::fprintf(stderr, "usage: tmag_calibrate [--config FILE] [--anchor T]\n");
            return 1;
        }
    }
    try {
        const RunConfig rc =
            config_path.empty() ? RunConfig::defaults() : RunConfig::load(config_path);
        const GaussianPreisachModel model(rc.magnet);
        auto smst_rmse = [&](double sigma) {
            BenchConfig cfg = rc.bench;
            cfg.mismatch_sigma = sigma;
            const ComparisonReport rep =
                run_comparison(cfg, model, rc.waveform, rc.coil, rc.canonical_text());
            return rep.smst.rmse_mean_t;
        };
        double lo = 0.0, hi = 0.05;
        while (smst_rmse(hi) < anchor) {
            hi *= 2.0;
            if (hi > 2.0) {
                std::fprintf(stderr, "anchor unreachable below sigma = 2\n");
                return 3;
            }
        }
        for (int it = 0; it < 30 && hi - lo > 1e-6; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double r = smst_rmse(mid);
            std::printf("sigma=%.6f  smst_rmse=%.4f mT\n", mid, 1e3 * r);
            (r < anchor ? lo : hi) = mid;
        }
        std::printf("calibrated mismatch_sigma = %.5f\n", 0.5 * (lo + hi));
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
