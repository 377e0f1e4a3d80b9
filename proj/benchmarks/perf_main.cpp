// Timing comparison of the OpenMP kernels against their serial reference
// paths: the relay-grid sweep, the benchmark sequence runner and the Everett
// table sampler. Build and run manually:
//   cmake --build build --target tmag_perf && ./build/benchmarks/tmag_perf
#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "relay_grid.hpp"
#include "tmag/bench.hpp"
#include "tmag/config.hpp"
#include "tmag/table_model.hpp"

using namespace tmag;

namespace {

double time_once(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-34s %9.3f s %9.3f s %8.2fx\n", name, serial, parallel,
                serial / parallel);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both columns run the serial path\n");
#endif
    std::printf("%-34s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    const RunConfig rc = RunConfig::defaults();
    const GaussianPreisachModel model(rc.magnet);

    {
        const std::vector<double> fields = {350e3, -180e3, 240e3, -90e3,
                                            130e3, -300e3, 60e3,  0.0};
        testing::RelayGrid grid(rc.magnet, false);
        auto sweep = [&](bool parallel) {
            grid.set_parallel(parallel);
            double sink = 0.0;
            for (int rep = 0; rep < 12; ++rep) {
                grid.saturate(rep % 2 ? -1 : +1);
                for (double h : fields) grid.apply(h);
                sink += grid.flux(0.0);
            }
            return sink;
        };
        const double ts = time_once([&] { sweep(false); });
        const double tp = time_once([&] { sweep(true); });
        row("relay grid, 12 histories (2001^2)", ts, tp);
    }

    {
        // Zero mismatch skips the shared plant-table build, leaving the
        // planner/solver work that the sequence loop parallelizes.
        BenchConfig cfg = rc.bench;
        cfg.n_sequences = 24;
        cfg.mismatch_sigma = 0.0;
        auto run = [&](bool parallel) {
            cfg.parallel = parallel;
            return run_comparison(cfg, model, rc.waveform, rc.coil, "perf");
        };
        const double ts = time_once([&] { run(false); });
        const double tp = time_once([&] { run(true); });
        row("method comparison, 24 sequences", ts, tp);
    }

    {
        auto sample = [&](int threads) {
#ifdef _OPENMP
            omp_set_num_threads(threads);
#else
            (void)threads;
#endif
            TableModel::from_model(model, 801);
        };
        const double ts = time_once([&] { sample(1); });
        double tp;
#ifdef _OPENMP
        tp = time_once([&] { sample(omp_get_num_procs()); });
        omp_set_num_threads(omp_get_num_procs());
#else
        tp = time_once([&] { sample(1); });
#endif
        row("everett table sampling (801)", ts, tp);
    }
    return 0;
}
