#pragma once

#include <cstdint>
#include <string>

#include "tmag/actuator.hpp"
#include "tmag/bench.hpp"
#include "tmag/energy.hpp"
#include "tmag/hysteresis.hpp"

namespace tmag {

// Effective run configuration: sections [magnet], [coil], [geometry],
// [tuning], [bench]. Every documented default lives in the member
// initializers of the referenced structs; files override, unknown keys are
// rejected, and a top-level format_version = 1 is required.
struct RunConfig {
    GaussianShape magnet;
    CoilParams coil;       // l_m follows geometry.l_m unless set explicitly
    PulseWaveform waveform;
    HtmaGeometry geometry;
    double tol_b = 1e-4;   // [tuning]
    int smst_samples = 21; // [tuning]
    BenchConfig bench;

    static RunConfig defaults();
    static RunConfig load(const std::string& path);

    // Every effective value as sorted key = value lines; hashed into output
    // metadata so result files identify their configuration.
    std::string canonical_text() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;
};

std::uint64_t fnv1a64(const std::string& text);

} // namespace tmag
