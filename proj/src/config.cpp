#include "tmag/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "tmag/csv.hpp"
#include "tmag/ini.hpp"

namespace tmag {

RunConfig RunConfig::defaults() {
    RunConfig cfg;
    cfg.coil.l_m = cfg.geometry.l_m;
    cfg.bench.tol_b = cfg.tol_b;
    cfg.bench.smst_samples = cfg.smst_samples;
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    const IniDoc doc = IniDoc::parse_file(path);
    RunConfig cfg = defaults();

    const std::string* version = doc.get("", "format_version");
    if (!version) throw ValidationError(path + ": missing format_version");
    if (*version != "1")
        throw ValidationError(path + ": unsupported format_version " + *version);

    auto& m = cfg.magnet;
    m.b_r_max = doc.get_double("magnet", "b_r_max", m.b_r_max);
    m.b_sat = doc.get_double("magnet", "b_sat", m.b_sat);
    m.h_sat = doc.get_double("magnet", "h_sat", m.h_sat);
    m.h_c = doc.get_double("magnet", "h_c", m.h_c);
    m.sigma_c = doc.get_double("magnet", "sigma_c", m.sigma_c);
    m.sigma_u = doc.get_double("magnet", "sigma_u", m.sigma_u);
    m.u_cut = doc.get_double("magnet", "u_cut", m.u_cut);
    m.h_clip_factor = doc.get_double("magnet", "h_clip_factor", m.h_clip_factor);
    m.grid_n = static_cast<int>(doc.get_long("magnet", "grid_n", m.grid_n));
    m.validate();

    auto& g = cfg.geometry;
    g.a_gap = doc.get_double("geometry", "a_gap", g.a_gap);
    g.g0 = doc.get_double("geometry", "g0", g.g0);
    g.l_m = doc.get_double("geometry", "l_m", g.l_m);
    g.a_m = doc.get_double("geometry", "a_m", g.a_m);
    g.mu_rec = doc.get_double("geometry", "mu_rec", g.mu_rec);
    g.n_gaps = static_cast<int>(doc.get_long("geometry", "n_gaps", g.n_gaps));
    g.b_r_bias = doc.get_double("geometry", "b_r_bias", g.b_r_bias);
    g.l_bias = doc.get_double("geometry", "l_bias", g.l_bias);
    g.a_bias = doc.get_double("geometry", "a_bias", g.a_bias);
    g.x_range = doc.get_double("geometry", "x_range", g.x_range);
    g.validate();

    auto& c = cfg.coil;
    c.n_turns = doc.get_double("coil", "n_turns", c.n_turns);
    c.resistance = doc.get_double("coil", "resistance", c.resistance);
    c.l_m = doc.get_double("coil", "l_m", g.l_m);
    cfg.waveform.slew = doc.get_double("coil", "slew", cfg.waveform.slew);
    cfg.waveform.hold = doc.get_double("coil", "hold", cfg.waveform.hold);
    c.validate();
    cfg.waveform.validate();

    cfg.tol_b = doc.get_double("tuning", "tol_b", cfg.tol_b);
    cfg.smst_samples = static_cast<int>(doc.get_long("tuning", "smst_samples",
                                                     cfg.smst_samples));
    if (!(cfg.tol_b > 0)) throw ValidationError(path + ": tol_b must be positive");
    if (cfg.smst_samples < 2)
        throw ValidationError(path + ": smst_samples must be at least 2");

    auto& b = cfg.bench;
    b.n_sequences = static_cast<int>(doc.get_long("bench", "sequences", b.n_sequences));
    b.seq_length = static_cast<int>(doc.get_long("bench", "length", b.seq_length));
    b.b_lo = doc.get_double("bench", "b_lo", b.b_lo);
    b.b_hi = doc.get_double("bench", "b_hi", b.b_hi);
    b.mismatch_sigma = doc.get_double("bench", "mismatch_sigma", b.mismatch_sigma);
    b.rng_seed = static_cast<std::uint64_t>(doc.get_long("bench", "seed",
                                                         static_cast<long>(b.rng_seed)));
    b.plant_grid_n = static_cast<int>(doc.get_long("bench", "plant_grid_n",
                                                   b.plant_grid_n));
    b.tol_b = cfg.tol_b;
    b.smst_samples = cfg.smst_samples;
    b.validate(m.b_r_max);

    doc.reject_unknown({"", "magnet", "coil", "geometry", "tuning", "bench"});
    return cfg;
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    auto kv = [&os](const char* key, double v) {
        os << key << " = " << fmt_num(v) << "\n";
    };
    os << "format_version = 1\n";
    kv("bench.b_hi", bench.b_hi);
    kv("bench.b_lo", bench.b_lo);
    kv("bench.length", bench.seq_length);
    kv("bench.mismatch_sigma", bench.mismatch_sigma);
    kv("bench.plant_grid_n", bench.plant_grid_n);
    kv("bench.seed", static_cast<double>(bench.rng_seed));
    kv("bench.sequences", bench.n_sequences);
    kv("coil.hold", waveform.hold);
    kv("coil.l_m", coil.l_m);
    kv("coil.n_turns", coil.n_turns);
    kv("coil.resistance", coil.resistance);
    kv("coil.slew", waveform.slew);
    kv("geometry.a_bias", geometry.a_bias);
    kv("geometry.a_gap", geometry.a_gap);
    kv("geometry.a_m", geometry.a_m);
    kv("geometry.b_r_bias", geometry.b_r_bias);
    kv("geometry.g0", geometry.g0);
    kv("geometry.l_bias", geometry.l_bias);
    kv("geometry.l_m", geometry.l_m);
    kv("geometry.mu_rec", geometry.mu_rec);
    kv("geometry.n_gaps", geometry.n_gaps);
    kv("geometry.x_range", geometry.x_range);
    kv("magnet.b_r_max", magnet.b_r_max);
    kv("magnet.b_sat", magnet.b_sat);
    kv("magnet.grid_n", magnet.grid_n);
    kv("magnet.h_c", magnet.h_c);
    kv("magnet.h_clip_factor", magnet.h_clip_factor);
    kv("magnet.h_sat", magnet.h_sat);
    kv("magnet.sigma_c", magnet.sigma_c);
    kv("magnet.sigma_u", magnet.sigma_u);
    kv("magnet.u_cut", magnet.u_cut);
    kv("tuning.smst_samples", smst_samples);
    kv("tuning.tol_b", tol_b);
    return os.str();
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical_text()); }

std::string RunConfig::hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash());
    return buf;
}

} // namespace tmag
