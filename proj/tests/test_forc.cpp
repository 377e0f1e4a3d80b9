#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "test_util.hpp"
#include "tmag/forc.hpp"
#include "tmag/rng.hpp"

using namespace tmag;
using tmag::testing::default_model;
using tmag::testing::random_sequence;

TEST_CASE("sampled reversal curves are valid and monotone") {
    const auto& m = default_model();
    const ForcTable table = sample_forc(m, 25, 120);
    table.validate();
    CHECK(table.curves.size() == 25);
    CHECK(table.min_reversal() == -m.h_sat());
    for (const auto& cv : table.curves) {
        for (std::size_t i = 1; i < cv.b.size(); ++i)
            CHECK(cv.b[i] >= cv.b[i - 1] - 1e-12);
        CHECK(cv.h.back() == doctest::Approx(m.h_sat()));
    }
}

TEST_CASE("identified model reproduces the source within the bound") {
    const auto& m = default_model();
    const ForcTable table = sample_forc(m, 201, 501);
    const IdentifiedModel ident = identify_from_forc(table, 201);
    CHECK(ident.clip_fraction < 0.01);

    Rng rng(21);
    double worst = 0.0;
    int probes = 0;
    for (int trial = 0; trial < 100; ++trial) {
        MagnetState a = MagnetState::saturated(m, +1);
        MagnetState b = MagnetState::saturated(ident.model, +1);
        for (double h : random_sequence(rng, 10, true)) {
            a.apply_field(h);
            b.apply_field(h);
            worst = std::max(worst, std::abs(a.b() - b.b()));
            ++probes;
        }
    }
    CHECK(probes >= 100);
    CHECK(worst <= 2e-3 * m.b_sat());
}

TEST_CASE("a single reversal curve cannot be identified") {
    const auto& m = default_model();
    ForcTable table = sample_forc(m, 25, 60);
    table.curves.resize(1);
    CHECK_THROWS_AS(identify_from_forc(table, 41), IdentificationError);
}

TEST_CASE("too few curves fail with a coverage error") {
    const auto& m = default_model();
    const ForcTable table = sample_forc(m, 12, 60);
    CHECK_THROWS_WITH_AS(identify_from_forc(table, 41),
                         doctest::Contains("insufficient coverage"),
                         IdentificationError);
}

TEST_CASE("grids below 11 nodes are rejected") {
    const auto& m = default_model();
    const ForcTable table = sample_forc(m, 25, 60);
    CHECK_THROWS_AS(identify_from_forc(table, 5), ValidationError);
}

TEST_CASE("a gap at the negative end is reported") {
    const auto& m = default_model();
    ForcTable table = sample_forc(m, 30, 60);
    // Drop the deepest reversal curves: the grid can no longer be covered.
    table.curves.erase(table.curves.begin(), table.curves.begin() + 4);
    CHECK_THROWS_WITH_AS(identify_from_forc(table, 41), doctest::Contains("coverage"),
                         IdentificationError);
}

TEST_CASE("noisy data still yields a monotone surface and reports clipping") {
    const auto& m = default_model();
    ForcTable table = sample_forc(m, 41, 150);
    Rng rng(22);
    for (auto& cv : table.curves)
        for (double& b : cv.b) b += rng.gaussian(0.0, 2e-3);
    const IdentifiedModel ident = identify_from_forc(table, 61);
    CHECK(ident.clip_fraction > 0.0);
    const TableModel& t = ident.model;
    for (int p = 1; p < t.grid_n(); ++p) {
        for (int q = 1; q <= p; ++q) {
            CHECK(t.node(p, q) <= t.node(p, q - 1) + 1e-12);   // nonincreasing in beta
            if (q < p) CHECK(t.node(p, q) >= t.node(p - 1, q) - 1e-12); // nondecreasing in alpha
        }
    }
}

TEST_CASE("CSV round trip preserves the table") {
    const auto& m = default_model();
    const ForcTable table = sample_forc(m, 21, 40);
    const std::string path = "forc_roundtrip_test.csv";
    save_forc_csv(table, path, "test");
    const ForcTable loaded = load_forc_csv(path);
    REQUIRE(loaded.curves.size() == table.curves.size());
    for (std::size_t c = 0; c < table.curves.size(); ++c) {
        CHECK(loaded.curves[c].h_reversal == table.curves[c].h_reversal);
        CHECK(loaded.curves[c].h == table.curves[c].h);
        CHECK(loaded.curves[c].b == table.curves[c].b);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_forc_csv("does_not_exist.csv"), IoError);
}
