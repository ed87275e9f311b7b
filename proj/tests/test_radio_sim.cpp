#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anvil/errors.hpp"
#include "anvil/radio_sim.hpp"
#include "test_helpers.hpp"

using namespace anvil;

TEST_CASE("reference points walk the default straight line") {
    FloorplanSpec spec;
    spec.n_rp = 5;
    spec.rp_spacing_m = 2.0;
    auto rps = reference_points(spec);
    REQUIRE(rps.size() == 5);
    for (int r = 0; r < 5; ++r) {
        CHECK(rps[r].rp_id == r);
        CHECK(rps[r].x_m == doctest::Approx(2.0 * r).epsilon(1e-12));
        CHECK(rps[r].y_m == 0.0);
    }
}

TEST_CASE("reference points follow polyline corners and extrapolate") {
    FloorplanSpec spec;
    spec.n_rp = 6;
    spec.rp_spacing_m = 1.0;
    spec.path_shape = {{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}};
    auto rps = reference_points(spec);
    const double want[6][2] = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {2, 3}};
    for (int r = 0; r < 6; ++r) {
        CHECK(rps[r].x_m == doctest::Approx(want[r][0]).epsilon(1e-12));
        CHECK(rps[r].y_m == doctest::Approx(want[r][1]).epsilon(1e-12));
    }
}

TEST_CASE("spec validation rejects bad geometry") {
    FloorplanSpec spec;
    spec.n_rp = 1;
    CHECK_THROWS_AS(reference_points(spec), ConfigError);
    spec.n_rp = 5;
    spec.rp_spacing_m = 0.0;
    CHECK_THROWS_AS(reference_points(spec), ConfigError);
    spec.rp_spacing_m = 1.0;
    spec.path_shape = {{0.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(reference_points(spec), ConfigError);
    spec.path_shape.clear();
    spec.ap_positions = {{0.0, 0.0}};  // size != n_ap
    CHECK_THROWS_AS(validate(spec), ConfigError);
}

TEST_CASE("ap placement is explicit passthrough or seeded random in the padded bbox") {
    FloorplanSpec spec;
    spec.n_rp = 10;
    spec.n_ap = 2;
    spec.ap_positions = {{1.0, 2.0}, {3.0, 4.0}};
    CHECK(ap_positions(spec) == spec.ap_positions);

    spec.ap_positions.clear();
    spec.n_ap = 40;
    spec.seed = 7;
    auto aps = ap_positions(spec);
    REQUIRE(aps.size() == 40);
    for (const auto& [x, y] : aps) {
        CHECK(x >= -10.0);
        CHECK(x <= 19.0);  // path spans [0, 9] in x, pad 10
        CHECK(y >= -10.0);
        CHECK(y <= 10.0);
    }
    CHECK(ap_positions(spec) == aps);
    spec.seed = 8;
    CHECK(ap_positions(spec) != aps);
}

TEST_CASE("ground truth map matches the log-distance formula") {
    FloorplanSpec spec;
    spec.n_rp = 2;
    spec.n_ap = 1;
    spec.ap_positions = {{10.0, 0.0}};
    PathLossParams pl;  // p0 -30, n 2.5, d0 1, floor -95
    Eigen::MatrixXd truth = ground_truth_map(spec, pl);
    REQUIRE(truth.rows() == 2);
    REQUIRE(truth.cols() == 1);
    // [DERIVED] p0 - 10 n log10(d): d=10 -> -55, d=9 -> -53.85606273598312.
    CHECK(truth(0, 0) == doctest::Approx(-55.0).epsilon(1e-12));
    CHECK(truth(1, 0) == doctest::Approx(-53.85606273598312).epsilon(1e-12));
}

TEST_CASE("distances inside d0 saturate and weak signals drop to -100") {
    FloorplanSpec spec;
    spec.n_rp = 2;
    spec.rp_spacing_m = 0.25;
    spec.n_ap = 2;
    // AP 0 on top of RP 0 (d < d0); AP 1 at 450 m (below the -95 floor).
    spec.ap_positions = {{0.0, 0.0}, {450.0, 0.0}};
    PathLossParams pl;
    Eigen::MatrixXd truth = ground_truth_map(spec, pl);
    CHECK(truth(0, 0) == -30.0);  // max(d, d0) = d0
    // [DERIVED] -30 - 25 log10(450) = -96.33 < floor -> invisible.
    CHECK(truth(0, 1) == -100.0);
    CHECK(truth(1, 1) == -100.0);
}

TEST_CASE("identity device profile is exact") {
    Rng rng = make_rng(1);
    Eigen::VectorXd row(4);
    row << -100.0, -61.0, -33.5, 0.0;
    DeviceProfile ident{"ref", 0.0, 1.0, 0.0, 0.0};
    CHECK(apply_device(row, ident, rng) == row);
}

TEST_CASE("device transform pivots at -100 and clamps") {
    Rng rng = make_rng(2);
    Eigen::VectorXd row(3);
    row << -100.0, -60.0, -5.0;
    DeviceProfile p{"dev", 3.0, 1.1, 0.0, 0.0};
    Eigen::VectorXd out = apply_device(row, p, rng);
    CHECK(out[0] == -100.0);  // invisible stays invisible
    // -100 + 1.1 * 40 + 3 = -53.
    CHECK(out[1] == doctest::Approx(-53.0).epsilon(1e-12));
    CHECK(out[2] == 0.0);     // -100 + 1.1 * 95 + 3 = 7.5 -> clamp
}

TEST_CASE("full dropout silences every visible ap") {
    Rng rng = make_rng(3);
    Eigen::VectorXd row(3);
    row << -40.0, -100.0, -90.0;
    DeviceProfile p{"dev", 0.0, 1.0, 1.0, 0.0};
    Eigen::VectorXd out = apply_device(row, p, rng);
    CHECK(out[0] == -100.0);
    CHECK(out[1] == -100.0);
    CHECK(out[2] == -100.0);
}

TEST_CASE("apply_device rejects out-of-range input and bad profiles") {
    Rng rng = make_rng(4);
    Eigen::VectorXd bad(1);
    bad << 5.0;
    DeviceProfile ident{"ref", 0.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(apply_device(bad, ident, rng), DataError);

    Eigen::VectorXd ok(1);
    ok << -50.0;
    DeviceProfile neg_gain{"d", 0.0, -1.0, 0.0, 0.0};
    CHECK_THROWS_AS(apply_device(ok, neg_gain, rng), ConfigError);
    DeviceProfile bad_drop{"d", 0.0, 1.0, 1.5, 0.0};
    CHECK_THROWS_AS(apply_device(ok, bad_drop, rng), ConfigError);
}

TEST_CASE("generate_dataset yields one normalized integer-dBm database per device") {
    FloorplanSpec spec;
    spec.n_rp = 6;
    spec.n_ap = 12;
    spec.seed = 5;
    PathLossParams pl;
    auto dbs = generate_dataset(spec, pl, default_device_suite(), 4, 123);
    REQUIRE(dbs.size() == 6);
    for (const auto& db : dbs) {
        CHECK(db.size() == 24);
        CHECK(db.n_rp() == 6);
        CHECK(db.dim() == 12);
        for (const auto& fp : db.fingerprints()) {
            CHECK(fp.form == SignalForm::Normalized);
            for (Eigen::Index i = 0; i < fp.rssi.size(); ++i) {
                const double dbm = fp.rssi[i] * 100.0 - 100.0;
                CHECK(std::abs(dbm - std::llround(dbm)) < 1e-9);
                CHECK(fp.rssi[i] >= 0.0);
                CHECK(fp.rssi[i] <= 1.0);
            }
        }
    }
    CHECK(dbs[0].fingerprints()[0].device_id == "phone_a");
    CHECK(dbs[5].fingerprints()[0].device_id == "phone_f");
    // Shared registry and coordinates; distinct readings per device.
    CHECK(dbs[0].registry() == dbs[3].registry());
    CHECK(dbs[0].rp_coords() == dbs[3].rp_coords());
    CHECK(dbs[0].keys_matrix() != dbs[3].keys_matrix());
}

TEST_CASE("generate_dataset is deterministic per seed") {
    FloorplanSpec spec;
    spec.n_rp = 4;
    spec.n_ap = 8;
    spec.seed = 9;
    PathLossParams pl;
    auto profiles = default_device_suite();
    auto a = generate_dataset(spec, pl, profiles, 3, 77);
    auto b = generate_dataset(spec, pl, profiles, 3, 77);
    auto c = generate_dataset(spec, pl, profiles, 3, 78);
    for (std::size_t d = 0; d < a.size(); ++d) {
        CHECK(a[d].keys_matrix() == b[d].keys_matrix());
    }
    CHECK(a[0].keys_matrix() != c[0].keys_matrix());
}

TEST_CASE("default suites have the documented shape") {
    auto profiles = default_device_suite();
    REQUIRE(profiles.size() == 6);
    CHECK(profiles[0].offset_db == 0.0);
    CHECK(profiles[0].gain == 1.0);
    for (const auto& p : profiles) validate(p);

    auto floorplans = default_benchmark_suite();
    REQUIRE(floorplans.size() == 4);
    for (const auto& fp : floorplans) validate(fp);
    CHECK(floorplans[0].id == "corridor");
}
