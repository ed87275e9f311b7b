#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anvil/errors.hpp"
#include "anvil/fast_augment.hpp"
#include "test_helpers.hpp"

using namespace anvil;
using anvil::test::random_normalized;

TEST_CASE("config validation") {
    FastConfig cfg;
    cfg.validate();
    cfg.p_dropout = 1.2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = FastConfig{};
    cfg.contrast_range = {1.1, 0.9};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = FastConfig{};
    cfg.noise_sigma = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("without_fast zeroes the stack but keeps the noise layer") {
    FastConfig cfg;
    FastConfig off = cfg.without_fast();
    CHECK(off.p_dropout == 0.0);
    CHECK(off.p_brightness == 0.0);
    CHECK(off.p_contrast == 0.0);
    CHECK(off.noise_sigma == cfg.noise_sigma);
}

TEST_CASE("invisible entries stay exactly zero under every stage") {
    Rng rng = make_rng(101);
    FastConfig cfg;
    cfg.p_dropout = 0.5;
    cfg.p_brightness = 1.0;
    cfg.p_contrast = 1.0;
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd q = random_normalized(30, 0.4, rng);
        Eigen::VectorXd out = fast_apply(q, cfg, rng);
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            if (q[i] == 0.0) CHECK(out[i] == 0.0);
            CHECK(out[i] >= 0.0);
            CHECK(out[i] <= 1.0);
        }
    }
}

TEST_CASE("certain dropout silences every visible entry") {
    Rng rng = make_rng(102);
    FastConfig cfg;
    cfg.p_dropout = 1.0;
    cfg.p_brightness = 0.0;
    cfg.p_contrast = 0.0;
    Eigen::VectorXd q = random_normalized(50, 0.2, rng);
    CHECK(fast_apply(q, cfg, rng).isZero(0.0));
}

TEST_CASE("dropout hits visible entries at the configured rate") {
    Rng rng = make_rng(103);
    FastConfig cfg;
    cfg.p_dropout = 0.10;
    cfg.p_brightness = 0.0;
    cfg.p_contrast = 0.0;
    int visible = 0, dropped = 0;
    for (int trial = 0; trial < 400; ++trial) {
        Eigen::VectorXd q = random_normalized(60, 0.3, rng);
        Eigen::VectorXd out = fast_apply(q, cfg, rng);
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            if (q[i] > 0.0) {
                ++visible;
                if (out[i] == 0.0) ++dropped;
            }
        }
    }
    const double rate = static_cast<double>(dropped) / visible;
    CHECK(rate > 0.08);
    CHECK(rate < 0.12);
}

TEST_CASE("brightness shifts all visible entries by one shared delta") {
    Rng rng = make_rng(104);
    FastConfig cfg;
    cfg.p_dropout = 0.0;
    cfg.p_brightness = 1.0;
    cfg.p_contrast = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        // Interior values so the clamp never bites.
        Eigen::VectorXd q(20);
        std::uniform_real_distribution<double> u(0.2, 0.8);
        for (int i = 0; i < 20; ++i) q[i] = u(rng);
        Eigen::VectorXd out = fast_apply(q, cfg, rng);
        const double delta = out[0] - q[0];
        CHECK(std::abs(delta) <= cfg.brightness_delta_max);
        for (int i = 1; i < 20; ++i) {
            CHECK(out[i] - q[i] == doctest::Approx(delta).epsilon(1e-12));
        }
    }
}

TEST_CASE("contrast scales all visible entries by one shared factor") {
    Rng rng = make_rng(105);
    FastConfig cfg;
    cfg.p_dropout = 0.0;
    cfg.p_brightness = 0.0;
    cfg.p_contrast = 1.0;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd q(20);
        std::uniform_real_distribution<double> u(0.2, 0.8);
        for (int i = 0; i < 20; ++i) q[i] = u(rng);
        Eigen::VectorXd out = fast_apply(q, cfg, rng);
        const double f = out[0] / q[0];
        CHECK(f >= cfg.contrast_range.first);
        CHECK(f <= cfg.contrast_range.second);
        for (int i = 1; i < 20; ++i) {
            CHECK(out[i] / q[i] == doctest::Approx(f).epsilon(1e-12));
        }
    }
}

TEST_CASE("disabled stack is an exact no-op and consumes no randomness") {
    Rng rng = make_rng(106);
    Rng ref = rng;
    FastConfig cfg = FastConfig{}.without_fast();
    Eigen::VectorXd q = random_normalized(25, 0.3, ref);
    Rng ref2 = ref;
    Eigen::VectorXd out = fast_apply(q, cfg, ref);
    CHECK(out == q);
    CHECK(ref == ref2);  // engine state untouched
}

TEST_CASE("fast_apply rejects unnormalized input") {
    Rng rng = make_rng(107);
    FastConfig cfg;
    Eigen::VectorXd bad(2);
    bad << 0.5, 1.5;
    CHECK_THROWS_AS(fast_apply(bad, cfg, rng), DataError);

    Fingerprint fp;
    fp.rssi = Eigen::Vector2d(-50.0, -60.0);
    fp.form = SignalForm::Raw;
    CHECK_THROWS_AS(fast_apply(fp, cfg, rng), DataError);
}

TEST_CASE("fast_apply is deterministic for a fixed engine state") {
    Rng a = make_rng(108);
    Rng b = make_rng(108);
    FastConfig cfg;
    Eigen::VectorXd q = random_normalized(40, 0.3, a);
    Eigen::VectorXd q2 = random_normalized(40, 0.3, b);
    CHECK(fast_apply(q, cfg, a) == fast_apply(q2, cfg, b));
}

TEST_CASE("gaussian noise clamps, matches sigma and passes through at zero") {
    Rng rng = make_rng(109);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(20000, 0.5);
    Eigen::VectorXd out = gaussian_noise(v, 0.12, rng);
    CHECK(out.minCoeff() >= 0.0);
    CHECK(out.maxCoeff() <= 1.0);
    const double mean = out.mean();
    const double sd = std::sqrt((out.array() - mean).square().mean());
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sd == doctest::Approx(0.12).epsilon(0.05));

    Rng before = rng;
    CHECK(gaussian_noise(v, 0.0, rng) == v);
    CHECK(rng == before);  // sigma 0 consumes no randomness
    CHECK_THROWS_AS(gaussian_noise(v, -0.01, rng), ConfigError);
}
