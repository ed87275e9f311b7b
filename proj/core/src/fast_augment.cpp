#include "anvil/fast_augment.hpp"

#include <algorithm>
#include <random>

#include "anvil/errors.hpp"

namespace anvil {

void FastConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(p_dropout) || !prob(p_brightness) || !prob(p_contrast)) {
        throw ConfigError("FastConfig: probabilities must be in [0, 1]");
    }
    if (!(contrast_range.first > 0.0) || contrast_range.first > contrast_range.second) {
        throw ConfigError("FastConfig: contrast range must satisfy 0 < lo <= hi");
    }
    if (noise_sigma < 0.0) throw ConfigError("FastConfig: noise_sigma must be >= 0");
}

FastConfig FastConfig::without_fast() const {
    FastConfig cfg = *this;
    cfg.p_dropout = 0.0;
    cfg.p_brightness = 0.0;
    cfg.p_contrast = 0.0;
    return cfg;
}

Eigen::VectorXd fast_apply(const Eigen::VectorXd& q_normalized, const FastConfig& cfg, Rng& rng) {
    cfg.validate();
    for (Eigen::Index i = 0; i < q_normalized.size(); ++i) {
        if (!(q_normalized[i] >= 0.0 && q_normalized[i] <= 1.0)) {
            throw DataError("fast_apply: input not normalized at index " + std::to_string(i));
        }
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Eigen::VectorXd out = q_normalized;

    if (cfg.p_dropout > 0.0) {
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            if (out[i] > 0.0 && coin(rng) < cfg.p_dropout) out[i] = 0.0;
        }
    }
    if (cfg.p_brightness > 0.0 && coin(rng) < cfg.p_brightness) {
        std::uniform_real_distribution<double> shift(-cfg.brightness_delta_max,
                                                     cfg.brightness_delta_max);
        const double delta = shift(rng);
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            if (out[i] > 0.0) out[i] = std::clamp(out[i] + delta, 0.0, 1.0);
        }
    }
    if (cfg.p_contrast > 0.0 && coin(rng) < cfg.p_contrast) {
        std::uniform_real_distribution<double> factor(cfg.contrast_range.first,
                                                      cfg.contrast_range.second);
        const double f = factor(rng);
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            if (out[i] > 0.0) out[i] = std::clamp(out[i] * f, 0.0, 1.0);
        }
    }
    return out;
}

Fingerprint fast_apply(const Fingerprint& q, const FastConfig& cfg, Rng& rng) {
    if (q.form != SignalForm::Normalized) {
        throw DataError("fast_apply: fingerprint must be normalized");
    }
    Fingerprint out = q;
    out.rssi = fast_apply(q.rssi, cfg, rng);
    return out;
}

Eigen::VectorXd gaussian_noise(const Eigen::VectorXd& v, double sigma, Rng& rng) {
    if (sigma < 0.0) throw ConfigError("gaussian_noise: sigma must be >= 0");
    if (sigma == 0.0) return v;
    std::normal_distribution<double> noise(0.0, sigma);
    Eigen::VectorXd out = v;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] = std::clamp(out[i] + noise(rng), 0.0, 1.0);
    }
    return out;
}

} // namespace anvil
