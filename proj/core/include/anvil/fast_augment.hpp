#pragma once

#include <Eigen/Core>
#include <utility>

#include "anvil/fingerprint.hpp"
#include "anvil/rng.hpp"

namespace anvil {

/// Fingerprint augmentation stack knobs plus the whole-vector Gaussian
/// noise layer that follows it. All magnitudes are in normalized units.
struct FastConfig {
    double p_dropout = 0.10;             // per visible entry
    double p_brightness = 0.10;          // per fingerprint
    double brightness_delta_max = 0.10;
    double p_contrast = 0.10;            // per fingerprint
    std::pair<double, double> contrast_range = {0.9, 1.1};
    double noise_sigma = 0.12;

    void validate() const;

    /// Same stack with dropout/brightness/contrast disabled; the noise
    /// layer stays (the ablation removes only the augmentation stack).
    FastConfig without_fast() const;
};

/// Visible-AP dropout, then random brightness, then random contrast, all
/// acting only on entries > 0; result clamped to [0, 1]. Entries that are
/// 0 on input stay exactly 0.
Eigen::VectorXd fast_apply(const Eigen::VectorXd& q_normalized, const FastConfig& cfg, Rng& rng);

/// Convenience overload checking the fingerprint's form tag.
Fingerprint fast_apply(const Fingerprint& q, const FastConfig& cfg, Rng& rng);

/// Independent N(0, sigma^2) added to every entry (visible or not), then
/// clamped to [0, 1].
Eigen::VectorXd gaussian_noise(const Eigen::VectorXd& v, double sigma, Rng& rng);

} // namespace anvil
