#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "anvil/attention.hpp"
#include "anvil/database.hpp"
#include "anvil/fast_augment.hpp"

namespace anvil {

struct TrainMeta {
    int epochs = 300;
    double learning_rate = 1e-3;
    int batch_size = 32;
    std::uint64_t seed = 0;
};

/// The full classifier: multi-head attention over frozen (keys, one-hot
/// values) plus a dense head. Immutable once trained; safe to share for
/// concurrent inference.
struct AttentionModel {
    MultiHeadParams mh;
    DenseStack dense;
    Eigen::MatrixXd keys;    // N x d_ap, frozen offline fingerprints
    Eigen::MatrixXd values;  // N x n_rp, frozen one-hot labels
    FastConfig fast_cfg;
    std::map<int, std::pair<double, double>> rp_coords;
    std::uint64_t registry_hash = 0;
    TrainMeta meta;

    int d_ap() const { return static_cast<int>(keys.cols()); }
    int n_rp() const { return static_cast<int>(values.cols()); }
};

/// Probability vector over RPs for one query. Training mode augments the
/// query (FASt + Gaussian noise) and activates dense dropout, consuming
/// rng; inference never touches rng.
Eigen::VectorXd model_forward(const AttentionModel& m, const Eigen::VectorXd& q,
                              bool training, Rng* rng);

struct Prediction {
    int rp_id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
};

/// argmax of the inference forward pass; ties go to the lowest rp_id.
Prediction predict(const AttentionModel& m, const Eigen::VectorXd& q);

/// One sampled training step: augmented queries plus realized dropout
/// masks. Freezing a realization makes the loss a deterministic function
/// of the parameters, which is what the finite-difference check needs.
struct BatchRealization {
    Eigen::MatrixXd aug_queries;               // B x d_ap
    std::vector<Eigen::MatrixXd> dropout_masks;
    std::vector<int> labels;
};

BatchRealization sample_realization(const AttentionModel& m,
                                    const std::vector<Eigen::VectorXd>& queries,
                                    const std::vector<int>& labels, Rng& rng);

struct ModelGrads {
    MultiHeadGrads mh;
    DenseGrads dense;
};

struct LossResult {
    double loss = 0.0;
    double accuracy = 0.0;
    ModelGrads grads;
};

/// Mean categorical cross-entropy and exact gradients for a frozen
/// realization.
LossResult loss_and_gradients(const AttentionModel& m, const BatchRealization& real);

/// Convenience wrapper that samples the realization from rng first.
LossResult loss_and_gradients(const AttentionModel& m,
                              const std::vector<Eigen::VectorXd>& queries,
                              const std::vector<int>& labels, Rng& rng);

/// Closed-form trainable-parameter count:
/// NH*HS*(2*d_ap + n_rp) + NH*HS*d_out + sum over dense layers of
/// (w_in*w_out + w_out).
long long count_params(const AttentionModel& m);

/// Exhaustive sum of tensor sizes; must equal count_params.
long long enumerate_params(const AttentionModel& m);

} // namespace anvil
