#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "anvil/model.hpp"

namespace anvil {

/// Adam with standard bias correction:
///   m_t = b1 m_{t-1} + (1-b1) g,  v_t = b2 v_{t-1} + (1-b2) g^2
///   theta -= lr * (m_t / (1-b1^t)) / (sqrt(v_t / (1-b2^t)) + eps)
struct OptimizerConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct TrainConfig {
    int n_heads = 5;
    int head_size = 50;
    int d_out = 0;  // 0 -> n_heads * head_size
    std::vector<int> dense_widths = {256, 128};
    double dense_dropout = 0.10;
    FastConfig fast;
    OptimizerConfig opt;
    int epochs = 300;
    int batch_size = 32;
    int patience = 30;         // early stop on training-loss plateau
    double min_delta = 1e-4;
    std::uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> epoch_loss;
    std::vector<double> epoch_accuracy;  // on augmented training batches
    long long param_count = 0;
    int epochs_run = 0;
};

/// Build an AttentionModel from the offline database (fingerprints double
/// as queries and keys, one-hot RPs as values) and train it. Deterministic
/// for a given seed.
std::pair<AttentionModel, TrainReport> train(const FingerprintDatabase& db,
                                             const TrainConfig& cfg);

/// Generic Adam over flat parameter buffers.
class AdamOptimizer {
public:
    AdamOptimizer(OptimizerConfig cfg, const std::vector<std::span<double>>& params);
    void step(const std::vector<std::span<double>>& params,
              const std::vector<std::span<const double>>& grads);

private:
    OptimizerConfig cfg_;
    std::vector<Eigen::VectorXd> m_, v_;
    long t_ = 0;
};

/// Every trainable tensor of the model as a flat view, in a fixed order.
std::vector<std::span<double>> trainable_views(AttentionModel& m);
std::vector<std::span<const double>> gradient_views(const ModelGrads& g);

/// Same machinery for a bare dense stack (FF-DNN baselines).
std::vector<std::span<double>> trainable_views(DenseStack& s);
std::vector<std::span<const double>> gradient_views(const DenseGrads& g);

} // namespace anvil
