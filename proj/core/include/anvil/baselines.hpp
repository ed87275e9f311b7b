#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "anvil/attention.hpp"
#include "anvil/database.hpp"
#include "anvil/fast_augment.hpp"
#include "anvil/model.hpp"
#include "anvil/train.hpp"

namespace anvil {

enum class KnnMetric { Euclidean, PearsonDistance };

struct KnnConfig {
    int k = 3;
    KnnMetric metric = KnnMetric::Euclidean;
};

/// Sample Pearson correlation coefficient. Throws DataError on zero
/// variance; KNN callers map that to the worst distance, 2.0.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// KNN localization over the offline database. Neighbors are ranked by
/// the metric (distance ties broken by database order); the predicted
/// coordinates are the arithmetic mean of the k neighbors' RP coordinates,
/// and the reported rp_id is the RP nearest to that mean (ties toward the
/// lowest rp_id).
Prediction knn_predict(const FingerprintDatabase& db, const Eigen::VectorXd& q,
                       const KnnConfig& cfg);

/// How queries are perturbed during FF-DNN training.
enum class AdTrainAugment {
    None,      // plain FF-DNN
    Gaussian,  // AdTrain: whole-vector input noise
    Fast,      // ablation arm: FASt stack instead of plain noise
};

struct AdTrainConfig {
    std::vector<int> dense_widths = {256, 128};
    double dense_dropout = 0.0;
    AdTrainAugment augment = AdTrainAugment::Gaussian;
    double input_noise_sigma = 0.12;   // normalized units
    double label_noise_p = 0.10;       // displace label to an adjacent RP
    FastConfig fast;                   // used when augment == Fast
    OptimizerConfig opt;
    int epochs = 300;
    int batch_size = 32;
    int patience = 30;
    double min_delta = 1e-4;
    std::uint64_t seed = 0;
};

/// Trained feed-forward classifier (AdTrain and the plain FF-DNN arm).
struct FfdnnModel {
    DenseStack dense;
    std::map<int, std::pair<double, double>> rp_coords;
    std::uint64_t registry_hash = 0;
    AdTrainConfig cfg;
};

FfdnnModel adtrain_train(const FingerprintDatabase& db, const AdTrainConfig& cfg,
                         TrainReport* report = nullptr);

Eigen::VectorXd ffdnn_forward(const FfdnnModel& m, const Eigen::VectorXd& q);
Prediction ffdnn_predict(const FfdnnModel& m, const Eigen::VectorXd& q);

} // namespace anvil
