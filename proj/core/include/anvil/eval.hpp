#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "anvil/baselines.hpp"
#include "anvil/database.hpp"
#include "anvil/model.hpp"
#include "anvil/serialize.hpp"
#include "anvil/train.hpp"

namespace anvil {

enum class Framework {
    Anvil,
    AnvilNoFast,   // FASt probabilities zeroed, noise layer kept
    KnnEuclid,
    KnnPearson,
    AdTrain,
    Ffdnn,         // AdTrain with all noise off
    FfdnnFast,     // AdTrain pipeline with FASt instead of plain input noise
};

std::string framework_name(Framework f);
Framework parse_framework(const std::string& name);

/// Per-framework knobs used by the harness.
struct EvalConfig {
    KnnConfig knn;
    TrainConfig anvil;
    AdTrainConfig adtrain;
};

/// Euclidean distance in meters.
double localization_error(std::pair<double, double> pred, std::pair<double, double> truth);

/// A fitted localizer, ready to answer queries. Immutable.
class Localizer {
public:
    virtual ~Localizer() = default;
    virtual Prediction locate(const Eigen::VectorXd& q) const = 0;
};

/// Train (or wrap) a framework on an offline database. The returned model
/// can be reused across every online device.
std::unique_ptr<Localizer> fit_framework(Framework f, const FingerprintDatabase& train_db,
                                         const EvalConfig& cfg, std::uint64_t seed);

/// Wrap an already-loaded model artifact.
std::unique_ptr<Localizer> localizer_from_artifact(const ModelArtifact& artifact);

struct PairStats {
    double mean_m = 0.0;
    double std_m = 0.0;
    std::size_t n_queries = 0;
};

/// Mean/std of per-query localization errors on a test database.
PairStats evaluate_with(const Localizer& loc, const FingerprintDatabase& test_db);

PairStats evaluate_pair(Framework f, const FingerprintDatabase& train_db,
                        const FingerprintDatabase& test_db, const EvalConfig& cfg,
                        std::uint64_t seed);

struct EvalCell {
    std::string framework;
    std::string offline_device;
    std::string online_device;
    PairStats stats;
};

struct EvalMatrix {
    std::string floorplan_id;
    std::vector<std::string> frameworks;
    std::vector<std::string> devices;
    std::vector<EvalCell> cells;  // frameworks x devices x devices, row-major

    const EvalCell& cell(const std::string& framework, const std::string& offline,
                         const std::string& online) const;
};

/// Per-device (train, test) split of one floorplan's data.
using DeviceSplits = std::map<std::string, std::pair<FingerprintDatabase, FingerprintDatabase>>;

/// Fill every framework x offline x online cell. Each (framework, offline
/// device) model is trained once and reused for all online devices.
EvalMatrix cross_device_matrix(const std::vector<Framework>& frameworks,
                               const DeviceSplits& splits, const EvalConfig& cfg,
                               std::uint64_t seed, const std::string& floorplan_id);

struct SummaryRow {
    std::string floorplan_id;
    std::string framework;
    double mean_m = 0.0;  // mean over all offline x online cell means
    double std_m = 0.0;   // std across those cell means
};

std::vector<SummaryRow> summarize(const EvalMatrix& matrix);

/// FASt ablation over a suite of floorplans: ANVIL, ANVIL without FASt,
/// FF-DNN, and FF-DNN trained through FASt, each averaged across all
/// offline/online device pairs.
std::vector<SummaryRow> ablate_fast(const std::map<std::string, DeviceSplits>& suite,
                                    const EvalConfig& cfg, std::uint64_t seed);

} // namespace anvil
