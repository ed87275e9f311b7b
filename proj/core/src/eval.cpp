#include "anvil/eval.hpp"

#include <cmath>

#include "anvil/errors.hpp"

namespace anvil {

std::string framework_name(Framework f) {
    switch (f) {
        case Framework::Anvil: return "anvil";
        case Framework::AnvilNoFast: return "anvil-nofast";
        case Framework::KnnEuclid: return "knn-euclid";
        case Framework::KnnPearson: return "knn-pearson";
        case Framework::AdTrain: return "adtrain";
        case Framework::Ffdnn: return "ffdnn";
        case Framework::FfdnnFast: return "ffdnn-fast";
    }
    throw ConfigError("framework_name: unknown framework");
}

Framework parse_framework(const std::string& name) {
    if (name == "anvil") return Framework::Anvil;
    if (name == "anvil-nofast") return Framework::AnvilNoFast;
    if (name == "knn-euclid") return Framework::KnnEuclid;
    if (name == "knn-pearson") return Framework::KnnPearson;
    if (name == "adtrain") return Framework::AdTrain;
    if (name == "ffdnn") return Framework::Ffdnn;
    if (name == "ffdnn-fast") return Framework::FfdnnFast;
    throw ConfigError("unknown framework: " + name);
}

double localization_error(std::pair<double, double> pred, std::pair<double, double> truth) {
    if (!std::isfinite(pred.first) || !std::isfinite(pred.second) ||
        !std::isfinite(truth.first) || !std::isfinite(truth.second)) {
        throw NumericError("localization_error: non-finite coordinates");
    }
    return std::hypot(pred.first - truth.first, pred.second - truth.second);
}

namespace {

class AttentionLocalizer : public Localizer {
public:
    explicit AttentionLocalizer(AttentionModel m) : model_(std::move(m)) {}
    Prediction locate(const Eigen::VectorXd& q) const override { return predict(model_, q); }

private:
    AttentionModel model_;
};

class KnnLocalizer : public Localizer {
public:
    KnnLocalizer(FingerprintDatabase db, KnnConfig cfg)
        : db_(std::move(db)), cfg_(cfg) {}
    Prediction locate(const Eigen::VectorXd& q) const override {
        return knn_predict(db_, q, cfg_);
    }

private:
    FingerprintDatabase db_;
    KnnConfig cfg_;
};

class FfdnnLocalizer : public Localizer {
public:
    explicit FfdnnLocalizer(FfdnnModel m) : model_(std::move(m)) {}
    Prediction locate(const Eigen::VectorXd& q) const override {
        return ffdnn_predict(model_, q);
    }

private:
    FfdnnModel model_;
};

} // namespace

std::unique_ptr<Localizer> fit_framework(Framework f, const FingerprintDatabase& train_db,
                                         const EvalConfig& cfg, std::uint64_t seed) {
    switch (f) {
        case Framework::Anvil: {
            TrainConfig tc = cfg.anvil;
            tc.seed = seed;
            return std::make_unique<AttentionLocalizer>(train(train_db, tc).first);
        }
        case Framework::AnvilNoFast: {
            TrainConfig tc = cfg.anvil;
            tc.fast = tc.fast.without_fast();
            tc.seed = seed;
            return std::make_unique<AttentionLocalizer>(train(train_db, tc).first);
        }
        case Framework::KnnEuclid: {
            KnnConfig kc = cfg.knn;
            kc.metric = KnnMetric::Euclidean;
            return std::make_unique<KnnLocalizer>(train_db, kc);
        }
        case Framework::KnnPearson: {
            KnnConfig kc = cfg.knn;
            kc.metric = KnnMetric::PearsonDistance;
            return std::make_unique<KnnLocalizer>(train_db, kc);
        }
        case Framework::AdTrain: {
            AdTrainConfig ac = cfg.adtrain;
            ac.augment = AdTrainAugment::Gaussian;
            ac.seed = seed;
            return std::make_unique<FfdnnLocalizer>(adtrain_train(train_db, ac));
        }
        case Framework::Ffdnn: {
            AdTrainConfig ac = cfg.adtrain;
            ac.augment = AdTrainAugment::None;
            ac.label_noise_p = 0.0;
            ac.seed = seed;
            return std::make_unique<FfdnnLocalizer>(adtrain_train(train_db, ac));
        }
        case Framework::FfdnnFast: {
            AdTrainConfig ac = cfg.adtrain;
            ac.augment = AdTrainAugment::Fast;
            ac.fast = cfg.anvil.fast;
            ac.label_noise_p = 0.0;
            ac.seed = seed;
            return std::make_unique<FfdnnLocalizer>(adtrain_train(train_db, ac));
        }
    }
    throw ConfigError("fit_framework: unknown framework");
}

std::unique_ptr<Localizer> localizer_from_artifact(const ModelArtifact& artifact) {
    if (const auto* m = std::get_if<AttentionModel>(&artifact.model)) {
        return std::make_unique<AttentionLocalizer>(*m);
    }
    if (const auto* m2 = std::get_if<FfdnnModel>(&artifact.model)) {
        return std::make_unique<FfdnnLocalizer>(*m2);
    }
    const auto& m3 = std::get<KnnModel>(artifact.model);
    return std::make_unique<KnnLocalizer>(m3.db, m3.cfg);
}

PairStats evaluate_with(const Localizer& loc, const FingerprintDatabase& test_db) {
    if (test_db.size() == 0) throw DataError("evaluate: empty test database");
    std::vector<double> errors;
    errors.reserve(test_db.size());
    for (const auto& fp : test_db.fingerprints()) {
        const Prediction p = loc.locate(fp.rssi);
        errors.push_back(localization_error({p.x_m, p.y_m}, test_db.coords_of(*fp.rp_id)));
    }
    PairStats stats;
    stats.n_queries = errors.size();
    for (double e : errors) stats.mean_m += e;
    stats.mean_m /= static_cast<double>(errors.size());
    if (errors.size() > 1) {
        double ss = 0.0;
        for (double e : errors) ss += (e - stats.mean_m) * (e - stats.mean_m);
        stats.std_m = std::sqrt(ss / static_cast<double>(errors.size()));
    }
    return stats;
}

PairStats evaluate_pair(Framework f, const FingerprintDatabase& train_db,
                        const FingerprintDatabase& test_db, const EvalConfig& cfg,
                        std::uint64_t seed) {
    if (!(train_db.registry() == test_db.registry())) {
        throw DataError("evaluate_pair: train/test registries differ");
    }
    return evaluate_with(*fit_framework(f, train_db, cfg, seed), test_db);
}

const EvalCell& EvalMatrix::cell(const std::string& framework, const std::string& offline,
                                 const std::string& online) const {
    for (const auto& c : cells) {
        if (c.framework == framework && c.offline_device == offline &&
            c.online_device == online) {
            return c;
        }
    }
    throw DataError("EvalMatrix: no cell for " + framework + "/" + offline + "/" + online);
}

EvalMatrix cross_device_matrix(const std::vector<Framework>& frameworks,
                               const DeviceSplits& splits, const EvalConfig& cfg,
                               std::uint64_t seed, const std::string& floorplan_id) {
    if (frameworks.empty()) throw ConfigError("cross_device_matrix: no frameworks");
    if (splits.size() < 2) throw ConfigError("cross_device_matrix: need >= 2 devices");

    EvalMatrix matrix;
    matrix.floorplan_id = floorplan_id;
    for (Framework f : frameworks) matrix.frameworks.push_back(framework_name(f));
    for (const auto& [device, dbs] : splits) matrix.devices.push_back(device);

    std::uint64_t job = 0;
    for (Framework f : frameworks) {
        for (const auto& [offline, offline_dbs] : splits) {
            auto loc = fit_framework(f, offline_dbs.first, cfg, mix_seed(seed, job++));
            for (const auto& [online, online_dbs] : splits) {
                if (!(offline_dbs.first.registry() == online_dbs.second.registry())) {
                    throw DataError("cross_device_matrix: registry mismatch between " +
                                    offline + " and " + online);
                }
                EvalCell cell;
                cell.framework = framework_name(f);
                cell.offline_device = offline;
                cell.online_device = online;
                cell.stats = evaluate_with(*loc, online_dbs.second);
                matrix.cells.push_back(std::move(cell));
            }
        }
    }
    return matrix;
}

std::vector<SummaryRow> summarize(const EvalMatrix& matrix) {
    std::vector<SummaryRow> rows;
    for (const auto& fw : matrix.frameworks) {
        std::vector<double> means;
        for (const auto& c : matrix.cells) {
            if (c.framework == fw) means.push_back(c.stats.mean_m);
        }
        if (means.empty()) continue;
        SummaryRow row;
        row.floorplan_id = matrix.floorplan_id;
        row.framework = fw;
        for (double m : means) row.mean_m += m;
        row.mean_m /= static_cast<double>(means.size());
        if (means.size() > 1) {
            double ss = 0.0;
            for (double m : means) ss += (m - row.mean_m) * (m - row.mean_m);
            row.std_m = std::sqrt(ss / static_cast<double>(means.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SummaryRow> ablate_fast(const std::map<std::string, DeviceSplits>& suite,
                                    const EvalConfig& cfg, std::uint64_t seed) {
    if (suite.empty()) throw ConfigError("ablate_fast: no floorplans");
    const std::vector<Framework> arms = {Framework::Anvil, Framework::AnvilNoFast,
                                         Framework::Ffdnn, Framework::FfdnnFast};
    std::vector<SummaryRow> rows;
    std::uint64_t stream = 0;
    for (const auto& [floorplan, splits] : suite) {
        EvalMatrix matrix =
            cross_device_matrix(arms, splits, cfg, mix_seed(seed, stream++), floorplan);
        for (auto& row : summarize(matrix)) rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace anvil
