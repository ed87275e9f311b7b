#include "anvil/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "anvil/errors.hpp"

namespace anvil {

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw ConfigError("pearson: vectors must have equal length >= 2");
    }
    const double ma = a.mean();
    const double mb = b.mean();
    const Eigen::VectorXd da = a.array() - ma;
    const Eigen::VectorXd db = b.array() - mb;
    const double va = da.squaredNorm();
    const double vb = db.squaredNorm();
    if (va == 0.0 || vb == 0.0) {
        throw DataError("pearson: zero variance input");
    }
    return da.dot(db) / std::sqrt(va * vb);
}

Prediction knn_predict(const FingerprintDatabase& db, const Eigen::VectorXd& q,
                       const KnnConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("knn_predict: k must be >= 1");
    if (db.size() == 0) throw DataError("knn_predict: empty database");
    if (q.size() != db.dim()) throw ConfigError("knn_predict: query length mismatch");

    const auto& fps = db.fingerprints();
    std::vector<double> dist(fps.size());
    for (std::size_t i = 0; i < fps.size(); ++i) {
        if (cfg.metric == KnnMetric::Euclidean) {
            dist[i] = (fps[i].rssi - q).norm();
        } else {
            try {
                dist[i] = 1.0 - pearson(q, fps[i].rssi);
            } catch (const DataError&) {
                dist[i] = 2.0;  // worst possible Pearson distance
            }
        }
    }
    std::vector<std::size_t> order(fps.size());
    std::iota(order.begin(), order.end(), 0);
    // stable sort keeps database order among exact distance ties
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return dist[i] < dist[j]; });

    const std::size_t k = std::min<std::size_t>(cfg.k, order.size());
    double cx = 0.0, cy = 0.0;
    for (std::size_t n = 0; n < k; ++n) {
        const auto [x, y] = db.coords_of(*fps[order[n]].rp_id);
        cx += x;
        cy += y;
    }
    cx /= static_cast<double>(k);
    cy /= static_cast<double>(k);

    // Report the RP nearest to the averaged coordinates.
    int best_rp = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& [rp, xy] : db.rp_coords()) {
        const double d = std::hypot(xy.first - cx, xy.second - cy);
        if (d < best_d) {
            best_d = d;
            best_rp = rp;
        }
    }
    return {best_rp, cx, cy};
}

FfdnnModel adtrain_train(const FingerprintDatabase& db, const AdTrainConfig& cfg,
                         TrainReport* report) {
    if (db.size() == 0) throw DataError("adtrain_train: empty database");
    if (cfg.input_noise_sigma < 0) throw ConfigError("adtrain_train: sigma must be >= 0");
    if (cfg.label_noise_p < 0 || cfg.label_noise_p > 1) {
        throw ConfigError("adtrain_train: label_noise_p must be in [0, 1]");
    }

    const int n_rp = db.n_rp();
    Rng rng = make_rng(cfg.seed);

    FfdnnModel model;
    model.dense = DenseStack::init(db.dim(), cfg.dense_widths, n_rp, cfg.dense_dropout, rng);
    model.rp_coords = db.rp_coords();
    model.registry_hash = db.registry().hash();
    model.cfg = cfg;

    // RPs within one nominal spacing of each RP, for label displacement.
    const auto& coords = db.rp_coords();
    double spacing = std::numeric_limits<double>::infinity();
    for (const auto& [rp, xy] : coords) {
        for (const auto& [rp2, xy2] : coords) {
            if (rp2 == rp) continue;
            spacing = std::min(spacing,
                               std::hypot(xy.first - xy2.first, xy.second - xy2.second));
        }
    }
    std::vector<std::vector<int>> adjacent(n_rp);
    for (const auto& [rp, xy] : coords) {
        for (const auto& [rp2, xy2] : coords) {
            if (rp2 == rp) continue;
            if (std::hypot(xy.first - xy2.first, xy.second - xy2.second) <= spacing * 1.001) {
                adjacent[rp].push_back(rp2);
            }
        }
    }

    std::vector<Eigen::VectorXd> queries;
    std::vector<int> labels;
    for (const auto& fp : db.fingerprints()) {
        queries.push_back(fp.rssi);
        labels.push_back(*fp.rp_id);
    }

    auto params = trainable_views(model.dense);
    AdamOptimizer opt(cfg.opt, params);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    if (report) {
        *report = TrainReport{};
        long long pc = 0;
        for (const auto& w : model.dense.w) pc += w.size();
        for (const auto& b : model.dense.b) pc += b.size();
        report->param_count = pc;
    }

    std::vector<std::size_t> order(queries.size());
    std::iota(order.begin(), order.end(), 0);
    double best_loss = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        double epoch_acc = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const Eigen::Index B = static_cast<Eigen::Index>(end - start);
            Eigen::MatrixXd x(B, db.dim());
            std::vector<int> y(end - start);
            for (std::size_t k = start; k < end; ++k) {
                Eigen::VectorXd qv = queries[order[k]];
                switch (cfg.augment) {
                    case AdTrainAugment::None:
                        break;
                    case AdTrainAugment::Gaussian:
                        qv = gaussian_noise(qv, cfg.input_noise_sigma, rng);
                        break;
                    case AdTrainAugment::Fast:
                        qv = gaussian_noise(fast_apply(qv, cfg.fast, rng),
                                            cfg.fast.noise_sigma, rng);
                        break;
                }
                int lab = labels[order[k]];
                if (cfg.label_noise_p > 0 && !adjacent[lab].empty() &&
                    coin(rng) < cfg.label_noise_p) {
                    std::uniform_int_distribution<std::size_t> pick(
                        0, adjacent[lab].size() - 1);
                    lab = adjacent[lab][pick(rng)];
                }
                x.row(static_cast<Eigen::Index>(k - start)) = qv.transpose();
                y[k - start] = lab;
            }
            auto masks = sample_dropout_masks(model.dense, static_cast<int>(B), rng);
            DenseCache cache;
            Eigen::MatrixXd logits = dense_forward(model.dense, x, masks, &cache);
            if (!logits.allFinite()) {
                throw NumericError("adtrain_train: diverged at epoch " +
                                   std::to_string(epoch));
            }
            Eigen::MatrixXd p = softmax_rows(logits);
            Eigen::MatrixXd d_logits = p;
            double loss = 0.0;
            int correct = 0;
            for (Eigen::Index r = 0; r < B; ++r) {
                loss += -std::log(std::max(p(r, y[static_cast<std::size_t>(r)]), 1e-300));
                d_logits(r, y[static_cast<std::size_t>(r)]) -= 1.0;
                Eigen::Index argmax;
                p.row(r).maxCoeff(&argmax);
                if (static_cast<int>(argmax) == y[static_cast<std::size_t>(r)]) ++correct;
            }
            loss /= static_cast<double>(B);
            d_logits /= static_cast<double>(B);
            DenseGrads g = dense_backward(model.dense, cache, masks, d_logits);
            opt.step(params, gradient_views(g));
            epoch_loss += loss;
            epoch_acc += static_cast<double>(correct) / static_cast<double>(B);
            ++n_batches;
        }
        epoch_loss /= static_cast<double>(n_batches);
        epoch_acc /= static_cast<double>(n_batches);
        if (report) {
            report->epoch_loss.push_back(epoch_loss);
            report->epoch_accuracy.push_back(epoch_acc);
            report->epochs_run = epoch + 1;
        }
        if (epoch_loss < best_loss - cfg.min_delta) {
            best_loss = epoch_loss;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            break;
        }
    }
    return model;
}

Eigen::VectorXd ffdnn_forward(const FfdnnModel& m, const Eigen::VectorXd& q) {
    if (q.size() != m.dense.d_in()) throw ConfigError("ffdnn_forward: query length mismatch");
    Eigen::MatrixXd logits = dense_forward(m.dense, q.transpose(), {});
    if (!logits.allFinite()) throw NumericError("ffdnn_forward: non-finite logits");
    return softmax_rows(logits).row(0).transpose();
}

Prediction ffdnn_predict(const FfdnnModel& m, const Eigen::VectorXd& q) {
    const Eigen::VectorXd p = ffdnn_forward(m, q);
    int best = 0;
    for (int i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;
    }
    const auto it = m.rp_coords.find(best);
    if (it == m.rp_coords.end()) {
        throw DataError("ffdnn_predict: rp_id has no coordinates");
    }
    return {best, it->second.first, it->second.second};
}

} // namespace anvil
