#include "anvil/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anvil/errors.hpp"

namespace anvil {

AdamOptimizer::AdamOptimizer(OptimizerConfig cfg,
                             const std::vector<std::span<double>>& params)
    : cfg_(cfg) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
        m_.emplace_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.size())));
        v_.emplace_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.size())));
    }
}

void AdamOptimizer::step(const std::vector<std::span<double>>& params,
                         const std::vector<std::span<const double>>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ConfigError("AdamOptimizer: tensor count changed between steps");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i];
        auto& g = grads[i];
        if (p.size() != g.size() || p.size() != static_cast<std::size_t>(m_[i].size())) {
            throw ConfigError("AdamOptimizer: tensor shape changed between steps");
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            double& mj = m_[i][static_cast<Eigen::Index>(j)];
            double& vj = v_[i][static_cast<Eigen::Index>(j)];
            mj = cfg_.beta1 * mj + (1.0 - cfg_.beta1) * g[j];
            vj = cfg_.beta2 * vj + (1.0 - cfg_.beta2) * g[j] * g[j];
            p[j] -= cfg_.learning_rate * (mj / bc1) / (std::sqrt(vj / bc2) + cfg_.eps);
        }
    }
}

namespace {

std::span<double> flat(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> flat(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> cflat(const Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<const double> cflat(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

} // namespace

std::vector<std::span<double>> trainable_views(AttentionModel& m) {
    std::vector<std::span<double>> out;
    for (auto& w : m.mh.w_q) out.push_back(flat(w));
    for (auto& w : m.mh.w_k) out.push_back(flat(w));
    for (auto& w : m.mh.w_v) out.push_back(flat(w));
    out.push_back(flat(m.mh.w_o));
    for (auto& w : m.dense.w) out.push_back(flat(w));
    for (auto& b : m.dense.b) out.push_back(flat(b));
    return out;
}

std::vector<std::span<const double>> gradient_views(const ModelGrads& g) {
    std::vector<std::span<const double>> out;
    for (const auto& w : g.mh.w_q) out.push_back(cflat(w));
    for (const auto& w : g.mh.w_k) out.push_back(cflat(w));
    for (const auto& w : g.mh.w_v) out.push_back(cflat(w));
    out.push_back(cflat(g.mh.w_o));
    for (const auto& w : g.dense.w) out.push_back(cflat(w));
    for (const auto& b : g.dense.b) out.push_back(cflat(b));
    return out;
}

std::vector<std::span<double>> trainable_views(DenseStack& s) {
    std::vector<std::span<double>> out;
    for (auto& w : s.w) out.push_back(flat(w));
    for (auto& b : s.b) out.push_back(flat(b));
    return out;
}

std::vector<std::span<const double>> gradient_views(const DenseGrads& g) {
    std::vector<std::span<const double>> out;
    for (const auto& w : g.w) out.push_back(cflat(w));
    for (const auto& b : g.b) out.push_back(cflat(b));
    return out;
}

std::pair<AttentionModel, TrainReport> train(const FingerprintDatabase& db,
                                             const TrainConfig& cfg) {
    if (db.size() == 0) throw DataError("train: empty database");
    if (cfg.epochs < 1 || cfg.batch_size < 1) {
        throw ConfigError("train: epochs and batch_size must be >= 1");
    }
    cfg.fast.validate();

    const int d_ap = db.dim();
    const int n_rp = db.n_rp();
    const int d_out = cfg.d_out > 0 ? cfg.d_out : cfg.n_heads * cfg.head_size;

    Rng rng = make_rng(cfg.seed);
    AttentionModel model;
    model.mh = MultiHeadParams::init(cfg.n_heads, cfg.head_size, d_ap, n_rp, d_out, rng);
    model.dense = DenseStack::init(d_out, cfg.dense_widths, n_rp, cfg.dense_dropout, rng);
    model.keys = db.keys_matrix();
    model.values = db.labels_matrix();
    model.fast_cfg = cfg.fast;
    model.rp_coords = db.rp_coords();
    model.registry_hash = db.registry().hash();
    model.meta = {cfg.epochs, cfg.opt.learning_rate, cfg.batch_size, cfg.seed};

    std::vector<Eigen::VectorXd> queries;
    std::vector<int> labels;
    queries.reserve(db.size());
    for (const auto& fp : db.fingerprints()) {
        queries.push_back(fp.rssi);
        labels.push_back(*fp.rp_id);
    }

    auto params = trainable_views(model);
    AdamOptimizer opt(cfg.opt, params);

    TrainReport report;
    report.param_count = count_params(model);

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
            std::vector<Eigen::VectorXd> bq;
            std::vector<int> bl;
            bq.reserve(end - start);
            for (std::size_t k = start; k < end; ++k) {
                bq.push_back(queries[order[k]]);
                bl.push_back(labels[order[k]]);
            }
            LossResult res;
            try {
                res = loss_and_gradients(model, bq, bl, rng);
            } catch (const NumericError& e) {
                throw NumericError("train: diverged at epoch " + std::to_string(epoch) +
                                   ": " + e.what());
            }
            opt.step(params, gradient_views(res.grads));
            epoch_loss += res.loss;
            epoch_acc += res.accuracy;
            ++n_batches;
        }
        epoch_loss /= static_cast<double>(n_batches);
        epoch_acc /= static_cast<double>(n_batches);
        report.epoch_loss.push_back(epoch_loss);
        report.epoch_accuracy.push_back(epoch_acc);
        report.epochs_run = epoch + 1;

        if (epoch_loss < best_loss - cfg.min_delta) {
            best_loss = epoch_loss;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            break;
        }
    }
    return {std::move(model), std::move(report)};
}

} // namespace anvil
