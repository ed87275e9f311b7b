#include "anvil/model.hpp"

#include <cmath>

#include "anvil/errors.hpp"

namespace anvil {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw NumericError(std::string("non-finite values in ") + what);
}

} // namespace

Eigen::VectorXd model_forward(const AttentionModel& m, const Eigen::VectorXd& q,
                              bool training, Rng* rng) {
    if (q.size() != m.d_ap()) {
        throw ConfigError("model_forward: query length != d_ap");
    }
    Eigen::VectorXd qv = q;
    std::vector<Eigen::MatrixXd> masks;
    if (training) {
        if (!rng) throw ConfigError("model_forward: training mode requires an rng");
        qv = gaussian_noise(fast_apply(qv, m.fast_cfg, *rng), m.fast_cfg.noise_sigma, *rng);
        masks = sample_dropout_masks(m.dense, 1, *rng);
    }
    Eigen::MatrixXd features = multi_head_forward(m.mh, qv.transpose(), m.keys, m.values);
    check_finite(features, "attention features");
    Eigen::MatrixXd logits = dense_forward(m.dense, features, masks);
    check_finite(logits, "dense logits");
    Eigen::MatrixXd p = softmax_rows(logits);
    check_finite(p, "output probabilities");
    return p.row(0).transpose();
}

Prediction predict(const AttentionModel& m, const Eigen::VectorXd& q) {
    const Eigen::VectorXd p = model_forward(m, q, false, nullptr);
    int best = 0;
    for (int i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;  // strict: ties keep the lowest rp_id
    }
    auto it = m.rp_coords.find(best);
    if (it == m.rp_coords.end()) {
        throw DataError("predict: rp_id " + std::to_string(best) + " has no coordinates");
    }
    return {best, it->second.first, it->second.second};
}

BatchRealization sample_realization(const AttentionModel& m,
                                    const std::vector<Eigen::VectorXd>& queries,
                                    const std::vector<int>& labels, Rng& rng) {
    if (queries.empty() || queries.size() != labels.size()) {
        throw ConfigError("sample_realization: empty batch or label count mismatch");
    }
    BatchRealization real;
    real.aug_queries.resize(static_cast<Eigen::Index>(queries.size()), m.d_ap());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        Eigen::VectorXd aq = gaussian_noise(fast_apply(queries[i], m.fast_cfg, rng),
                                            m.fast_cfg.noise_sigma, rng);
        real.aug_queries.row(static_cast<Eigen::Index>(i)) = aq.transpose();
    }
    real.dropout_masks =
        sample_dropout_masks(m.dense, static_cast<int>(queries.size()), rng);
    real.labels = labels;
    return real;
}

LossResult loss_and_gradients(const AttentionModel& m, const BatchRealization& real) {
    const Eigen::Index B = real.aug_queries.rows();
    if (B == 0) throw ConfigError("loss_and_gradients: empty batch");

    MultiHeadCache mh_cache;
    Eigen::MatrixXd features =
        multi_head_forward(m.mh, real.aug_queries, m.keys, m.values, &mh_cache);
    DenseCache dense_cache;
    Eigen::MatrixXd logits =
        dense_forward(m.dense, features, real.dropout_masks, &dense_cache);
    check_finite(logits, "dense logits");
    Eigen::MatrixXd p = softmax_rows(logits);

    LossResult res;
    Eigen::MatrixXd d_logits = p;
    int correct = 0;
    for (Eigen::Index r = 0; r < B; ++r) {
        const int y = real.labels[static_cast<std::size_t>(r)];
        if (y < 0 || y >= m.n_rp()) {
            throw DataError("loss_and_gradients: label out of range");
        }
        res.loss += -std::log(std::max(p(r, y), 1e-300));
        d_logits(r, y) -= 1.0;
        Eigen::Index argmax;
        p.row(r).maxCoeff(&argmax);
        if (static_cast<int>(argmax) == y) ++correct;
    }
    res.loss /= static_cast<double>(B);
    res.accuracy = static_cast<double>(correct) / static_cast<double>(B);
    if (!std::isfinite(res.loss)) throw NumericError("loss_and_gradients: non-finite loss");

    d_logits /= static_cast<double>(B);
    DenseGrads dg = dense_backward(m.dense, dense_cache, real.dropout_masks, d_logits);
    res.grads.mh = multi_head_backward(m.mh, mh_cache, m.keys, m.values, dg.d_input);
    res.grads.dense = std::move(dg);
    return res;
}

LossResult loss_and_gradients(const AttentionModel& m,
                              const std::vector<Eigen::VectorXd>& queries,
                              const std::vector<int>& labels, Rng& rng) {
    return loss_and_gradients(m, sample_realization(m, queries, labels, rng));
}

long long count_params(const AttentionModel& m) {
    const long long nh = m.mh.n_heads;
    const long long hs = m.mh.head_size;
    long long total = nh * hs * (2LL * m.d_ap() + m.n_rp()) + nh * hs * m.mh.d_out();
    long long in = m.mh.d_out();
    for (std::size_t l = 0; l < m.dense.n_layers(); ++l) {
        const long long out = m.dense.w[l].cols();
        total += in * out + out;
        in = out;
    }
    return total;
}

long long enumerate_params(const AttentionModel& m) {
    long long total = 0;
    for (const auto& w : m.mh.w_q) total += w.size();
    for (const auto& w : m.mh.w_k) total += w.size();
    for (const auto& w : m.mh.w_v) total += w.size();
    total += m.mh.w_o.size();
    for (const auto& w : m.dense.w) total += w.size();
    for (const auto& b : m.dense.b) total += b.size();
    return total;
}

} // namespace anvil
