#include "anvil/attention.hpp"

#include <cmath>
#include <random>

#include "anvil/errors.hpp"

namespace anvil {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        Eigen::ArrayXd e = (logits.row(r).array() - m).exp();
        out.row(r) = (e / e.sum()).matrix();
    }
    return out;
}

AttentionResult scaled_dot_attention(const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& K,
                                     const Eigen::MatrixXd& V) {
    if (Q.cols() != K.cols()) {
        throw ConfigError("scaled_dot_attention: Q and K key dimensions differ");
    }
    if (K.rows() != V.rows()) {
        throw ConfigError("scaled_dot_attention: K and V row counts differ");
    }
    if (Q.cols() < 1) throw ConfigError("scaled_dot_attention: d_k must be >= 1");
    AttentionResult res;
    const double scale = 1.0 / std::sqrt(static_cast<double>(Q.cols()));
    res.weights = softmax_rows(Q * K.transpose() * scale);
    res.output = res.weights * V;
    return res;
}

namespace {

Eigen::MatrixXd uniform_fan_in(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(rows));
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    }
    return m;
}

} // namespace

MultiHeadParams MultiHeadParams::init(int n_heads, int head_size, int d_ap, int n_rp,
                                      int d_out, Rng& rng) {
    if (n_heads < 1 || head_size < 1 || d_ap < 1 || n_rp < 1 || d_out < 1) {
        throw ConfigError("MultiHeadParams: all dimensions must be >= 1");
    }
    MultiHeadParams p;
    p.n_heads = n_heads;
    p.head_size = head_size;
    for (int i = 0; i < n_heads; ++i) {
        p.w_q.push_back(uniform_fan_in(d_ap, head_size, rng));
        p.w_k.push_back(uniform_fan_in(d_ap, head_size, rng));
        p.w_v.push_back(uniform_fan_in(n_rp, head_size, rng));
    }
    p.w_o = uniform_fan_in(static_cast<Eigen::Index>(n_heads) * head_size, d_out, rng);
    return p;
}

Eigen::MatrixXd multi_head_forward(const MultiHeadParams& p,
                                   const Eigen::MatrixXd& queries,
                                   const Eigen::MatrixXd& K,
                                   const Eigen::MatrixXd& V,
                                   MultiHeadCache* cache) {
    if (queries.cols() != p.d_ap() || K.cols() != p.d_ap()) {
        throw ConfigError("multi_head_forward: query/key width != d_ap");
    }
    if (V.cols() != p.n_rp() || K.rows() != V.rows()) {
        throw ConfigError("multi_head_forward: value shape mismatch");
    }
    const int hs = p.head_size;
    const double scale = 1.0 / std::sqrt(static_cast<double>(hs));
    Eigen::MatrixXd concat(queries.rows(), static_cast<Eigen::Index>(p.n_heads) * hs);
    if (cache) {
        cache->q_in = queries;
        cache->q_proj.resize(p.n_heads);
        cache->k_proj.resize(p.n_heads);
        cache->v_proj.resize(p.n_heads);
        cache->weights.resize(p.n_heads);
    }
    for (int i = 0; i < p.n_heads; ++i) {
        Eigen::MatrixXd qp = queries * p.w_q[i];
        Eigen::MatrixXd kp = K * p.w_k[i];
        Eigen::MatrixXd vp = V * p.w_v[i];
        Eigen::MatrixXd a = softmax_rows(qp * kp.transpose() * scale);
        concat.middleCols(static_cast<Eigen::Index>(i) * hs, hs) = a * vp;
        if (cache) {
            cache->q_proj[i] = std::move(qp);
            cache->k_proj[i] = std::move(kp);
            cache->v_proj[i] = std::move(vp);
            cache->weights[i] = std::move(a);
        }
    }
    if (cache) cache->concat = concat;
    return concat * p.w_o;
}

MultiHeadGrads multi_head_backward(const MultiHeadParams& p,
                                   const MultiHeadCache& cache,
                                   const Eigen::MatrixXd& K,
                                   const Eigen::MatrixXd& V,
                                   const Eigen::MatrixXd& d_out) {
    const int hs = p.head_size;
    const double scale = 1.0 / std::sqrt(static_cast<double>(hs));
    MultiHeadGrads g;
    g.w_o = cache.concat.transpose() * d_out;
    Eigen::MatrixXd d_concat = d_out * p.w_o.transpose();
    g.w_q.resize(p.n_heads);
    g.w_k.resize(p.n_heads);
    g.w_v.resize(p.n_heads);
    for (int i = 0; i < p.n_heads; ++i) {
        const Eigen::MatrixXd d_head =
            d_concat.middleCols(static_cast<Eigen::Index>(i) * hs, hs);
        const Eigen::MatrixXd& a = cache.weights[i];
        Eigen::MatrixXd d_a = d_head * cache.v_proj[i].transpose();        // B x N
        g.w_v[i] = V.transpose() * (a.transpose() * d_head);               // n_rp x HS
        // Softmax backward per row: dS = A .* (dA - rowsum(A .* dA)).
        Eigen::VectorXd row_dot = (a.array() * d_a.array()).rowwise().sum();
        Eigen::MatrixXd d_s =
            (a.array() * (d_a.array().colwise() - row_dot.array())).matrix() * scale;
        g.w_q[i] = cache.q_in.transpose() * (d_s * cache.k_proj[i]);       // d_ap x HS
        g.w_k[i] = K.transpose() * (d_s.transpose() * cache.q_proj[i]);    // d_ap x HS
    }
    return g;
}

DenseStack DenseStack::init(int d_in, const std::vector<int>& hidden, int d_out,
                            double dropout, Rng& rng) {
    if (d_in < 1 || d_out < 1) throw ConfigError("DenseStack: widths must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("DenseStack: dropout in [0, 1)");
    DenseStack s;
    s.dropout = dropout;
    int in = d_in;
    for (int wdt : hidden) {
        if (wdt < 1) throw ConfigError("DenseStack: widths must be >= 1");
        s.w.push_back(uniform_fan_in(in, wdt, rng));
        s.b.push_back(Eigen::VectorXd::Zero(wdt));
        in = wdt;
    }
    s.w.push_back(uniform_fan_in(in, d_out, rng));
    s.b.push_back(Eigen::VectorXd::Zero(d_out));
    return s;
}

std::vector<Eigen::MatrixXd> sample_dropout_masks(const DenseStack& s, int batch, Rng& rng) {
    std::vector<Eigen::MatrixXd> masks;
    if (s.dropout <= 0.0) return masks;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double keep = 1.0 - s.dropout;
    for (std::size_t l = 0; l + 1 < s.n_layers(); ++l) {
        Eigen::MatrixXd m(batch, s.w[l].cols());
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                m(r, c) = coin(rng) < keep ? 1.0 / keep : 0.0;
            }
        }
        masks.push_back(std::move(m));
    }
    return masks;
}

Eigen::MatrixXd dense_forward(const DenseStack& s, const Eigen::MatrixXd& x,
                              const std::vector<Eigen::MatrixXd>& masks,
                              DenseCache* cache) {
    if (x.cols() != s.d_in()) throw ConfigError("dense_forward: input width mismatch");
    if (!masks.empty() && masks.size() != s.n_layers() - 1) {
        throw ConfigError("dense_forward: mask count != hidden layer count");
    }
    if (cache) {
        cache->input = x;
        cache->act.clear();
    }
    Eigen::MatrixXd h = x;
    for (std::size_t l = 0; l + 1 < s.n_layers(); ++l) {
        h = ((h * s.w[l]).rowwise() + s.b[l].transpose()).cwiseMax(0.0);
        if (!masks.empty()) h.array() *= masks[l].array();
        if (cache) cache->act.push_back(h);
    }
    return (h * s.w.back()).rowwise() + s.b.back().transpose();
}

DenseGrads dense_backward(const DenseStack& s, const DenseCache& cache,
                          const std::vector<Eigen::MatrixXd>& masks,
                          const Eigen::MatrixXd& d_logits) {
    const std::size_t L = s.n_layers();
    DenseGrads g;
    g.w.resize(L);
    g.b.resize(L);
    Eigen::MatrixXd d = d_logits;
    for (std::size_t l = L; l-- > 0;) {
        const Eigen::MatrixXd& in = (l == 0) ? cache.input : cache.act[l - 1];
        g.w[l] = in.transpose() * d;
        g.b[l] = d.colwise().sum().transpose();
        if (l == 0) {
            g.d_input = d * s.w[0].transpose();
            break;
        }
        Eigen::MatrixXd d_act = d * s.w[l].transpose();
        if (!masks.empty()) d_act.array() *= masks[l - 1].array();
        // act entries survive ReLU iff > 0 (masked entries are 0 either way).
        d = ((cache.act[l - 1].array() > 0.0).cast<double>() * d_act.array()).matrix();
    }
    return g;
}

} // namespace anvil
