#pragma once

#include <Eigen/Core>
#include <vector>

#include "anvil/rng.hpp"

namespace anvil {

/// Row-wise softmax with max subtraction; each output row sums to 1.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

struct AttentionResult {
    Eigen::MatrixXd output;   // m x d_v
    Eigen::MatrixXd weights;  // m x n, rows sum to 1
};

/// softmax(Q K^T / sqrt(d_k)) V with d_k = Q.cols().
AttentionResult scaled_dot_attention(const Eigen::MatrixXd& Q,
                                     const Eigen::MatrixXd& K,
                                     const Eigen::MatrixXd& V);

/// Trainable multi-head attention parameters. Projections carry no biases.
struct MultiHeadParams {
    int n_heads = 5;
    int head_size = 50;
    std::vector<Eigen::MatrixXd> w_q;  // d_ap x HS per head
    std::vector<Eigen::MatrixXd> w_k;  // d_ap x HS per head
    std::vector<Eigen::MatrixXd> w_v;  // n_rp x HS per head
    Eigen::MatrixXd w_o;               // (NH*HS) x d_out

    int d_ap() const { return static_cast<int>(w_q.front().rows()); }
    int n_rp() const { return static_cast<int>(w_v.front().rows()); }
    int d_out() const { return static_cast<int>(w_o.cols()); }

    /// Scaled uniform fan-in init: U(-sqrt(1/fan_in), sqrt(1/fan_in)).
    static MultiHeadParams init(int n_heads, int head_size, int d_ap, int n_rp,
                                int d_out, Rng& rng);
};

/// Intermediates kept for the backward pass.
struct MultiHeadCache {
    Eigen::MatrixXd q_in;  // B x d_ap
    std::vector<Eigen::MatrixXd> q_proj, k_proj, v_proj;  // per head
    std::vector<Eigen::MatrixXd> weights;                 // per head, B x N
    Eigen::MatrixXd concat;                               // B x (NH*HS)
};

/// Concat(h_1..h_NH) W^O over a batch of query rows. K is N x d_ap,
/// V is N x n_rp; both are frozen inputs, not parameters.
Eigen::MatrixXd multi_head_forward(const MultiHeadParams& p,
                                   const Eigen::MatrixXd& queries,
                                   const Eigen::MatrixXd& K,
                                   const Eigen::MatrixXd& V,
                                   MultiHeadCache* cache = nullptr);

struct MultiHeadGrads {
    std::vector<Eigen::MatrixXd> w_q, w_k, w_v;
    Eigen::MatrixXd w_o;
};

/// Parameter gradients for a batch given d(loss)/d(output). Gradients with
/// respect to the frozen K/V inputs are not formed.
MultiHeadGrads multi_head_backward(const MultiHeadParams& p,
                                   const MultiHeadCache& cache,
                                   const Eigen::MatrixXd& K,
                                   const Eigen::MatrixXd& V,
                                   const Eigen::MatrixXd& d_out);

/// Feed-forward classifier head: hidden ReLU layers with interleaved
/// dropout, linear output layer (softmax lives in the loss).
struct DenseStack {
    std::vector<Eigen::MatrixXd> w;  // layer l: in x out
    std::vector<Eigen::VectorXd> b;
    double dropout = 0.10;

    std::size_t n_layers() const { return w.size(); }
    int d_in() const { return static_cast<int>(w.front().rows()); }
    int d_out() const { return static_cast<int>(w.back().cols()); }

    static DenseStack init(int d_in, const std::vector<int>& hidden, int d_out,
                           double dropout, Rng& rng);
};

struct DenseCache {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> act;  // post-ReLU (and post-mask) per hidden layer
};

/// Inverted-dropout masks for each hidden activation: entries are
/// 1/(1-p) with probability 1-p, else 0. Empty vector means inference.
std::vector<Eigen::MatrixXd> sample_dropout_masks(const DenseStack& s, int batch, Rng& rng);

Eigen::MatrixXd dense_forward(const DenseStack& s, const Eigen::MatrixXd& x,
                              const std::vector<Eigen::MatrixXd>& masks,
                              DenseCache* cache = nullptr);

struct DenseGrads {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
    Eigen::MatrixXd d_input;
};

DenseGrads dense_backward(const DenseStack& s, const DenseCache& cache,
                          const std::vector<Eigen::MatrixXd>& masks,
                          const Eigen::MatrixXd& d_logits);

} // namespace anvil
