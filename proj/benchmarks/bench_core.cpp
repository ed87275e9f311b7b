#include <benchmark/benchmark.h>

#include "anvil/attention.hpp"
#include "anvil/baselines.hpp"
#include "anvil/fast_augment.hpp"
#include "anvil/model.hpp"
#include "anvil/rng.hpp"
#include "anvil/train.hpp"

using namespace anvil;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = u(rng);
    }
    return m;
}

Eigen::VectorXd random_query(Eigen::Index n, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng) < 0.3 ? 0.0 : u(rng);
    return v;
}

/// Model shaped like the default floorplan workload: 60 RPs, 81 APs,
/// 8 offline fingerprints per RP.
AttentionModel bench_model(int n_heads, int head_size) {
    Rng rng = make_rng(7);
    const int d_ap = 81, n_rp = 60, per_rp = 8;
    const int d_out = n_heads * head_size;
    AttentionModel m;
    m.mh = MultiHeadParams::init(n_heads, head_size, d_ap, n_rp, d_out, rng);
    m.dense = DenseStack::init(d_out, {256, 128}, n_rp, 0.10, rng);
    m.keys = random_matrix(n_rp * per_rp, d_ap, rng).cwiseAbs();
    m.values = Eigen::MatrixXd::Zero(n_rp * per_rp, n_rp);
    for (int i = 0; i < n_rp * per_rp; ++i) m.values(i, i / per_rp) = 1.0;
    for (int r = 0; r < n_rp; ++r) m.rp_coords[r] = {static_cast<double>(r), 0.0};
    return m;
}

} // namespace

static void BM_scaled_dot_attention(benchmark::State& state) {
    Rng rng = make_rng(1);
    const int n = static_cast<int>(state.range(0));
    Eigen::MatrixXd Q = random_matrix(32, 81, rng);
    Eigen::MatrixXd K = random_matrix(n, 81, rng);
    Eigen::MatrixXd V = random_matrix(n, 60, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scaled_dot_attention(Q, K, V).output);
    }
}
BENCHMARK(BM_scaled_dot_attention)->Arg(120)->Arg(480)->Arg(960);

static void BM_multi_head_forward(benchmark::State& state) {
    AttentionModel m = bench_model(static_cast<int>(state.range(0)), 50);
    Rng rng = make_rng(2);
    Eigen::MatrixXd queries = random_matrix(64, 81, rng).cwiseAbs();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            multi_head_forward(m.mh, queries, m.keys, m.values));
    }
}
BENCHMARK(BM_multi_head_forward)->Arg(1)->Arg(5)->Arg(10);

static void BM_train_step(benchmark::State& state) {
    AttentionModel m = bench_model(5, 50);
    Rng rng = make_rng(3);
    std::vector<Eigen::VectorXd> queries;
    std::vector<int> labels;
    for (int b = 0; b < 64; ++b) {
        queries.push_back(random_query(81, rng));
        labels.push_back(b % 60);
    }
    for (auto _ : state) {
        BatchRealization real = sample_realization(m, queries, labels, rng);
        benchmark::DoNotOptimize(loss_and_gradients(m, real).loss);
    }
}
BENCHMARK(BM_train_step);

static void BM_predict(benchmark::State& state) {
    AttentionModel m = bench_model(5, 50);
    Rng rng = make_rng(4);
    Eigen::VectorXd q = random_query(81, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(predict(m, q));
    }
}
BENCHMARK(BM_predict);

static void BM_fast_apply(benchmark::State& state) {
    Rng rng = make_rng(5);
    FastConfig cfg;
    Eigen::VectorXd q = random_query(state.range(0), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fast_apply(q, cfg, rng));
    }
}
BENCHMARK(BM_fast_apply)->Arg(81)->Arg(300);

static void BM_gaussian_noise(benchmark::State& state) {
    Rng rng = make_rng(6);
    Eigen::VectorXd q = random_query(300, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_noise(q, 0.12, rng));
    }
}
BENCHMARK(BM_gaussian_noise);

static void BM_knn_predict(benchmark::State& state) {
    Rng rng = make_rng(8);
    const int n_rp = 60, per_rp = 8, d_ap = 81;
    std::vector<std::string> ids;
    for (int a = 0; a < d_ap; ++a) ids.push_back("ap_" + std::to_string(a));
    std::map<int, std::pair<double, double>> coords;
    std::vector<Fingerprint> fps;
    for (int r = 0; r < n_rp; ++r) {
        coords[r] = {static_cast<double>(r), 0.0};
        for (int k = 0; k < per_rp; ++k) {
            Fingerprint fp;
            fp.rssi = random_query(d_ap, rng);
            fp.form = SignalForm::Normalized;
            fp.rp_id = r;
            fps.push_back(std::move(fp));
        }
    }
    FingerprintDatabase db(ApRegistry(ids), std::move(fps), std::move(coords));
    KnnConfig cfg;
    cfg.metric = state.range(0) == 0 ? KnnMetric::Euclidean : KnnMetric::PearsonDistance;
    Eigen::VectorXd q = random_query(d_ap, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(knn_predict(db, q, cfg));
    }
}
BENCHMARK(BM_knn_predict)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
