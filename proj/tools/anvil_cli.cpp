// anvil: synthetic-fingerprint generation, training, prediction and
// cross-device evaluation for RSSI indoor localization.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anvil/config.hpp"
#include "anvil/dataset_io.hpp"
#include "anvil/errors.hpp"
#include "anvil/eval.hpp"
#include "anvil/report.hpp"
#include "anvil/serialize.hpp"

namespace fs = std::filesystem;
using namespace anvil;

namespace {

int g_log_level = 1;  // 0 = error, 1 = info, 2 = debug

void log_info(const std::string& msg) {
    if (g_log_level >= 1) std::cerr << "[info] " << msg << "\n";
}
void log_debug(const std::string& msg) {
    if (g_log_level >= 2) std::cerr << "[debug] " << msg << "\n";
}

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string log_level = "info";
};

fs::path sidecar_for(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".sidecar.json");
    return p;
}

/// Floorplan subdirectories of a data root, sorted for determinism.
std::vector<fs::path> floorplan_dirs(const fs::path& root) {
    std::vector<fs::path> dirs;
    if (!fs::is_directory(root)) throw DataError("not a directory: " + root.string());
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw DataError("no floorplan subdirectories in " + root.string());
    return dirs;
}

/// Device CSVs of one floorplan directory, sorted.
std::vector<fs::path> device_csvs(const fs::path& dir) {
    std::vector<fs::path> csvs;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") csvs.push_back(e.path());
    }
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty()) throw DataError("no device CSVs in " + dir.string());
    return csvs;
}

DeviceSplits load_splits(const fs::path& dir, int n_train, int n_test, std::uint64_t seed) {
    DeviceSplits splits;
    std::uint64_t idx = 0;
    for (const auto& csv : device_csvs(dir)) {
        FingerprintDatabase db = load_dataset(csv, sidecar_for(csv));
        const std::string device = csv.stem().string();
        splits.emplace(device, split_per_rp(db, n_train, n_test, mix_seed(seed, idx++)));
    }
    return splits;
}

int cmd_synth(const fs::path& config_path, const fs::path& out_dir, const CommonOpts& common) {
    SynthConfig cfg =
        config_path.empty() ? SynthConfig{} : parse_synth_config(config_path);
    fs::create_directories(out_dir);
    std::uint64_t fp_idx = 0;
    for (const auto& spec : cfg.floorplans) {
        const fs::path dir = out_dir / spec.id;
        fs::create_directories(dir);
        auto dbs = generate_dataset(spec, cfg.pathloss, cfg.profiles, cfg.per_rp,
                                    mix_seed(common.seed, fp_idx++));
        for (std::size_t d = 0; d < dbs.size(); ++d) {
            const std::string device = cfg.profiles[d].device_id;
            save_dataset(dbs[d], dir / (device + ".csv"), dir / (device + ".sidecar.json"));
        }
        log_info("wrote " + std::to_string(dbs.size()) + " device datasets for floorplan " +
                 spec.id);
    }
    return 0;
}

int cmd_train(const std::string& framework_str, const fs::path& data_dir,
              const std::string& device, const fs::path& config_path,
              const fs::path& out_path, int n_train, int n_test, const CommonOpts& common) {
    const Framework fw = parse_framework(framework_str);
    EvalConfig cfg =
        config_path.empty() ? default_eval_config() : parse_eval_config(config_path);

    auto csvs = device_csvs(data_dir);
    fs::path csv;
    if (!device.empty()) {
        csv = data_dir / (device + ".csv");
        if (!fs::exists(csv)) throw DataError("no dataset for device " + device);
    } else if (csvs.size() == 1) {
        csv = csvs.front();
    } else {
        throw ConfigError("--device required: multiple device CSVs in " + data_dir.string());
    }

    FingerprintDatabase db = load_dataset(csv, sidecar_for(csv));
    auto [train_db, test_db] = split_per_rp(db, n_train, n_test, common.seed);
    log_info("training " + framework_str + " on " + std::to_string(train_db.size()) +
             " fingerprints (" + std::to_string(train_db.n_rp()) + " RPs, " +
             std::to_string(train_db.dim()) + " APs)");

    ModelArtifact artifact;
    artifact.framework = framework_str;
    switch (fw) {
        case Framework::Anvil:
        case Framework::AnvilNoFast: {
            TrainConfig tc = cfg.anvil;
            if (fw == Framework::AnvilNoFast) tc.fast = tc.fast.without_fast();
            tc.seed = common.seed;
            auto [model, report] = train(train_db, tc);
            log_info("trained " + std::to_string(report.epochs_run) + " epochs, final loss " +
                     std::to_string(report.epoch_loss.back()) + ", params " +
                     std::to_string(report.param_count));
            artifact.model = std::move(model);
            break;
        }
        case Framework::KnnEuclid:
        case Framework::KnnPearson: {
            KnnConfig kc = cfg.knn;
            kc.metric = fw == Framework::KnnEuclid ? KnnMetric::Euclidean
                                                   : KnnMetric::PearsonDistance;
            artifact.model = KnnModel{std::move(train_db), kc};
            break;
        }
        case Framework::AdTrain:
        case Framework::Ffdnn:
        case Framework::FfdnnFast: {
            AdTrainConfig ac = cfg.adtrain;
            if (fw == Framework::AdTrain) {
                ac.augment = AdTrainAugment::Gaussian;
            } else if (fw == Framework::Ffdnn) {
                ac.augment = AdTrainAugment::None;
                ac.label_noise_p = 0.0;
            } else {
                ac.augment = AdTrainAugment::Fast;
                ac.fast = cfg.anvil.fast;
                ac.label_noise_p = 0.0;
            }
            ac.seed = common.seed;
            TrainReport report;
            artifact.model = adtrain_train(train_db, ac, &report);
            log_info("trained " + std::to_string(report.epochs_run) + " epochs, final loss " +
                     std::to_string(report.epoch_loss.back()));
            break;
        }
    }
    save_model(artifact, out_path);
    log_info("model written to " + out_path.string());
    return 0;
}

int cmd_predict(const fs::path& model_path, const fs::path& query_csv) {
    ModelArtifact artifact = load_model(model_path);
    auto loc = localizer_from_artifact(artifact);
    FingerprintDatabase queries = load_dataset(query_csv, sidecar_for(query_csv));
    for (const auto& fp : queries.fingerprints()) {
        const Prediction p = loc->locate(fp.rssi);
        std::cout << p.rp_id << ',' << p.x_m << ',' << p.y_m << "\n";
    }
    return 0;
}

int cmd_eval_matrix(const std::string& frameworks_str, const fs::path& data_dir,
                    const fs::path& out_dir, const fs::path& config_path, int n_train,
                    int n_test, const CommonOpts& common) {
    EvalConfig cfg =
        config_path.empty() ? default_eval_config() : parse_eval_config(config_path);
    std::vector<Framework> frameworks;
    std::stringstream ss(frameworks_str);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) frameworks.push_back(parse_framework(tok));
    }
    if (frameworks.empty()) throw ConfigError("eval-matrix: no frameworks given");

    fs::create_directories(out_dir);
    std::vector<SummaryRow> all_rows;
    std::uint64_t fp_idx = 0;
    for (const auto& dir : floorplan_dirs(data_dir)) {
        const std::string fp_id = dir.filename().string();
        auto splits = load_splits(dir, n_train, n_test, mix_seed(common.seed, fp_idx));
        log_info("evaluating floorplan " + fp_id + " (" +
                 std::to_string(splits.size()) + " devices)");
        EvalMatrix matrix = cross_device_matrix(frameworks, splits, cfg,
                                                mix_seed(common.seed, fp_idx + 5000), fp_id);
        emit_matrix_csv(matrix, out_dir / ("matrix_" + fp_id + ".csv"));
        emit_matrix_markdown(matrix, out_dir / ("matrix_" + fp_id + ".md"));
        for (auto& row : summarize(matrix)) all_rows.push_back(std::move(row));
        ++fp_idx;
    }
    emit_summary_csv(all_rows, out_dir / "summary.csv");
    emit_summary_markdown(all_rows, out_dir / "summary.md");
    log_info("reports written to " + out_dir.string());
    return 0;
}

int cmd_ablate(const fs::path& data_dir, const fs::path& out_dir,
               const fs::path& config_path, int n_train, int n_test,
               const CommonOpts& common) {
    EvalConfig cfg =
        config_path.empty() ? default_eval_config() : parse_eval_config(config_path);
    std::map<std::string, DeviceSplits> suite;
    std::uint64_t fp_idx = 0;
    for (const auto& dir : floorplan_dirs(data_dir)) {
        suite.emplace(dir.filename().string(),
                      load_splits(dir, n_train, n_test, mix_seed(common.seed, fp_idx++)));
    }
    auto rows = ablate_fast(suite, cfg, common.seed);
    fs::create_directories(out_dir);
    emit_summary_csv(rows, out_dir / "ablation.csv");
    emit_summary_markdown(rows, out_dir / "ablation.md");
    log_info("ablation report written to " + out_dir.string());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ANVIL device-invariant indoor localization toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // let --seed / --log-level appear after the subcommand

    CommonOpts common;
    app.add_option("--seed", common.seed, "Global RNG seed")->capture_default_str();
    app.add_option("--log-level", common.log_level, "error|info|debug")
        ->check(CLI::IsMember({"error", "info", "debug"}))
        ->capture_default_str();

    fs::path config_path, out_path, data_dir, model_path, query_csv;
    std::string framework, frameworks, device;
    int n_train = 8, n_test = 2;

    auto* synth = app.add_subcommand("synth", "Generate synthetic device datasets");
    synth->add_option("--config", config_path, "Synth config JSON");
    synth->add_option("--out", out_path, "Output directory")->required();

    auto* trainc = app.add_subcommand("train", "Train one framework on one device");
    trainc->add_option("--framework", framework, "Framework name")->required();
    trainc->add_option("--data", data_dir, "Floorplan data directory")->required();
    trainc->add_option("--device", device, "Device id (stem of the CSV)");
    trainc->add_option("--config", config_path, "Training config JSON");
    trainc->add_option("--out", out_path, "Model artifact path")->required();
    trainc->add_option("--n-train", n_train, "Train fingerprints per RP")->capture_default_str();
    trainc->add_option("--n-test", n_test, "Held-out fingerprints per RP")->capture_default_str();

    auto* predict = app.add_subcommand("predict", "Locate query fingerprints");
    predict->add_option("--model", model_path, "Model artifact")->required();
    predict->add_option("--query", query_csv, "Query CSV (dataset schema)")->required();

    auto* evalm = app.add_subcommand("eval-matrix", "Cross-device evaluation matrices");
    evalm->add_option("--frameworks", frameworks, "Comma-separated framework names")->required();
    evalm->add_option("--data", data_dir, "Data root with floorplan subdirectories")->required();
    evalm->add_option("--out", out_path, "Report output directory")->required();
    evalm->add_option("--config", config_path, "Training config JSON");
    evalm->add_option("--n-train", n_train, "Train fingerprints per RP")->capture_default_str();
    evalm->add_option("--n-test", n_test, "Test fingerprints per RP")->capture_default_str();

    auto* ablate = app.add_subcommand("ablate", "FASt ablation study");
    ablate->add_option("--data", data_dir, "Data root with floorplan subdirectories")->required();
    ablate->add_option("--out", out_path, "Report output directory")->required();
    ablate->add_option("--config", config_path, "Training config JSON");
    ablate->add_option("--n-train", n_train, "Train fingerprints per RP")->capture_default_str();
    ablate->add_option("--n-test", n_test, "Test fingerprints per RP")->capture_default_str();

    try {
        app.parse(argc, argv);
        g_log_level = common.log_level == "error" ? 0 : common.log_level == "info" ? 1 : 2;
        log_debug("seed " + std::to_string(common.seed));
        if (synth->parsed()) return cmd_synth(config_path, out_path, common);
        if (trainc->parsed()) {
            return cmd_train(framework, data_dir, device, config_path, out_path, n_train,
                             n_test, common);
        }
        if (predict->parsed()) return cmd_predict(model_path, query_csv);
        if (evalm->parsed()) {
            return cmd_eval_matrix(frameworks, data_dir, out_path, config_path, n_train,
                                   n_test, common);
        }
        if (ablate->parsed()) {
            return cmd_ablate(data_dir, out_path, config_path, n_train, n_test, common);
        }
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
