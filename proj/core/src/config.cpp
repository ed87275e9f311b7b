#include "anvil/config.hpp"

#include <fstream>

#include <json.hpp>

#include "anvil/errors.hpp"

namespace anvil {

namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return j;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<std::pair<double, double>> point_list(const json& j) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return pts;
}

FastConfig parse_fast(const json& j) {
    FastConfig f;
    maybe(j, "p_dropout", f.p_dropout);
    maybe(j, "p_brightness", f.p_brightness);
    maybe(j, "brightness_delta_max", f.brightness_delta_max);
    maybe(j, "p_contrast", f.p_contrast);
    if (j.contains("contrast_range")) {
        f.contrast_range = {j.at("contrast_range").at(0).get<double>(),
                            j.at("contrast_range").at(1).get<double>()};
    }
    maybe(j, "noise_sigma", f.noise_sigma);
    f.validate();
    return f;
}

OptimizerConfig parse_opt(const json& j) {
    OptimizerConfig o;
    maybe(j, "learning_rate", o.learning_rate);
    maybe(j, "beta1", o.beta1);
    maybe(j, "beta2", o.beta2);
    maybe(j, "eps", o.eps);
    return o;
}

} // namespace

SynthConfig parse_synth_config(const std::filesystem::path& path) {
    const json j = read_json(path);
    SynthConfig cfg;

    if (j.contains("floorplans") && j.at("floorplans").is_array()) {
        cfg.floorplans.clear();
        for (const auto& f : j.at("floorplans")) {
            FloorplanSpec spec;
            maybe(f, "id", spec.id);
            maybe(f, "n_rp", spec.n_rp);
            maybe(f, "rp_spacing_m", spec.rp_spacing_m);
            maybe(f, "n_ap", spec.n_ap);
            maybe(f, "seed", spec.seed);
            if (f.contains("path_shape")) spec.path_shape = point_list(f.at("path_shape"));
            if (f.contains("ap_positions")) spec.ap_positions = point_list(f.at("ap_positions"));
            validate(spec);
            cfg.floorplans.push_back(std::move(spec));
        }
    }
    if (j.contains("pathloss")) {
        const auto& p = j.at("pathloss");
        maybe(p, "p0_dbm", cfg.pathloss.p0_dbm);
        maybe(p, "n_exp", cfg.pathloss.n_exp);
        maybe(p, "d0_m", cfg.pathloss.d0_m);
        maybe(p, "shadow_sigma_db", cfg.pathloss.shadow_sigma_db);
        maybe(p, "visibility_floor_dbm", cfg.pathloss.visibility_floor_dbm);
        validate(cfg.pathloss);
    }
    if (j.contains("profiles") && j.at("profiles").is_array()) {
        cfg.profiles.clear();
        for (const auto& p : j.at("profiles")) {
            DeviceProfile prof;
            prof.device_id = p.at("device_id").get<std::string>();
            maybe(p, "offset_db", prof.offset_db);
            maybe(p, "gain", prof.gain);
            maybe(p, "dropout_p", prof.dropout_p);
            maybe(p, "noise_sigma_db", prof.noise_sigma_db);
            validate(prof);
            cfg.profiles.push_back(std::move(prof));
        }
    }
    maybe(j, "per_rp", cfg.per_rp);
    if (cfg.per_rp < 1) throw ConfigError("synth config: per_rp must be >= 1");
    if (cfg.profiles.empty()) throw ConfigError("synth config: no device profiles");
    return cfg;
}

EvalConfig default_eval_config() {
    return EvalConfig{};
}

EvalConfig parse_eval_config(const std::filesystem::path& path) {
    const json j = read_json(path);
    EvalConfig cfg;

    if (j.contains("knn")) {
        const auto& k = j.at("knn");
        maybe(k, "k", cfg.knn.k);
        if (k.contains("metric")) {
            const auto m = k.at("metric").get<std::string>();
            if (m == "euclidean") cfg.knn.metric = KnnMetric::Euclidean;
            else if (m == "pearson") cfg.knn.metric = KnnMetric::PearsonDistance;
            else throw ConfigError("knn config: unknown metric " + m);
        }
        if (cfg.knn.k < 1) throw ConfigError("knn config: k must be >= 1");
    }
    if (j.contains("anvil")) {
        const auto& a = j.at("anvil");
        maybe(a, "n_heads", cfg.anvil.n_heads);
        maybe(a, "head_size", cfg.anvil.head_size);
        maybe(a, "d_out", cfg.anvil.d_out);
        maybe(a, "dense_widths", cfg.anvil.dense_widths);
        maybe(a, "dense_dropout", cfg.anvil.dense_dropout);
        if (a.contains("fast")) cfg.anvil.fast = parse_fast(a.at("fast"));
        if (a.contains("optimizer")) cfg.anvil.opt = parse_opt(a.at("optimizer"));
        maybe(a, "epochs", cfg.anvil.epochs);
        maybe(a, "batch_size", cfg.anvil.batch_size);
        maybe(a, "patience", cfg.anvil.patience);
        maybe(a, "min_delta", cfg.anvil.min_delta);
        maybe(a, "seed", cfg.anvil.seed);
    }
    if (j.contains("adtrain")) {
        const auto& a = j.at("adtrain");
        maybe(a, "dense_widths", cfg.adtrain.dense_widths);
        maybe(a, "dense_dropout", cfg.adtrain.dense_dropout);
        maybe(a, "input_noise_sigma", cfg.adtrain.input_noise_sigma);
        maybe(a, "label_noise_p", cfg.adtrain.label_noise_p);
        if (a.contains("fast")) cfg.adtrain.fast = parse_fast(a.at("fast"));
        if (a.contains("optimizer")) cfg.adtrain.opt = parse_opt(a.at("optimizer"));
        maybe(a, "epochs", cfg.adtrain.epochs);
        maybe(a, "batch_size", cfg.adtrain.batch_size);
        maybe(a, "patience", cfg.adtrain.patience);
        maybe(a, "min_delta", cfg.adtrain.min_delta);
        maybe(a, "seed", cfg.adtrain.seed);
    }
    return cfg;
}

} // namespace anvil
