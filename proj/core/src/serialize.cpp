#include "anvil/serialize.hpp"

#include <fstream>

#include <json.hpp>

#include "anvil/errors.hpp"

namespace anvil {

namespace {

using nlohmann::json;

json mat_to_json(const Eigen::MatrixXd& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    j["data"] = std::move(data);
    return j;
}

Eigen::MatrixXd mat_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw DataError("model artifact: tensor size mismatch");
    }
    Eigen::MatrixXd m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++];
    }
    return m;
}

json vec_to_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vec_from_json(const json& j) {
    const auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(data.data(),
                                             static_cast<Eigen::Index>(data.size()));
}

json coords_to_json(const std::map<int, std::pair<double, double>>& coords) {
    json j = json::object();
    for (const auto& [rp, xy] : coords) {
        j[std::to_string(rp)] = {xy.first, xy.second};
    }
    return j;
}

std::map<int, std::pair<double, double>> coords_from_json(const json& j) {
    std::map<int, std::pair<double, double>> coords;
    for (const auto& [k, v] : j.items()) {
        coords[std::stoi(k)] = {v.at(0).get<double>(), v.at(1).get<double>()};
    }
    return coords;
}

json fast_to_json(const FastConfig& f) {
    return {{"p_dropout", f.p_dropout},
            {"p_brightness", f.p_brightness},
            {"brightness_delta_max", f.brightness_delta_max},
            {"p_contrast", f.p_contrast},
            {"contrast_lo", f.contrast_range.first},
            {"contrast_hi", f.contrast_range.second},
            {"noise_sigma", f.noise_sigma}};
}

FastConfig fast_from_json(const json& j) {
    FastConfig f;
    f.p_dropout = j.at("p_dropout").get<double>();
    f.p_brightness = j.at("p_brightness").get<double>();
    f.brightness_delta_max = j.at("brightness_delta_max").get<double>();
    f.p_contrast = j.at("p_contrast").get<double>();
    f.contrast_range = {j.at("contrast_lo").get<double>(), j.at("contrast_hi").get<double>()};
    f.noise_sigma = j.at("noise_sigma").get<double>();
    return f;
}

json dense_to_json(const DenseStack& s) {
    json j;
    j["dropout"] = s.dropout;
    j["w"] = json::array();
    j["b"] = json::array();
    for (const auto& w : s.w) j["w"].push_back(mat_to_json(w));
    for (const auto& b : s.b) j["b"].push_back(vec_to_json(b));
    return j;
}

DenseStack dense_from_json(const json& j) {
    DenseStack s;
    s.dropout = j.at("dropout").get<double>();
    for (const auto& w : j.at("w")) s.w.push_back(mat_from_json(w));
    for (const auto& b : j.at("b")) s.b.push_back(vec_from_json(b));
    return s;
}

json db_to_json(const FingerprintDatabase& db) {
    json j;
    j["ap_ids"] = db.registry().ap_ids();
    j["rp_coords"] = coords_to_json(db.rp_coords());
    j["fingerprints"] = json::array();
    for (const auto& fp : db.fingerprints()) {
        json f;
        f["device_id"] = fp.device_id;
        f["rp_id"] = *fp.rp_id;
        f["rssi"] = vec_to_json(fp.rssi);  // normalized form
        j["fingerprints"].push_back(std::move(f));
    }
    return j;
}

FingerprintDatabase db_from_json(const json& j) {
    ApRegistry registry(j.at("ap_ids").get<std::vector<std::string>>());
    auto coords = coords_from_json(j.at("rp_coords"));
    std::vector<Fingerprint> fps;
    for (const auto& f : j.at("fingerprints")) {
        Fingerprint fp;
        fp.device_id = f.at("device_id").get<std::string>();
        fp.rp_id = f.at("rp_id").get<int>();
        fp.rssi = vec_from_json(f.at("rssi"));
        fp.form = SignalForm::Normalized;
        fps.push_back(std::move(fp));
    }
    return FingerprintDatabase(std::move(registry), std::move(fps), std::move(coords));
}

} // namespace

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
    json j;
    j["version"] = kModelArtifactVersion;
    j["framework"] = artifact.framework;

    if (const auto* m = std::get_if<AttentionModel>(&artifact.model)) {
        j["registry_hash"] = m->registry_hash;
        j["rp_coords"] = coords_to_json(m->rp_coords);
        j["fast"] = fast_to_json(m->fast_cfg);
        j["meta"] = {{"epochs", m->meta.epochs},
                     {"learning_rate", m->meta.learning_rate},
                     {"batch_size", m->meta.batch_size},
                     {"seed", m->meta.seed}};
        json mh;
        mh["n_heads"] = m->mh.n_heads;
        mh["head_size"] = m->mh.head_size;
        mh["w_q"] = json::array();
        mh["w_k"] = json::array();
        mh["w_v"] = json::array();
        for (const auto& w : m->mh.w_q) mh["w_q"].push_back(mat_to_json(w));
        for (const auto& w : m->mh.w_k) mh["w_k"].push_back(mat_to_json(w));
        for (const auto& w : m->mh.w_v) mh["w_v"].push_back(mat_to_json(w));
        mh["w_o"] = mat_to_json(m->mh.w_o);
        j["mh"] = std::move(mh);
        j["dense"] = dense_to_json(m->dense);
        j["keys"] = mat_to_json(m->keys);
        j["values"] = mat_to_json(m->values);
    } else if (const auto* m2 = std::get_if<FfdnnModel>(&artifact.model)) {
        j["registry_hash"] = m2->registry_hash;
        j["rp_coords"] = coords_to_json(m2->rp_coords);
        j["dense"] = dense_to_json(m2->dense);
        j["adtrain"] = {{"augment", static_cast<int>(m2->cfg.augment)},
                        {"input_noise_sigma", m2->cfg.input_noise_sigma},
                        {"label_noise_p", m2->cfg.label_noise_p},
                        {"seed", m2->cfg.seed}};
    } else {
        const auto& m3 = std::get<KnnModel>(artifact.model);
        j["k"] = m3.cfg.k;
        j["metric"] = m3.cfg.metric == KnnMetric::Euclidean ? "euclidean" : "pearson";
        j["db"] = db_to_json(m3.db);
    }

    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << j.dump() << "\n";
    if (!out) throw DataError("write failed: " + path.string());
}

ModelArtifact load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed model artifact " + path.string() + ": " + e.what());
    }
    if (j.at("version").get<int>() != kModelArtifactVersion) {
        throw DataError("unsupported model artifact version in " + path.string());
    }
    ModelArtifact artifact;
    artifact.framework = j.at("framework").get<std::string>();

    if (artifact.framework == "anvil") {
        AttentionModel m;
        m.registry_hash = j.at("registry_hash").get<std::uint64_t>();
        m.rp_coords = coords_from_json(j.at("rp_coords"));
        m.fast_cfg = fast_from_json(j.at("fast"));
        m.meta.epochs = j.at("meta").at("epochs").get<int>();
        m.meta.learning_rate = j.at("meta").at("learning_rate").get<double>();
        m.meta.batch_size = j.at("meta").at("batch_size").get<int>();
        m.meta.seed = j.at("meta").at("seed").get<std::uint64_t>();
        const auto& mh = j.at("mh");
        m.mh.n_heads = mh.at("n_heads").get<int>();
        m.mh.head_size = mh.at("head_size").get<int>();
        for (const auto& w : mh.at("w_q")) m.mh.w_q.push_back(mat_from_json(w));
        for (const auto& w : mh.at("w_k")) m.mh.w_k.push_back(mat_from_json(w));
        for (const auto& w : mh.at("w_v")) m.mh.w_v.push_back(mat_from_json(w));
        m.mh.w_o = mat_from_json(mh.at("w_o"));
        m.dense = dense_from_json(j.at("dense"));
        m.keys = mat_from_json(j.at("keys"));
        m.values = mat_from_json(j.at("values"));
        artifact.model = std::move(m);
    } else if (artifact.framework == "ffdnn" || artifact.framework == "adtrain") {
        FfdnnModel m;
        m.registry_hash = j.at("registry_hash").get<std::uint64_t>();
        m.rp_coords = coords_from_json(j.at("rp_coords"));
        m.dense = dense_from_json(j.at("dense"));
        m.cfg.augment = static_cast<AdTrainAugment>(j.at("adtrain").at("augment").get<int>());
        m.cfg.input_noise_sigma = j.at("adtrain").at("input_noise_sigma").get<double>();
        m.cfg.label_noise_p = j.at("adtrain").at("label_noise_p").get<double>();
        m.cfg.seed = j.at("adtrain").at("seed").get<std::uint64_t>();
        artifact.model = std::move(m);
    } else if (artifact.framework == "knn-euclid" || artifact.framework == "knn-pearson") {
        KnnModel m;
        m.cfg.k = j.at("k").get<int>();
        m.cfg.metric = j.at("metric").get<std::string>() == "euclidean"
                           ? KnnMetric::Euclidean
                           : KnnMetric::PearsonDistance;
        m.db = db_from_json(j.at("db"));
        artifact.model = std::move(m);
    } else {
        throw DataError("unknown framework tag in " + path.string() + ": " +
                        artifact.framework);
    }
    return artifact;
}

} // namespace anvil
