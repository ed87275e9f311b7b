#include "anvil/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "anvil/errors.hpp"

namespace anvil {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

void save_dataset(const FingerprintDatabase& db,
                  const std::filesystem::path& csv_path,
                  const std::filesystem::path& sidecar_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot open for writing: " + csv_path.string());
    csv.precision(17);

    csv << "device_id,rp_id,x_m,y_m";
    for (int a = 0; a < db.dim(); ++a) csv << ",ap_" << a;
    csv << "\n";

    for (const auto& fp : db.fingerprints()) {
        const Fingerprint raw = denormalize(fp);
        const auto [x, y] = db.coords_of(*fp.rp_id);
        csv << fp.device_id << ',' << *fp.rp_id << ',' << x << ',' << y;
        for (Eigen::Index i = 0; i < raw.rssi.size(); ++i) {
            const long long v = std::llround(raw.rssi[i]);
            if (std::abs(raw.rssi[i] - static_cast<double>(v)) > 1e-9) {
                throw DataError("save_dataset: non-integer raw RSSI at AP index " +
                                std::to_string(i));
            }
            csv << ',' << v;
        }
        csv << "\n";
    }
    if (!csv) throw DataError("write failed: " + csv_path.string());

    nlohmann::json side;
    side["columns"] = nlohmann::json::object();
    for (int a = 0; a < db.dim(); ++a) {
        side["columns"][std::to_string(a)] = db.registry().id_at(a);
    }
    side["rp_coords"] = nlohmann::json::object();
    for (const auto& [rp, xy] : db.rp_coords()) {
        side["rp_coords"][std::to_string(rp)] = {xy.first, xy.second};
    }
    std::ofstream js(sidecar_path);
    if (!js) throw DataError("cannot open for writing: " + sidecar_path.string());
    js << side.dump(2) << "\n";
}

FingerprintDatabase load_dataset(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& sidecar_path) {
    std::ifstream js(sidecar_path);
    if (!js) throw DataError("cannot open: " + sidecar_path.string());
    nlohmann::json side;
    try {
        js >> side;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed sidecar JSON " + sidecar_path.string() + ": " + e.what());
    }

    std::map<int, std::string> columns;
    for (auto& [k, v] : side.at("columns").items()) {
        columns[std::stoi(k)] = v.get<std::string>();
    }
    std::vector<std::string> ap_ids;
    for (auto& [idx, id] : columns) ap_ids.push_back(id);
    ApRegistry registry(std::move(ap_ids));

    std::map<int, std::pair<double, double>> raw_coords;
    for (auto& [k, v] : side.at("rp_coords").items()) {
        raw_coords[std::stoi(k)] = {v.at(0).get<double>(), v.at(1).get<double>()};
    }
    // Remap possibly-sparse rp_ids to dense 0..n-1 in ascending order.
    std::map<int, int> remap;
    std::map<int, std::pair<double, double>> rp_coords;
    for (const auto& [rp, xy] : raw_coords) {
        int dense = static_cast<int>(remap.size());
        remap[rp] = dense;
        rp_coords[dense] = xy;
    }

    std::ifstream csv(csv_path);
    if (!csv) throw DataError("cannot open: " + csv_path.string());
    std::string line;
    if (!std::getline(csv, line)) throw DataError("empty CSV: " + csv_path.string());

    std::vector<Fingerprint> fps;
    std::size_t lineno = 1;
    while (std::getline(csv, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 4 + registry.size()) {
            throw DataError(csv_path.string() + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(4 + registry.size()) +
                            " cells, got " + std::to_string(cells.size()));
        }
        Fingerprint fp;
        fp.device_id = cells[0];
        auto it = remap.find(std::stoi(cells[1]));
        if (it == remap.end()) {
            throw DataError(csv_path.string() + ":" + std::to_string(lineno) +
                            ": rp_id not in sidecar: " + cells[1]);
        }
        fp.rp_id = it->second;
        fp.rssi.resize(static_cast<Eigen::Index>(registry.size()));
        for (std::size_t a = 0; a < registry.size(); ++a) {
            fp.rssi[static_cast<Eigen::Index>(a)] = std::stod(cells[4 + a]);
        }
        fp.form = SignalForm::Raw;
        fps.push_back(normalize(fp));
    }
    return FingerprintDatabase(std::move(registry), std::move(fps), std::move(rp_coords));
}

} // namespace anvil
