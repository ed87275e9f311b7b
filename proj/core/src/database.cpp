#include "anvil/database.hpp"

#include <algorithm>
#include <numeric>

#include "anvil/errors.hpp"
#include "anvil/rng.hpp"

namespace anvil {

FingerprintDatabase::FingerprintDatabase(ApRegistry registry,
                                         std::vector<Fingerprint> normalized_fps,
                                         std::map<int, std::pair<double, double>> rp_coords)
    : registry_(std::move(registry)),
      fingerprints_(std::move(normalized_fps)),
      rp_coords_(std::move(rp_coords)) {
    // rp_ids must be dense 0..n_rp-1; loaders remap sparse ids before this point.
    int expected = 0;
    for (const auto& [rp, xy] : rp_coords_) {
        if (rp != expected++) {
            throw DataError("FingerprintDatabase: rp_ids are not dense 0..n_rp-1");
        }
    }
    for (std::size_t i = 0; i < fingerprints_.size(); ++i) {
        const auto& fp = fingerprints_[i];
        if (fp.form != SignalForm::Normalized) {
            throw DataError("FingerprintDatabase: fingerprint " + std::to_string(i) +
                            " is not normalized");
        }
        if (fp.rssi.size() != static_cast<Eigen::Index>(registry_.size())) {
            throw DataError("FingerprintDatabase: fingerprint " + std::to_string(i) +
                            " length != registry size");
        }
        if (!fp.rp_id || rp_coords_.find(*fp.rp_id) == rp_coords_.end()) {
            throw DataError("FingerprintDatabase: fingerprint " + std::to_string(i) +
                            " has no valid rp_id");
        }
    }
}

std::pair<double, double> FingerprintDatabase::coords_of(int rp_id) const {
    auto it = rp_coords_.find(rp_id);
    if (it == rp_coords_.end()) {
        throw DataError("unknown rp_id " + std::to_string(rp_id));
    }
    return it->second;
}

Eigen::MatrixXd FingerprintDatabase::keys_matrix() const {
    Eigen::MatrixXd m(fingerprints_.size(), registry_.size());
    for (std::size_t i = 0; i < fingerprints_.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = fingerprints_[i].rssi.transpose();
    }
    return m;
}

Eigen::MatrixXd FingerprintDatabase::labels_matrix() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(fingerprints_.size(), n_rp());
    for (std::size_t i = 0; i < fingerprints_.size(); ++i) {
        m(static_cast<Eigen::Index>(i), *fingerprints_[i].rp_id) = 1.0;
    }
    return m;
}

std::pair<FingerprintDatabase, FingerprintDatabase>
split_per_rp(const FingerprintDatabase& db, int n_train, int n_test, std::uint64_t seed) {
    if (n_train < 0 || n_test < 0) {
        throw ConfigError("split_per_rp: negative split sizes");
    }
    std::map<int, std::vector<std::size_t>> by_rp;
    for (std::size_t i = 0; i < db.size(); ++i) {
        by_rp[*db.fingerprints()[i].rp_id].push_back(i);
    }
    std::vector<Fingerprint> train_fps, test_fps;
    Rng rng = make_rng(seed);
    for (auto& [rp, indices] : by_rp) {
        if (indices.size() < static_cast<std::size_t>(n_train + n_test)) {
            throw DataError("split_per_rp: RP " + std::to_string(rp) + " has only " +
                            std::to_string(indices.size()) + " fingerprints, need " +
                            std::to_string(n_train + n_test));
        }
        std::shuffle(indices.begin(), indices.end(), rng);
        for (int k = 0; k < n_train; ++k) train_fps.push_back(db.fingerprints()[indices[k]]);
        for (int k = 0; k < n_test; ++k) test_fps.push_back(db.fingerprints()[indices[n_train + k]]);
    }
    return {FingerprintDatabase(db.registry(), std::move(train_fps), db.rp_coords()),
            FingerprintDatabase(db.registry(), std::move(test_fps), db.rp_coords())};
}

} // namespace anvil
