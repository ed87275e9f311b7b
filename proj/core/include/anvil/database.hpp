#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "anvil/fingerprint.hpp"

namespace anvil {

/// The offline keys/values store: normalized fingerprints, their one-hot
/// RP labels, and the RP coordinate map. Immutable after construction.
class FingerprintDatabase {
public:
    FingerprintDatabase() = default;
    FingerprintDatabase(ApRegistry registry,
                        std::vector<Fingerprint> normalized_fps,
                        std::map<int, std::pair<double, double>> rp_coords);

    const ApRegistry& registry() const { return registry_; }
    const std::vector<Fingerprint>& fingerprints() const { return fingerprints_; }
    const std::map<int, std::pair<double, double>>& rp_coords() const { return rp_coords_; }

    std::size_t size() const { return fingerprints_.size(); }
    int n_rp() const { return static_cast<int>(rp_coords_.size()); }
    int dim() const { return static_cast<int>(registry_.size()); }

    std::pair<double, double> coords_of(int rp_id) const;

    /// Fingerprints stacked as rows, N x d_ap.
    Eigen::MatrixXd keys_matrix() const;
    /// One-hot labels stacked as rows, N x n_rp.
    Eigen::MatrixXd labels_matrix() const;

private:
    ApRegistry registry_;
    std::vector<Fingerprint> fingerprints_;
    std::map<int, std::pair<double, double>> rp_coords_;
};

/// Seeded per-RP partition: exactly n_train / n_test fingerprints per RP,
/// disjoint, both halves sharing the registry and coordinates.
std::pair<FingerprintDatabase, FingerprintDatabase>
split_per_rp(const FingerprintDatabase& db, int n_train, int n_test, std::uint64_t seed);

} // namespace anvil
