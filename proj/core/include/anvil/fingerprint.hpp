#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace anvil {

/// Fixed, ordered universe of access-point identifiers. The ordering is
/// decided at construction (from the offline survey) and never changes;
/// every fingerprint vector is laid out in this order.
class ApRegistry {
public:
    ApRegistry() = default;
    explicit ApRegistry(std::vector<std::string> ap_ids);

    std::size_t size() const { return ap_ids_.size(); }
    const std::vector<std::string>& ap_ids() const { return ap_ids_; }
    const std::string& id_at(std::size_t i) const { return ap_ids_.at(i); }

    /// Position of an identifier, or nullopt if unknown.
    std::optional<std::size_t> index_of(const std::string& ap_id) const;

    bool operator==(const ApRegistry& other) const { return ap_ids_ == other.ap_ids_; }

    /// FNV-1a over the ordered identifiers; stored in model artifacts to
    /// detect registry/model mismatches.
    std::uint64_t hash() const;

private:
    std::vector<std::string> ap_ids_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// One RSSI vector over the full registry. `Raw` holds dBm in [-100, 0];
/// `Normalized` holds [0, 1] after the affine map (v + 100) / 100.
enum class SignalForm { Raw, Normalized };

struct Fingerprint {
    Eigen::VectorXd rssi;
    SignalForm form = SignalForm::Raw;
    std::string device_id;
    std::optional<int> rp_id;            // absent for online queries
    std::optional<std::int64_t> timestamp;
};

struct ReferencePoint {
    int rp_id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
};

/// Map [-100, 0] dBm to [0, 1]; -100 (no signal) maps exactly to 0.
Fingerprint normalize(const Fingerprint& fp);

/// Inverse of normalize: v * 100 - 100.
Fingerprint denormalize(const Fingerprint& fp);

struct AlignedScan {
    Fingerprint fingerprint;     // raw form, registry length
    std::size_t discarded = 0;   // scan APs not present in the registry
};

/// Lay a scan out in registry order; missing APs read -100 dBm, unknown
/// APs are discarded and tallied. Duplicate ap_ids in one scan are rejected.
AlignedScan align_to_registry(const std::vector<std::pair<std::string, double>>& scan,
                              const ApRegistry& registry);

/// One-hot row of width n_rp with a single 1 at rp_id.
Eigen::VectorXd one_hot(int rp_id, int n_rp);

} // namespace anvil
