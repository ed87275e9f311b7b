#include "anvil/fingerprint.hpp"

#include <cmath>
#include <unordered_set>

#include "anvil/errors.hpp"

namespace anvil {

ApRegistry::ApRegistry(std::vector<std::string> ap_ids) : ap_ids_(std::move(ap_ids)) {
    index_.reserve(ap_ids_.size());
    for (std::size_t i = 0; i < ap_ids_.size(); ++i) {
        auto [it, inserted] = index_.emplace(ap_ids_[i], i);
        if (!inserted) {
            throw DataError("duplicate AP identifier in registry: " + ap_ids_[i]);
        }
    }
}

std::optional<std::size_t> ApRegistry::index_of(const std::string& ap_id) const {
    auto it = index_.find(ap_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t ApRegistry::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& id : ap_ids_) {
        for (unsigned char c : id) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;  // separator between identifiers
        h *= 0x100000001b3ULL;
    }
    return h;
}

Fingerprint normalize(const Fingerprint& fp) {
    if (fp.form != SignalForm::Raw) {
        throw DataError("normalize: fingerprint is already normalized");
    }
    Fingerprint out = fp;
    for (Eigen::Index i = 0; i < fp.rssi.size(); ++i) {
        const double v = fp.rssi[i];
        if (!(v >= -100.0 && v <= 0.0)) {
            throw DataError("normalize: RSSI out of [-100, 0] at AP index " +
                            std::to_string(i) + " (value " + std::to_string(v) + ")");
        }
        out.rssi[i] = (v + 100.0) / 100.0;
    }
    out.form = SignalForm::Normalized;
    return out;
}

Fingerprint denormalize(const Fingerprint& fp) {
    if (fp.form != SignalForm::Normalized) {
        throw DataError("denormalize: fingerprint is not normalized");
    }
    Fingerprint out = fp;
    for (Eigen::Index i = 0; i < fp.rssi.size(); ++i) {
        const double v = fp.rssi[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DataError("denormalize: value out of [0, 1] at AP index " +
                            std::to_string(i));
        }
        out.rssi[i] = v * 100.0 - 100.0;
    }
    out.form = SignalForm::Raw;
    return out;
}

AlignedScan align_to_registry(const std::vector<std::pair<std::string, double>>& scan,
                              const ApRegistry& registry) {
    AlignedScan out;
    out.fingerprint.rssi = Eigen::VectorXd::Constant(
        static_cast<Eigen::Index>(registry.size()), -100.0);
    out.fingerprint.form = SignalForm::Raw;

    std::unordered_set<std::string> seen;
    for (const auto& [ap_id, rssi] : scan) {
        if (!(rssi >= -100.0 && rssi <= 0.0)) {
            throw DataError("align_to_registry: RSSI out of [-100, 0] for AP " + ap_id);
        }
        if (!seen.insert(ap_id).second) {
            throw DataError("align_to_registry: duplicate AP in scan: " + ap_id);
        }
        auto idx = registry.index_of(ap_id);
        if (!idx) {
            ++out.discarded;
            continue;
        }
        out.fingerprint.rssi[static_cast<Eigen::Index>(*idx)] = rssi;
    }
    return out;
}

Eigen::VectorXd one_hot(int rp_id, int n_rp) {
    if (rp_id < 0 || rp_id >= n_rp) {
        throw DataError("one_hot: rp_id " + std::to_string(rp_id) +
                        " out of range [0, " + std::to_string(n_rp) + ")");
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_rp);
    v[rp_id] = 1.0;
    return v;
}

} // namespace anvil
