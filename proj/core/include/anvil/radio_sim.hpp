#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "anvil/database.hpp"
#include "anvil/rng.hpp"

namespace anvil {

/// Synthetic floorplan: reference points laid out along a polyline path,
/// plus fixed AP positions.
struct FloorplanSpec {
    std::string id = "floorplan";
    int n_rp = 60;
    double rp_spacing_m = 1.0;
    std::vector<std::pair<double, double>> path_shape;  // empty -> straight line
    int n_ap = 80;
    std::vector<std::pair<double, double>> ap_positions; // empty -> seeded random
    std::uint64_t seed = 0;
};

/// Log-distance path loss with a hard visibility floor.
struct PathLossParams {
    double p0_dbm = -30.0;
    double n_exp = 2.5;
    double d0_m = 1.0;
    double shadow_sigma_db = 2.0;         // per-reading log-normal shadowing
    double visibility_floor_dbm = -95.0;
};

/// Per-device heterogeneity transform: additive offset (brightness),
/// multiplicative gain about the -100 dBm floor (contrast), visible-AP
/// dropout, and per-reading Gaussian noise.
struct DeviceProfile {
    std::string device_id;
    double offset_db = 0.0;
    double gain = 1.0;
    double dropout_p = 0.0;
    double noise_sigma_db = 0.0;
};

void validate(const FloorplanSpec& spec);
void validate(const PathLossParams& pl);
void validate(const DeviceProfile& profile);

/// Reference-point coordinates: n_rp points walked along the path polyline
/// at rp_spacing intervals.
std::vector<ReferencePoint> reference_points(const FloorplanSpec& spec);

/// Resolved AP positions (spec.ap_positions, or seeded random placement in
/// the path bounding box padded by 10 m).
std::vector<std::pair<double, double>> ap_positions(const FloorplanSpec& spec);

/// Deterministic ground-truth radio map, n_rp x n_ap dBm. No shadowing;
/// entries below the visibility floor read -100.
Eigen::MatrixXd ground_truth_map(const FloorplanSpec& spec, const PathLossParams& pl);

/// Apply one device's transform to a truth row. Entries at -100 stay -100;
/// visible entries get gain/offset/noise about the -100 pivot, are clamped
/// to [-100, 0], then dropped to -100 with probability dropout_p.
Eigen::VectorXd apply_device(const Eigen::VectorXd& truth_row,
                             const DeviceProfile& profile, Rng& rng);

/// Generate one database per device: per_rp readings per RP, each with
/// independent shadowing and device noise, rounded to integer dBm.
/// Device streams use independent sub-seeds so results do not depend on
/// generation order.
std::vector<FingerprintDatabase>
generate_dataset(const FloorplanSpec& spec, const PathLossParams& pl,
                 const std::vector<DeviceProfile>& profiles, int per_rp,
                 std::uint64_t seed);

/// Six synthetic devices spanning the offset/gain/dropout/noise ranges
/// observed across real handsets.
std::vector<DeviceProfile> default_device_suite();

/// Four floorplans varying path length and AP count.
std::vector<FloorplanSpec> default_benchmark_suite();

} // namespace anvil
