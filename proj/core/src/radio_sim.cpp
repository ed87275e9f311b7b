#include "anvil/radio_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "anvil/errors.hpp"

namespace anvil {

void validate(const FloorplanSpec& spec) {
    if (spec.n_rp < 2) throw ConfigError("FloorplanSpec: n_rp must be >= 2");
    if (spec.n_ap < 1) throw ConfigError("FloorplanSpec: n_ap must be >= 1");
    if (!(spec.rp_spacing_m > 0)) throw ConfigError("FloorplanSpec: rp_spacing_m must be > 0");
    auto finite = [](const std::pair<double, double>& p) {
        return std::isfinite(p.first) && std::isfinite(p.second);
    };
    for (const auto& p : spec.path_shape) {
        if (!finite(p)) throw ConfigError("FloorplanSpec: non-finite path waypoint");
    }
    for (const auto& p : spec.ap_positions) {
        if (!finite(p)) throw ConfigError("FloorplanSpec: non-finite AP position");
    }
    if (!spec.ap_positions.empty() &&
        spec.ap_positions.size() != static_cast<std::size_t>(spec.n_ap)) {
        throw ConfigError("FloorplanSpec: ap_positions size != n_ap");
    }
}

void validate(const PathLossParams& pl) {
    if (!(pl.d0_m > 0)) throw ConfigError("PathLossParams: d0_m must be > 0");
    if (pl.shadow_sigma_db < 0) throw ConfigError("PathLossParams: shadow_sigma_db must be >= 0");
    if (!(pl.visibility_floor_dbm > -100.0 && pl.visibility_floor_dbm < 0.0)) {
        throw ConfigError("PathLossParams: visibility_floor_dbm must be in (-100, 0)");
    }
}

void validate(const DeviceProfile& profile) {
    if (!(profile.gain > 0)) throw ConfigError("DeviceProfile: gain must be > 0");
    if (profile.dropout_p < 0 || profile.dropout_p > 1) {
        throw ConfigError("DeviceProfile: dropout_p must be in [0, 1]");
    }
    if (profile.noise_sigma_db < 0) throw ConfigError("DeviceProfile: noise_sigma_db must be >= 0");
}

std::vector<ReferencePoint> reference_points(const FloorplanSpec& spec) {
    validate(spec);
    std::vector<std::pair<double, double>> path = spec.path_shape;
    if (path.empty()) {
        path = {{0.0, 0.0}, {static_cast<double>(spec.n_rp) * spec.rp_spacing_m, 0.0}};
    }
    if (path.size() == 1) path.push_back({path[0].first + 1.0, path[0].second});

    std::vector<ReferencePoint> rps;
    rps.reserve(spec.n_rp);
    std::size_t seg = 0;
    double seg_pos = 0.0;  // distance already walked on the current segment
    auto seg_len = [&](std::size_t s) {
        const double dx = path[s + 1].first - path[s].first;
        const double dy = path[s + 1].second - path[s].second;
        return std::hypot(dx, dy);
    };
    double x = path[0].first, y = path[0].second;
    for (int r = 0; r < spec.n_rp; ++r) {
        rps.push_back({r, x, y});
        double remaining = spec.rp_spacing_m;
        while (remaining > 0) {
            const double len = seg_len(seg);
            if (len <= 0) {
                if (seg + 2 < path.size()) {
                    ++seg;
                    seg_pos = 0;
                    continue;
                }
                throw ConfigError("FloorplanSpec: degenerate path (zero-length final segment)");
            }
            const double left = len - seg_pos;
            // Walk past the last waypoint along the final segment direction.
            if (seg + 2 >= path.size() || left > remaining) {
                const double ux = (path[seg + 1].first - path[seg].first) / len;
                const double uy = (path[seg + 1].second - path[seg].second) / len;
                x += ux * remaining;
                y += uy * remaining;
                seg_pos += remaining;
                remaining = 0;
            } else {
                remaining -= left;
                ++seg;
                seg_pos = 0;
                x = path[seg].first;
                y = path[seg].second;
            }
        }
    }
    return rps;
}

std::vector<std::pair<double, double>> ap_positions(const FloorplanSpec& spec) {
    validate(spec);
    if (!spec.ap_positions.empty()) return spec.ap_positions;

    const auto rps = reference_points(spec);
    double xmin = rps[0].x_m, xmax = rps[0].x_m, ymin = rps[0].y_m, ymax = rps[0].y_m;
    for (const auto& rp : rps) {
        xmin = std::min(xmin, rp.x_m); xmax = std::max(xmax, rp.x_m);
        ymin = std::min(ymin, rp.y_m); ymax = std::max(ymax, rp.y_m);
    }
    const double pad = 10.0;
    Rng rng = make_rng(spec.seed, 1000);
    std::uniform_real_distribution<double> ux(xmin - pad, xmax + pad);
    std::uniform_real_distribution<double> uy(ymin - pad, ymax + pad);
    std::vector<std::pair<double, double>> aps(spec.n_ap);
    for (auto& ap : aps) {
        const double px = ux(rng);
        const double py = uy(rng);
        ap = {px, py};
    }
    return aps;
}

Eigen::MatrixXd ground_truth_map(const FloorplanSpec& spec, const PathLossParams& pl) {
    validate(spec);
    validate(pl);
    const auto rps = reference_points(spec);
    const auto aps = ap_positions(spec);
    Eigen::MatrixXd truth(spec.n_rp, spec.n_ap);
    for (int r = 0; r < spec.n_rp; ++r) {
        for (int a = 0; a < spec.n_ap; ++a) {
            const double d = std::hypot(rps[r].x_m - aps[a].first, rps[r].y_m - aps[a].second);
            double v = pl.p0_dbm - 10.0 * pl.n_exp * std::log10(std::max(d, pl.d0_m) / pl.d0_m);
            v = std::clamp(v, -100.0, 0.0);
            if (v < pl.visibility_floor_dbm) v = -100.0;
            truth(r, a) = v;
        }
    }
    return truth;
}

Eigen::VectorXd apply_device(const Eigen::VectorXd& truth_row,
                             const DeviceProfile& profile, Rng& rng) {
    validate(profile);
    std::normal_distribution<double> noise(0.0, profile.noise_sigma_db);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Eigen::VectorXd out = truth_row;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double v = truth_row[i];
        if (!(v >= -100.0 && v <= 0.0)) {
            throw DataError("apply_device: RSSI out of [-100, 0] at index " + std::to_string(i));
        }
        if (v <= -100.0) continue;  // invisible APs stay invisible
        double w = -100.0 + profile.gain * (v + 100.0) + profile.offset_db;
        if (profile.noise_sigma_db > 0) w += noise(rng);
        w = std::clamp(w, -100.0, 0.0);
        if (profile.dropout_p > 0 && coin(rng) < profile.dropout_p) w = -100.0;
        out[i] = w;
    }
    return out;
}

std::vector<FingerprintDatabase>
generate_dataset(const FloorplanSpec& spec, const PathLossParams& pl,
                 const std::vector<DeviceProfile>& profiles, int per_rp,
                 std::uint64_t seed) {
    validate(spec);
    validate(pl);
    if (per_rp < 1) throw ConfigError("generate_dataset: per_rp must be >= 1");

    const Eigen::MatrixXd truth = ground_truth_map(spec, pl);
    const auto rps = reference_points(spec);
    std::map<int, std::pair<double, double>> rp_coords;
    for (const auto& rp : rps) rp_coords[rp.rp_id] = {rp.x_m, rp.y_m};

    std::vector<std::string> ap_ids;
    ap_ids.reserve(spec.n_ap);
    for (int a = 0; a < spec.n_ap; ++a) ap_ids.push_back("ap_" + std::to_string(a));
    ApRegistry registry(std::move(ap_ids));

    std::vector<FingerprintDatabase> out;
    out.reserve(profiles.size());
    for (std::size_t d = 0; d < profiles.size(); ++d) {
        validate(profiles[d]);
        Rng rng = make_rng(seed, d);  // independent per-device stream
        std::normal_distribution<double> shadow(0.0, pl.shadow_sigma_db);
        std::vector<Fingerprint> fps;
        fps.reserve(static_cast<std::size_t>(spec.n_rp) * per_rp);
        std::int64_t t = 0;
        for (int r = 0; r < spec.n_rp; ++r) {
            for (int rep = 0; rep < per_rp; ++rep) {
                Eigen::VectorXd reading = truth.row(r);
                if (pl.shadow_sigma_db > 0) {
                    for (Eigen::Index i = 0; i < reading.size(); ++i) {
                        if (reading[i] > -100.0) {
                            reading[i] = std::clamp(reading[i] + shadow(rng), -100.0, 0.0);
                        }
                    }
                }
                reading = apply_device(reading, profiles[d], rng);
                // Integer dBm on disk; round at the end of the pipeline.
                for (Eigen::Index i = 0; i < reading.size(); ++i) {
                    reading[i] = std::clamp(
                        static_cast<double>(std::llround(reading[i])), -100.0, 0.0);
                }
                Fingerprint fp;
                fp.rssi = std::move(reading);
                fp.form = SignalForm::Raw;
                fp.device_id = profiles[d].device_id;
                fp.rp_id = r;
                fp.timestamp = t++;
                fps.push_back(normalize(fp));
            }
        }
        out.emplace_back(registry, std::move(fps), rp_coords);
    }
    return out;
}

std::vector<DeviceProfile> default_device_suite() {
    return {
        {"phone_a", 0.0, 1.00, 0.00, 1.0},
        {"phone_b", 3.0, 1.10, 0.05, 1.5},
        {"phone_c", -3.0, 0.90, 0.15, 2.0},
        {"phone_d", 6.0, 1.20, 0.03, 2.5},
        {"phone_e", -6.0, 0.85, 0.25, 3.0},
        {"phone_f", 1.0, 0.95, 0.20, 1.8},
    };
}

std::vector<FloorplanSpec> default_benchmark_suite() {
    FloorplanSpec a;
    a.id = "corridor";
    a.n_rp = 60; a.n_ap = 81; a.seed = 11;
    FloorplanSpec b;
    b.id = "library";
    b.n_rp = 70; b.n_ap = 130; b.seed = 22;
    b.path_shape = {{0.0, 0.0}, {35.0, 0.0}, {35.0, 40.0}};
    FloorplanSpec c;
    c.id = "auditorium";
    c.n_rp = 80; c.n_ap = 300; c.seed = 33;
    c.path_shape = {{0.0, 0.0}, {20.0, 0.0}, {20.0, 20.0}, {0.0, 20.0}, {0.0, 40.0}};
    FloorplanSpec d;
    d.id = "labs";
    d.n_rp = 65; d.n_ap = 120; d.seed = 44;
    d.path_shape = {{0.0, 0.0}, {15.0, 15.0}, {30.0, 0.0}, {45.0, 15.0}};
    return {a, b, c, d};
}

} // namespace anvil
