#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "anvil/baselines.hpp"
#include "anvil/eval.hpp"
#include "anvil/radio_sim.hpp"
#include "anvil/train.hpp"

namespace anvil {

/// Everything `synth` needs: floorplans, propagation, device profiles and
/// the per-RP fingerprint count.
struct SynthConfig {
    std::vector<FloorplanSpec> floorplans = default_benchmark_suite();
    PathLossParams pathloss;
    std::vector<DeviceProfile> profiles = default_device_suite();
    int per_rp = 10;
};

SynthConfig parse_synth_config(const std::filesystem::path& path);

/// Per-framework training/evaluation knobs; every block is optional and
/// falls back to defaults.
EvalConfig parse_eval_config(const std::filesystem::path& path);

/// Defaults used when no config file is given.
EvalConfig default_eval_config();

} // namespace anvil
