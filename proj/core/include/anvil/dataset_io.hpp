#pragma once

#include <filesystem>

#include "anvil/database.hpp"

namespace anvil {

/// Write the dataset CSV (one row per fingerprint, raw integer dBm cells)
/// and its sidecar JSON (column -> AP identifier, rp_id -> coordinates).
void save_dataset(const FingerprintDatabase& db,
                  const std::filesystem::path& csv_path,
                  const std::filesystem::path& sidecar_path);

/// Load a dataset written by save_dataset. Sparse rp_ids are remapped to
/// dense 0..n_rp-1 (ascending original order).
FingerprintDatabase load_dataset(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& sidecar_path);

} // namespace anvil
