#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "anvil/baselines.hpp"
#include "anvil/model.hpp"

namespace anvil {

/// A "model" for the KNN baselines is just the offline database plus the
/// neighbor configuration.
struct KnnModel {
    FingerprintDatabase db;
    KnnConfig cfg;
};

inline constexpr int kModelArtifactVersion = 1;

/// Self-describing JSON artifact; the framework tag distinguishes types.
struct ModelArtifact {
    std::string framework;  // "anvil" | "ffdnn" | "adtrain" | "knn-euclid" | "knn-pearson"
    std::variant<AttentionModel, FfdnnModel, KnnModel> model;
};

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

} // namespace anvil
