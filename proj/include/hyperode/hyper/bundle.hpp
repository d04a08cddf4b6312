#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hyperode/hyper/hypersolver.hpp"
#include "hyperode/hyper/train.hpp"

namespace hyperode {

// A trained hypersolver on disk: `corrector.json` (MLP document) and
// `bundle.json` (base tableau, layout flags, training config echo, delta).
struct Bundle {
    Hypersolver solver;
    std::string problem;
    TrainConfig config;
    double delta = 0.0;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& doc);

void save_bundle(const Bundle& bundle, const std::filesystem::path& dir);
// Throws IoError when the directory or its files are missing or malformed.
Bundle load_bundle(const std::filesystem::path& dir);

// FNV-1a of the bundle's files, as 16 hex digits.
std::string bundle_hash(const std::filesystem::path& dir);

} // namespace hyperode
