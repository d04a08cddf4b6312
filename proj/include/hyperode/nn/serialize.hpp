#pragma once

#include <filesystem>

#include <json.hpp>

#include "hyperode/nn/mlp.hpp"

namespace hyperode::nn {

// {"dims": [...], "activation": "...", "layers": [{"weight": [[...]], "bias": [...]}],
//  "prelu_slopes": [...]}. Doubles are written in shortest round-trip form.
nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& doc);

void save_mlp(const Mlp& net, const std::filesystem::path& path);
Mlp load_mlp(const std::filesystem::path& path);

} // namespace hyperode::nn
