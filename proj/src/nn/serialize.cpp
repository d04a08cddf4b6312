#include "hyperode/nn/serialize.hpp"

#include <fstream>

#include "hyperode/error.hpp"

namespace hyperode::nn {

nlohmann::json to_json(const Mlp& net) {
    const auto& layout = net.layout();
    nlohmann::json doc;
    doc["dims"] = layout.dims();
    doc["activation"] = std::string(to_string(layout.activation()));
    auto layers = nlohmann::json::array();
    for (std::size_t l = 0; l < layout.layers().size(); ++l) {
        const auto& s = layout.layers()[l];
        const auto w = net.weight(l);
        auto rows = nlohmann::json::array();
        for (std::size_t o = 0; o < s.out; ++o)
            rows.push_back(std::vector<double>(w.begin() + o * s.in, w.begin() + (o + 1) * s.in));
        const auto b = net.bias(l);
        layers.push_back({{"weight", rows}, {"bias", std::vector<double>(b.begin(), b.end())}});
    }
    doc["layers"] = layers;
    std::vector<double> slopes;
    if (layout.has_slopes())
        for (std::size_t h = 0; h < layout.hidden_layers(); ++h) slopes.push_back(net.slope(h));
    doc["prelu_slopes"] = slopes;
    return doc;
}

Mlp mlp_from_json(const nlohmann::json& doc) {
    try {
        ParamLayout layout(doc.at("dims").get<std::vector<std::size_t>>(),
                           parse_activation(doc.at("activation").get<std::string>()));
        std::vector<double> params(layout.size(), 0.0);
        const auto& layers = doc.at("layers");
        if (layers.size() != layout.layers().size()) throw DimensionError("layer count does not match dims");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& s = layout.layers()[l];
            const auto& rows = layers[l].at("weight");
            if (rows.size() != s.out) throw DimensionError("weight row count does not match dims");
            for (std::size_t o = 0; o < s.out; ++o) {
                const auto row = rows[o].get<std::vector<double>>();
                if (row.size() != s.in) throw DimensionError("weight row length does not match dims");
                std::copy(row.begin(), row.end(), params.begin() + s.weight_offset + o * s.in);
            }
            const auto bias = layers[l].at("bias").get<std::vector<double>>();
            if (bias.size() != s.out) throw DimensionError("bias length does not match dims");
            std::copy(bias.begin(), bias.end(), params.begin() + s.bias_offset);
        }
        const auto slopes = doc.value("prelu_slopes", std::vector<double>{});
        if (layout.has_slopes()) {
            if (slopes.size() != layout.hidden_layers()) throw DimensionError("prelu slope count mismatch");
            for (std::size_t h = 0; h < slopes.size(); ++h) params[layout.slope_offset(h)] = slopes[h];
        }
        return Mlp(std::move(layout), std::move(params));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed MLP document: ") + e.what());
    }
}

void save_mlp(const Mlp& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json(net).dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

Mlp load_mlp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse " + path.string() + ": " + e.what());
    }
    return mlp_from_json(doc);
}

} // namespace hyperode::nn
