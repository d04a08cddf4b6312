#include "hyperode/hyper/bundle.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "hyperode/error.hpp"
#include "hyperode/nn/serialize.hpp"
#include "hyperode/random.hpp"

namespace hyperode {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

nlohmann::json to_json(const TrainConfig& cfg) {
    return {{"iterations", cfg.iterations},
            {"lr_max", cfg.lr_max},
            {"lr_min", cfg.lr_min},
            {"weight_decay", cfg.weight_decay},
            {"batch_swap_every", cfg.batch_swap_every},
            {"pretrain_iters", cfg.pretrain_iters},
            {"loss", std::string(to_string(cfg.loss))},
            {"lambda", cfg.lambda},
            {"seed", cfg.seed},
            {"batch_size", cfg.batch_size},
            {"pool_batches", cfg.pool_batches},
            {"steps", cfg.steps},
            {"span", {cfg.span.begin, cfg.span.end}},
            {"truth_tol", cfg.truth_tol}};
}

TrainConfig train_config_from_json(const nlohmann::json& doc) {
    TrainConfig cfg;
    cfg.iterations = doc.value("iterations", cfg.iterations);
    cfg.lr_max = doc.value("lr_max", cfg.lr_max);
    cfg.lr_min = doc.value("lr_min", cfg.lr_min);
    cfg.weight_decay = doc.value("weight_decay", cfg.weight_decay);
    cfg.batch_swap_every = doc.value("batch_swap_every", cfg.batch_swap_every);
    cfg.pretrain_iters = doc.value("pretrain_iters", cfg.pretrain_iters);
    cfg.loss = parse_loss_kind(doc.value("loss", std::string("residual")));
    cfg.lambda = doc.value("lambda", cfg.lambda);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.batch_size = doc.value("batch_size", cfg.batch_size);
    cfg.pool_batches = doc.value("pool_batches", cfg.pool_batches);
    cfg.steps = doc.value("steps", cfg.steps);
    if (doc.contains("span")) cfg.span = Span{doc["span"][0].get<double>(), doc["span"][1].get<double>()};
    cfg.truth_tol = doc.value("truth_tol", cfg.truth_tol);
    return cfg;
}

void save_bundle(const Bundle& bundle, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    nn::save_mlp(bundle.solver.corrector(), dir / "corrector.json");

    const auto& base = bundle.solver.base();
    nlohmann::json meta{{"base", base.name},
                        {"order", base.order},
                        {"layout", {{"state_dim", bundle.solver.layout().state_dim},
                                    {"include_s", bundle.solver.layout().include_s}}},
                        {"problem", bundle.problem},
                        {"train_config", to_json(bundle.config)},
                        {"delta", bundle.delta}};
    if (base.alpha) meta["alpha"] = *base.alpha;
    std::ofstream out(dir / "bundle.json");
    if (!out) throw IoError("cannot write " + (dir / "bundle.json").string());
    out << meta.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + (dir / "bundle.json").string());
}

Bundle load_bundle(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("bundle directory " + dir.string() + " does not exist");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(dir / "bundle.json"));
        nn::Mlp corrector = nn::load_mlp(dir / "corrector.json");
        InputLayout layout{meta.at("layout").at("state_dim").get<std::size_t>(),
                           meta.at("layout").at("include_s").get<bool>()};
        ButcherTableau base = tableau_by_name(meta.at("base").get<std::string>());
        if (base.order != meta.at("order").get<std::size_t>())
            throw IoError("bundle order does not match its base tableau");
        return Bundle{Hypersolver(std::move(base), std::move(corrector), layout),
                      meta.value("problem", std::string{}), train_config_from_json(meta.value("train_config", nlohmann::json::object())),
                      meta.value("delta", 0.0)};
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed bundle " + dir.string() + ": " + e.what());
    } catch (const DimensionError& e) {
        throw IoError("inconsistent bundle " + dir.string() + ": " + e.what());
    } catch (const RangeError& e) {
        throw IoError("inconsistent bundle " + dir.string() + ": " + e.what());
    }
}

std::string bundle_hash(const std::filesystem::path& dir) {
    const std::string bytes = read_file(dir / "bundle.json") + read_file(dir / "corrector.json");
    std::ostringstream hex;
    hex << std::hex;
    hex.width(16);
    hex.fill('0');
    hex << fnv1a64(bytes);
    return hex.str();
}

} // namespace hyperode
