#include "hyperode/ode/trajectory_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hyperode/error.hpp"
#include "hyperode/format.hpp"

namespace hyperode {

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << 's';
    for (std::size_t i = 0; i < traj.dim(); ++i) out << ",z" << i;
    out << '\n';
    for (std::size_t k = 0; k < traj.s.size(); ++k) {
        out << format_double(traj.s[k]);
        for (double v : traj.z[k]) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("s")) throw IoError("missing trajectory header in " + path.string());
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        Vector values;
        while (std::getline(row, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError("bad number '" + cell + "' in " + path.string());
            }
        }
        if (values.size() < 2) throw IoError("short row in " + path.string());
        traj.s.push_back(values.front());
        traj.z.emplace_back(values.begin() + 1, values.end());
    }
    return traj;
}

void write_manifest(const TrajectoryManifest& m, const std::filesystem::path& path) {
    nlohmann::json doc{{"problem", m.problem}, {"solver", m.solver}, {"K", m.steps},
                       {"span", {m.span.begin, m.span.end}}, {"seed", m.seed}, {"nfe", m.nfe}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

TrajectoryManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        nlohmann::json doc;
        in >> doc;
        TrajectoryManifest m;
        m.problem = doc.at("problem").get<std::string>();
        m.solver = doc.at("solver").get<std::string>();
        m.steps = doc.at("K").get<std::size_t>();
        m.span = Span{doc.at("span")[0].get<double>(), doc.at("span")[1].get<double>()};
        m.seed = doc.at("seed").get<std::uint64_t>();
        m.nfe = doc.at("nfe").get<std::size_t>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest " + path.string() + ": " + e.what());
    }
}

} // namespace hyperode
