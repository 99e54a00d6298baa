#include "pks/density_io.hpp"

#include "pks/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace pks {
namespace {

using nlohmann::json;

Vec2 read_vec2(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2) {
        throw DomainError(std::string("density: '") + key + "' must be a 2-element array");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

Primitive read_primitive(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "ball") {
        return UniformBall{read_vec2(j, "center"), j.at("radius").get<double>(),
                           j.at("amplitude").get<double>()};
    }
    if (type == "gaussian") {
        return Gaussian{read_vec2(j, "center"), j.at("std").get<double>(), j.at("mass").get<double>()};
    }
    throw DomainError("density: unknown primitive type '" + type + "'");
}

}  // namespace

Density parse_density_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("density: invalid JSON: ") + e.what());
    }
    try {
        if (doc.contains("grid") == doc.contains("analytic")) {
            throw DomainError("density: document needs exactly one of 'grid' or 'analytic'");
        }
        if (doc.contains("grid")) {
            const json& g = doc.at("grid");
            GridDensity grid;
            grid.half_width = g.at("L").get<double>();
            grid.nx = g.at("nx").get<int>();
            grid.ny = g.at("ny").get<int>();
            grid.values = g.at("values").get<std::vector<double>>();
            return Density::from_grid(std::move(grid));
        }
        std::vector<Primitive> prims;
        for (const json& p : doc.at("analytic")) {
            prims.push_back(read_primitive(p));
        }
        return Density::from_primitives(std::move(prims));
    } catch (const json::exception& e) {
        throw DomainError(std::string("density: ") + e.what());
    }
}

Density load_density(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DomainError("density: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_density_json(buf.str());
}

std::string density_to_json(const Density& density) {
    json doc;
    if (density.is_grid()) {
        const GridDensity& g = density.grid();
        doc["grid"] = {{"L", g.half_width}, {"nx", g.nx}, {"ny", g.ny}, {"values", g.values}};
    } else {
        json arr = json::array();
        for (const auto& p : density.primitives()) {
            if (const auto* b = std::get_if<UniformBall>(&p)) {
                arr.push_back({{"type", "ball"},
                               {"center", {b->center.x, b->center.y}},
                               {"radius", b->radius},
                               {"amplitude", b->amplitude}});
            } else {
                const auto& g = std::get<Gaussian>(p);
                arr.push_back({{"type", "gaussian"},
                               {"center", {g.center.x, g.center.y}},
                               {"std", g.std},
                               {"mass", g.mass}});
            }
        }
        doc["analytic"] = std::move(arr);
    }
    return doc.dump();
}

}  // namespace pks
