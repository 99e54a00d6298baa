#include "pks/sim_io.hpp"

#include "pks/error.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pks {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const char* where) {
    for (const auto& [key, value] : obj.items()) {
        bool found = false;
        for (std::string_view k : known) {
            found = found || key == k;
        }
        if (!found) {
            throw DomainError(std::string(where) + ": unknown key '" + key + "'");
        }
    }
}

template <class T>
void read_opt(const json& obj, const char* key, T& dst) {
    if (obj.contains(key)) {
        dst = obj.at(key).get<T>();
    }
}

// Shortest representation that round-trips.
std::string fmt(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
    SimConfig cfg;
    try {
        const json doc = json::parse(text);
        if (!doc.is_object()) {
            throw DomainError("config: document must be an object");
        }
        reject_unknown(doc,
                       {"grid", "alpha", "dt0", "t_end", "cfl_safety", "blowup_density_factor",
                        "dt_min", "sample_interval"},
                       "config");
        if (doc.contains("grid")) {
            const json& g = doc.at("grid");
            reject_unknown(g, {"L", "nx", "ny"}, "config.grid");
            read_opt(g, "L", cfg.grid.half_width);
            read_opt(g, "nx", cfg.grid.nx);
            read_opt(g, "ny", cfg.grid.ny);
        }
        read_opt(doc, "alpha", cfg.alpha);
        read_opt(doc, "dt0", cfg.dt0);
        read_opt(doc, "t_end", cfg.t_end);
        read_opt(doc, "cfl_safety", cfg.cfl_safety);
        read_opt(doc, "blowup_density_factor", cfg.blowup_density_factor);
        read_opt(doc, "dt_min", cfg.dt_min);
        read_opt(doc, "sample_interval", cfg.sample_interval);
    } catch (const json::exception& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DomainError("config: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sim_config(buf.str());
}

std::string sim_config_to_json(const SimConfig& c) {
    nlohmann::ordered_json doc;
    doc["grid"] = {{"L", c.grid.half_width}, {"nx", c.grid.nx}, {"ny", c.grid.ny}};
    doc["alpha"] = c.alpha;
    doc["dt0"] = c.dt0;
    doc["t_end"] = c.t_end;
    doc["cfl_safety"] = c.cfl_safety;
    doc["blowup_density_factor"] = c.blowup_density_factor;
    doc["dt_min"] = c.dt_min;
    doc["sample_interval"] = c.sample_interval;
    return doc.dump();
}

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
    out << "t,mass,I,V,Vprime_fd,max_density\n";
    for (const SimSample& s : trace.samples) {
        out << fmt(s.t) << ',' << fmt(s.mass) << ',' << fmt(s.second_moment) << ','
            << fmt(s.variance) << ',' << fmt(s.vprime_fd) << ',' << fmt(s.max_density) << '\n';
    }
}

}  // namespace pks
