#include "couplerlab/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace couplerlab {

SystemSpec reference_spec() {
    SystemSpec s;
    s.modes = {
        {"qa", ModeKind::transmon, 4.0, -0.300, 5},
        {"c1", ModeKind::linear, 3.12, 0.0, 4},
        {"c2", ModeKind::linear, 3.05, 0.0, 4},
        {"qb", ModeKind::transmon, 3.6, -0.350, 5},
    };
    s.couplings = {
        {"qa", "qb", 2.0, CouplingForm::full},
        {"qa", "c1", 150.0, CouplingForm::full},
        {"qa", "c2", -200.0, CouplingForm::full},
        {"qb", "c1", 150.0, CouplingForm::full},
        {"qb", "c2", 150.0, CouplingForm::full},
        {"c1", "c2", 10.0, CouplingForm::full},
    };
    validate(s);
    return s;
}

namespace {

ModeKind parse_kind(const std::string& s) {
    if (s == "transmon") return ModeKind::transmon;
    if (s == "linear") return ModeKind::linear;
    throw std::runtime_error("config: unknown mode kind '" + s + "'");
}

CouplingForm parse_form(const std::string& s) {
    if (s == "full") return CouplingForm::full;
    if (s == "rwa") return CouplingForm::rwa;
    throw std::runtime_error("config: unknown coupling form '" + s + "'");
}

}  // namespace

SystemSpec parse_system(const nlohmann::json& j) {
    SystemSpec s;
    if (!j.contains("modes") || !j["modes"].is_array())
        throw std::runtime_error("config: missing top-level 'modes' array");
    for (const auto& jm : j["modes"]) {
        ModeSpec m;
        m.label = jm.at("label").get<std::string>();
        m.kind = parse_kind(jm.value("kind", std::string("transmon")));
        m.freq_ghz = jm.at("freq_ghz").get<double>();
        m.anharm_ghz = jm.value("anharm_ghz", 0.0);
        m.levels = jm.value("levels", 2);
        s.modes.push_back(m);
    }
    for (const auto& jc : j.value("couplings", nlohmann::json::array())) {
        CouplingSpec c;
        c.a = jc.at("a").get<std::string>();
        c.b = jc.at("b").get<std::string>();
        c.g_mhz = jc.at("g_mhz").get<double>();
        c.form = parse_form(jc.value("form", std::string("full")));
        s.couplings.push_back(c);
    }
    if (j.contains("options")) {
        const auto& jo = j["options"];
        s.options.epsilon = jo.value("epsilon", s.options.epsilon);
        s.options.rwa_all = jo.value("rwa_all", false);
    }
    validate(s);
    return s;
}

nlohmann::json system_to_json(const SystemSpec& spec) {
    nlohmann::json j;
    j["modes"] = nlohmann::json::array();
    for (const auto& m : spec.modes) {
        j["modes"].push_back({{"label", m.label},
                              {"kind", m.kind == ModeKind::transmon ? "transmon" : "linear"},
                              {"freq_ghz", m.freq_ghz},
                              {"anharm_ghz", m.anharm_ghz},
                              {"levels", m.levels}});
    }
    j["couplings"] = nlohmann::json::array();
    for (const auto& c : spec.couplings) {
        j["couplings"].push_back({{"a", c.a},
                                  {"b", c.b},
                                  {"g_mhz", c.g_mhz},
                                  {"form", c.form == CouplingForm::full ? "full" : "rwa"}});
    }
    j["options"] = {{"epsilon", spec.options.epsilon}, {"rwa_all", spec.options.rwa_all}};
    return j;
}

SystemSpec load_system(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config: parse failure in '" + path + "': " + e.what());
    }
    return parse_system(j);
}

std::string canonical_system_json(const SystemSpec& spec) {
    return system_to_json(spec).dump();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string tok;
    while (std::getline(ss, tok, '.')) parts.push_back(tok);
    return parts;
}

// non-throwing lookup so path errors carry the whole path, not just the label
int find_mode(const SystemSpec& spec, const std::string& label) {
    for (size_t k = 0; k < spec.modes.size(); ++k)
        if (spec.modes[k].label == label) return static_cast<int>(k);
    return -1;
}

}  // namespace

void set_parameter(SystemSpec& spec, const std::string& path, double value) {
    const auto parts = split_path(path);
    if (parts.size() == 3 && parts[0] == "modes") {
        const int i = find_mode(spec, parts[1]);
        if (i < 0) throw std::runtime_error("config: no mode '" + parts[1] + "' in path " + path);
        if (parts[2] == "freq_ghz") {
            spec.modes[i].freq_ghz = value;
            return;
        }
        if (parts[2] == "anharm_ghz") {
            spec.modes[i].anharm_ghz = value;
            return;
        }
    } else if (parts.size() == 3 && parts[0] == "couplings" && parts[2] == "g_mhz") {
        const auto sep = parts[1].find(':');
        if (sep != std::string::npos) {
            const std::string a = parts[1].substr(0, sep), b = parts[1].substr(sep + 1);
            for (auto& c : spec.couplings)
                if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) {
                    c.g_mhz = value;
                    return;
                }
            throw std::runtime_error("config: no coupling '" + parts[1] + "' in path " + path);
        }
    }
    throw std::runtime_error("config: unresolvable parameter path '" + path + "'");
}

double get_parameter(const SystemSpec& spec, const std::string& path) {
    const auto parts = split_path(path);
    if (parts.size() == 3 && parts[0] == "modes") {
        const int i = find_mode(spec, parts[1]);
        if (i < 0) throw std::runtime_error("config: no mode '" + parts[1] + "' in path " + path);
        if (parts[2] == "freq_ghz") return spec.modes[i].freq_ghz;
        if (parts[2] == "anharm_ghz") return spec.modes[i].anharm_ghz;
    } else if (parts.size() == 3 && parts[0] == "couplings" && parts[2] == "g_mhz") {
        const auto sep = parts[1].find(':');
        if (sep != std::string::npos) {
            const std::string a = parts[1].substr(0, sep), b = parts[1].substr(sep + 1);
            for (const auto& c : spec.couplings)
                if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) return c.g_mhz;
            throw std::runtime_error("config: no coupling '" + parts[1] + "' in path " + path);
        }
    }
    throw std::runtime_error("config: unresolvable parameter path '" + path + "'");
}

}  // namespace couplerlab
