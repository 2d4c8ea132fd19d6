#include "mahi/system_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mahi/error.hpp"

namespace mahi {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw InputError("field '" + field + "': " + what);
}

double number_at(const json& j, const std::string& field) {
    if (!j.is_number()) field_error(field, "expected a number");
    return j.get<double>();
}

const json& member(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) field_error(path + key, "missing");
    return *it;
}

std::vector<double> number_array(const json& j, const std::string& field) {
    if (!j.is_array()) field_error(field, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_at(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace

SystemBundle system_from_json(const json& j) {
    if (!j.is_object()) field_error("<root>", "expected an object");
    SystemBundle b;
    auto& sys = b.system;
    sys.box_length = number_at(member(j, "box_length_nm", ""), "box_length_nm");

    const json& parts = member(j, "particles", "");
    if (!parts.is_array()) field_error("particles", "expected an array");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string path = "particles[" + std::to_string(i) + "].";
        const json& p = parts[i];
        if (!p.is_object()) field_error(path, "expected an object");
        auto pos = number_array(member(p, "pos", path), path + "pos");
        if (pos.size() != 3) field_error(path + "pos", "expected 3 coordinates");
        sys.positions.push_back({pos[0], pos[1], pos[2]});
        sys.charges.push_back(number_at(member(p, "q", path), path + "q"));
    }

    if (auto it = j.find("sites"); it != j.end()) {
        if (!it->is_array()) field_error("sites", "expected an array");
        for (std::size_t s = 0; s < it->size(); ++s) {
            const std::string path = "sites[" + std::to_string(s) + "].";
            const json& js = (*it)[s];
            if (!js.is_object()) field_error(path, "expected an object");
            TitratableSite site;
            const json& idx = member(js, "indices", path);
            if (!idx.is_array()) field_error(path + "indices", "expected an array of integers");
            for (std::size_t k = 0; k < idx.size(); ++k) {
                if (!idx[k].is_number_integer())
                    field_error(path + "indices[" + std::to_string(k) + "]", "expected an integer");
                site.indices.push_back(idx[k].get<int>());
            }
            const json& forms = member(js, "forms", path);
            if (!forms.is_array()) field_error(path + "forms", "expected an array of charge rows");
            for (std::size_t r = 0; r < forms.size(); ++r)
                site.forms.push_back(number_array(forms[r], path + "forms[" + std::to_string(r) + "]"));
            sys.sites.push_back(std::move(site));
        }
    }

    if (auto it = j.find("lambda"); it != j.end()) {
        if (!it->is_array()) field_error("lambda", "expected an array");
        for (std::size_t s = 0; s < it->size(); ++s) {
            const std::string path = "lambda[" + std::to_string(s) + "].";
            const json& jl = (*it)[s];
            if (!jl.is_object()) field_error(path, "expected an object");
            SiteLambda l;
            l.values = number_array(member(jl, "values", path), path + "values");
            if (auto v = jl.find("velocities"); v != jl.end())
                l.velocities = number_array(*v, path + "velocities");
            else
                l.velocities.assign(l.values.size(), 0.0);
            if (auto m = jl.find("mass"); m != jl.end()) l.mass = number_at(*m, path + "mass");
            b.lambda.sites.push_back(std::move(l));
        }
    } else {
        b.lambda = uniform_lambda(sys, 0.5);
    }

    // Everything downstream assumes primary-box coordinates.
    if (sys.box_length > 0.0 && std::isfinite(sys.box_length)) wrap_positions(sys);

    auto bad = validate_system(sys);
    if (bad.empty()) bad = validate_lambda(sys, b.lambda);
    if (!bad.empty()) throw InputError("invalid system: " + bad.front());
    return b;
}

SystemBundle parse_system(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(source + ":" + std::to_string(line_of_offset(text, e.byte)) + ": parse error: " + e.what());
    }
    try {
        return system_from_json(j);
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
}

SystemBundle load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open system file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str(), path);
}

json system_to_json(const SystemBundle& b) {
    const auto& sys = b.system;
    json j;
    j["box_length_nm"] = sys.box_length;
    json parts = json::array();
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const auto& r = sys.positions[i];
        parts.push_back({{"pos", {r.x, r.y, r.z}}, {"q", sys.charges[i]}});
    }
    j["particles"] = std::move(parts);
    json sites = json::array();
    for (const auto& s : sys.sites) sites.push_back({{"indices", s.indices}, {"forms", s.forms}});
    j["sites"] = std::move(sites);
    json lam = json::array();
    for (const auto& l : b.lambda.sites)
        lam.push_back({{"values", l.values}, {"velocities", l.velocities}, {"mass", l.mass}});
    j["lambda"] = std::move(lam);
    return j;
}

std::string dump_system(const SystemBundle& b) { return system_to_json(b).dump(1) + "\n"; }

void save_system(const std::string& path, const SystemBundle& b) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write system file '" + path + "'");
    out << dump_system(b);
}

}  // namespace mahi
