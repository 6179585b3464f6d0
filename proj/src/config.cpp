#include "rsm/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "rsm/error.hpp"

namespace rsm {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::schema, "config: " + path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) schema_error(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    require_object(j, path);
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) schema_error(join(path, key), "unknown key");
    }
}

void read(const json& j, const std::string& path, const char* key, double& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_number()) schema_error(join(path, key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) schema_error(join(path, key), "expected a finite number");
}

void read(const json& j, const std::string& path, const char* key, std::optional<double>& out) {
    if (!j.contains(key)) return;
    double v = 0.0;
    read(j, path, key, v);
    out = v;
}

void read(const json& j, const std::string& path, const char* key, int& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_number_integer()) {
        out = v.get<int>();
        return;
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 1e9) {
            out = static_cast<int>(d);
            return;
        }
    }
    schema_error(join(path, key), "expected an integer");
}

void read(const json& j, const std::string& path, const char* key, bool& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_boolean()) schema_error(join(path, key), "expected a boolean");
    out = v.get<bool>();
}

void read(const json& j, const std::string& path, const char* key, std::string& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_string()) schema_error(join(path, key), "expected a string");
    out = v.get<std::string>();
}

void read(const json& j, const std::string& path, const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    const std::string p = join(path, key);
    if (!v.is_array()) schema_error(p, "expected an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) schema_error(p + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
}

void one_of(const std::string& value, const std::string& path, std::initializer_list<const char*> allowed) {
    std::string list;
    for (const char* a : allowed) {
        if (value == a) return;
        list += list.empty() ? a : std::string(" | ") + a;
    }
    schema_error(path, "'" + value + "' is not one of " + list);
}

std::string resolve(const std::string& file, const std::string& base_dir) {
    if (file.empty() || base_dir.empty()) return file;
    const std::filesystem::path p(file);
    if (p.is_absolute()) return file;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void parse_manifold(const json& j, ManifoldSpec& m, const std::string& base_dir) {
    const std::string path = "manifold";
    check_keys(j, path, {"dimension", "family", "curvature", "gamma", "scale_b", "r_max", "eps0", "tolerances",
                         "samples_file", "samples"});
    read(j, path, "dimension", m.dimension);
    if (j.contains("family")) {
        std::string f;
        read(j, path, "family", f);
        one_of(f, join(path, "family"), {"euclidean", "space_form", "power_exp", "cusp", "custom"});
        m.family = parse_family(f);
    }
    read(j, path, "curvature", m.curvature);
    read(j, path, "gamma", m.gamma);
    read(j, path, "scale_b", m.scale_b);
    read(j, path, "r_max", m.r_max);
    read(j, path, "eps0", m.eps0);
    if (j.contains("tolerances")) {
        const std::string tp = join(path, "tolerances");
        const auto& t = j.at("tolerances");
        check_keys(t, tp, {"quad_rel", "grid_h_rel", "profile_h", "profile_radius"});
        read(t, tp, "quad_rel", m.tolerances.quad_rel);
        read(t, tp, "grid_h_rel", m.tolerances.grid_h_rel);
        read(t, tp, "profile_h", m.tolerances.profile_h);
        read(t, tp, "profile_radius", m.tolerances.profile_radius);
    }
    read(j, path, "samples_file", m.samples_file);
    m.samples_file = resolve(m.samples_file, base_dir);
    if (j.contains("samples")) {
        const std::string sp = join(path, "samples");
        const auto& s = j.at("samples");
        check_keys(s, sp, {"r", "phi", "dphi", "d2phi"});
        read(s, sp, "r", m.samples.r);
        read(s, sp, "phi", m.samples.phi);
        read(s, sp, "dphi", m.samples.dphi);
        read(s, sp, "d2phi", m.samples.d2phi);
    }
}

}  // namespace

Family parse_family(const std::string& s) {
    if (s == "euclidean") return Family::euclidean;
    if (s == "space_form") return Family::space_form;
    if (s == "power_exp") return Family::power_exp;
    if (s == "cusp") return Family::cusp;
    if (s == "custom") return Family::custom;
    throw Error(ErrorKind::schema, "unknown manifold family '" + s + "'");
}

ModelManifold ManifoldSpec::build() const {
    auto warp = [&]() {
        switch (family) {
        case Family::euclidean: return WarpingProfile::euclidean(r_max);
        case Family::space_form: return WarpingProfile::space_form(curvature, r_max);
        case Family::power_exp: return WarpingProfile::power_exp(gamma, r_max, scale_b);
        case Family::cusp: return WarpingProfile::cusp(r_max);
        case Family::custom: break;
        }
        if (!samples_file.empty()) {
            const auto t = read_csv_table(samples_file);
            return WarpingProfile::custom({t.column("r"), t.column("phi"), t.column("dphi"), t.column("d2phi")});
        }
        if (samples.r.empty()) throw Error(ErrorKind::precondition, "custom family needs samples or samples_file");
        return WarpingProfile::custom(samples);
    }();
    return ModelManifold(dimension, std::move(warp), eps0, tolerances);
}

RunConfig parse_config(std::string_view text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::schema, std::string("config: malformed JSON: ") + e.what());
    }
    check_keys(j, "", {"manifold", "spectrum", "green", "poisson", "criterion", "sharpness", "verify", "output",
                       "parallel"});
    RunConfig c;
    if (j.contains("manifold")) parse_manifold(j.at("manifold"), c.manifold, base_dir);
    if (j.contains("spectrum")) {
        const auto& s = j.at("spectrum");
        check_keys(s, "spectrum", {"exterior", "ess"});
        read(s, "spectrum", "exterior", c.spectrum.exterior);
        read(s, "spectrum", "ess", c.spectrum.ess);
    }
    if (j.contains("green")) {
        const auto& g = j.at("green");
        check_keys(g, "green", {"kind", "radius"});
        read(g, "green", "kind", c.green.kind);
        one_of(c.green.kind, "green.kind", {"minimal", "dirichlet", "parabolic"});
        read(g, "green", "radius", c.green.radius);
    }
    if (j.contains("poisson")) {
        const auto& p = j.at("poisson");
        check_keys(p, "poisson", {"source", "parameter", "file"});
        read(p, "poisson", "source", c.poisson.source);
        one_of(c.poisson.source, "poisson.source", {"power", "expdecay", "file"});
        read(p, "poisson", "parameter", c.poisson.parameter);
        read(p, "poisson", "file", c.poisson.file);
        c.poisson.file = resolve(c.poisson.file, base_dir);
    }
    if (j.contains("criterion")) {
        const auto& p = j.at("criterion");
        check_keys(p, "criterion", {"zeta", "parameter", "j0", "jmax", "mode"});
        read(p, "criterion", "zeta", c.criterion.zeta);
        one_of(c.criterion.zeta, "criterion.zeta", {"power", "constant"});
        read(p, "criterion", "parameter", c.criterion.parameter);
        read(p, "criterion", "j0", c.criterion.j0);
        read(p, "criterion", "jmax", c.criterion.jmax);
        read(p, "criterion", "mode", c.criterion.mode);
        one_of(c.criterion.mode, "criterion.mode", {"barta", "barta_certified", "numerical"});
    }
    if (j.contains("sharpness")) {
        const auto& p = j.at("sharpness");
        check_keys(p, "sharpness", {"gamma", "alpha_min", "alpha_max", "step"});
        read(p, "sharpness", "gamma", c.sharpness.gamma);
        read(p, "sharpness", "alpha_min", c.sharpness.alpha_min);
        read(p, "sharpness", "alpha_max", c.sharpness.alpha_max);
        read(p, "sharpness", "step", c.sharpness.step);
    }
    if (j.contains("verify")) {
        const auto& p = j.at("verify");
        check_keys(p, "verify", {"suite"});
        read(p, "verify", "suite", c.verify.suite);
    }
    if (j.contains("output")) {
        const auto& p = j.at("output");
        check_keys(p, "output", {"json", "csv"});
        read(p, "output", "json", c.output.json);
        read(p, "output", "csv", c.output.csv);
        c.output.json = resolve(c.output.json, base_dir);
        c.output.csv = resolve(c.output.csv, base_dir);
    }
    read(j, "", "parallel", c.parallel);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::precondition, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw Error(ErrorKind::schema, "CSV table has no column '" + name + "'");
}

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::precondition, "cannot open CSV file '" + path + "'");
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        return out;
    };
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::schema, path + ": empty CSV file");
    t.header = split(line);
    t.columns.resize(t.header.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split(line);
        if (cells.size() != t.header.size())
            throw Error(ErrorKind::schema, path + ":" + std::to_string(lineno) + ": expected " +
                                               std::to_string(t.header.size()) + " fields");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double v = 0.0;
            const char* first = cells[i].data();
            const char* last = first + cells[i].size();
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last)
                throw Error(ErrorKind::schema, path + ":" + std::to_string(lineno) + ": '" + cells[i] +
                                                   "' is not a number");
            t.columns[i].push_back(v);
        }
    }
    return t;
}

}  // namespace rsm
