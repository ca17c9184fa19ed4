#pragma once

// JSON and CSV formats: problem configs, nodal files, reports.

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodal/dirac_model.hpp"
#include "nodal/errors.hpp"
#include "nodal/inverse_solver.hpp"

namespace nodal {

using json = nlohmann::ordered_json;

inline constexpr int format_version = 1;

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Config

namespace detail {

inline double number_field(const json& j, const char* key, ErrorKind kind) {
    const json& v = j.at(key);
    if (!v.is_number()) throw Error(kind, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

inline std::vector<double> number_array(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw Error(ErrorKind::InvalidConfig, std::string("field '") + key + "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw Error(ErrorKind::InvalidConfig, std::string("'") + key + "' holds a non-number");
        out.push_back(v.get<double>());
    }
    return out;
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw Error(ErrorKind::InvalidConfig, "unknown field '" + key + "' in " + where);
    }
}

inline PotentialForm potential_from_json(const json& p) {
    if (!p.is_object() || !p.contains("kind") || !p.at("kind").is_string()) {
        throw Error(ErrorKind::InvalidConfig, "potential needs a string 'kind'");
    }
    const std::string kind = p.at("kind").get<std::string>();
    if (kind == "cos" || kind == "sin") {
        reject_unknown(p, {"kind", "amplitude"}, "potential");
        double a = p.contains("amplitude") ? number_field(p, "amplitude", ErrorKind::InvalidConfig) : 1.0;
        if (kind == "cos") return CosPotential{a};
        return SinPotential{a};
    }
    if (kind == "poly") {
        reject_unknown(p, {"kind", "coefficients"}, "potential");
        return PolyPotential{number_array(p, "coefficients")};
    }
    if (kind == "table") {
        reject_unknown(p, {"kind", "x", "v"}, "potential");
        return TablePotential{number_array(p, "x"), number_array(p, "v")};
    }
    throw Error(ErrorKind::InvalidConfig, "unknown potential kind '" + kind + "'");
}

inline json potential_to_json(const PotentialForm& form) {
    struct Visitor {
        json operator()(const CosPotential& f) const { return {{"kind", "cos"}, {"amplitude", f.amplitude}}; }
        json operator()(const SinPotential& f) const { return {{"kind", "sin"}, {"amplitude", f.amplitude}}; }
        json operator()(const PolyPotential& f) const { return {{"kind", "poly"}, {"coefficients", f.coefficients}}; }
        json operator()(const TablePotential& f) const { return {{"kind", "table"}, {"x", f.x}, {"v", f.v}}; }
    };
    return std::visit(Visitor{}, form);
}

}  // namespace detail

inline RawConfig raw_config_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
    detail::reject_unknown(j, {"version", "name", "theta", "beta", "sigma", "mass", "potential"}, "config");
    RawConfig raw;
    auto opt = [&](const char* key, std::optional<double>& dst) {
        if (j.contains(key)) dst = detail::number_field(j, key, ErrorKind::InvalidConfig);
    };
    opt("theta", raw.theta);
    opt("beta", raw.beta);
    opt("sigma", raw.sigma);
    opt("mass", raw.mass);
    if (j.contains("potential")) raw.potential = detail::potential_from_json(j.at("potential"));
    return raw;
}

inline json config_to_json(const ProblemConfig& cfg) {
    return {{"version", format_version},
            {"theta", cfg.theta},
            {"beta", cfg.beta},
            {"sigma", cfg.sigma},
            {"mass", cfg.mass},
            {"potential", detail::potential_to_json(cfg.potential.form())}};
}

inline json parse_json(const std::string& text, ErrorKind kind, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(kind, what + " is not valid JSON: " + e.what());
    }
}

/// Reads and validates a config file. An unreadable file is an Io error,
/// anything wrong with its content an InvalidConfig.
inline ProblemConfig load_config(const std::string& path) {
    json j = parse_json(read_text(path), ErrorKind::InvalidConfig, "config '" + path + "'");
    try {
        return validate_config(raw_config_from_json(j));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("config '") + path + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Nodal file

struct NodalFile {
    int version = format_version;
    json config = "external";  // config echo, or the string "external"
    NodalDataset dataset;
};

inline json nodal_file_to_json(const NodalFile& f) {
    json entries = json::array();
    for (const auto& [n, e] : f.dataset.entries) {
        json row = {{"n", n}};
        row["mu_n"] = e.mu_n ? json(*e.mu_n) : json(nullptr);
        if (e.first_label) row["first_label"] = *e.first_label;
        row["nodes"] = e.nodes;
        entries.push_back(std::move(row));
    }
    return {{"version", f.version},
            {"header", {{"provenance", to_string(f.dataset.provenance)}, {"config", f.config}}},
            {"entries", std::move(entries)}};
}

inline NodalFile nodal_file_from_json(const json& j) {
    try {
        NodalFile f;
        f.version = j.at("version").get<int>();
        if (f.version != format_version) {
            throw Error(ErrorKind::InvalidArgument, "unsupported nodal file version " + std::to_string(f.version));
        }
        const json& header = j.at("header");
        f.dataset.provenance = parse_provenance(header.at("provenance").get<std::string>());
        f.config = header.contains("config") ? header.at("config") : json("external");
        for (const auto& row : j.at("entries")) {
            const int n = row.at("n").get<int>();
            NodalEntry e;
            if (row.contains("mu_n") && !row.at("mu_n").is_null()) e.mu_n = row.at("mu_n").get<double>();
            if (row.contains("first_label")) e.first_label = row.at("first_label").get<int>();
            e.nodes = row.at("nodes").get<std::vector<double>>();
            if (!f.dataset.entries.emplace(n, std::move(e)).second) {
                throw Error(ErrorKind::InvalidArgument, "duplicate entry n = " + std::to_string(n));
            }
        }
        validate_dataset(f.dataset);
        return f;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed nodal file: ") + e.what());
    }
}

inline NodalFile load_nodal_file(const std::string& path) {
    return nodal_file_from_json(parse_json(read_text(path), ErrorKind::InvalidArgument, "nodal file '" + path + "'"));
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

/// Rows of equal length under a header line; numbers at full precision.
inline std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    return out.str();
}

}  // namespace nodal
