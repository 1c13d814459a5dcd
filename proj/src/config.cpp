#include "toge/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace toge {

const char* kToolVersion = "toge 0.1.0";

namespace {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::vector<Monomial> parse_monomials(const json& j, int dim, const std::string& where,
                                      std::vector<std::string>& errs) {
    std::vector<Monomial> out;
    if (!j.is_array()) {
        errs.push_back(where + ": expected an array of {exp, coef}");
        return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& t = j[i];
        std::string at = where + "[" + std::to_string(i) + "]";
        if (!t.is_object() || !t.contains("exp") || !t.contains("coef")) {
            errs.push_back(at + ": expected {\"exp\": [...], \"coef\": number}");
            continue;
        }
        Monomial m;
        if (!t["exp"].is_array() || static_cast<int>(t["exp"].size()) != dim) {
            errs.push_back(at + ".exp: expected an integer array of length " +
                           std::to_string(dim));
            continue;
        }
        m.exponents = VecI(dim);
        bool ok = true;
        for (int jx = 0; jx < dim; ++jx) {
            if (!t["exp"][jx].is_number_integer() || t["exp"][jx].get<int>() < 0) {
                errs.push_back(at + ".exp: entries must be nonnegative integers");
                ok = false;
                break;
            }
            m.exponents[jx] = t["exp"][jx].get<int>();
        }
        if (!ok) continue;
        if (!t["coef"].is_number()) {
            errs.push_back(at + ".coef: expected a number");
            continue;
        }
        m.coef = t["coef"].get<double>();
        out.push_back(m);
    }
    return out;
}

} // namespace

std::shared_ptr<const DelzantPolytope> RunConfig::build_polytope() const {
    if (polytope_type == "interval") return std::make_shared<const DelzantPolytope>(DelzantPolytope::interval());
    if (polytope_type == "simplex") return std::make_shared<const DelzantPolytope>(DelzantPolytope::simplex(dim));
    if (polytope_type == "cube") return std::make_shared<const DelzantPolytope>(DelzantPolytope::cube(dim));
    if (polytope_type == "hirzebruch")
        return std::make_shared<const DelzantPolytope>(DelzantPolytope::hirzebruch(hirzebruch_a));
    return std::make_shared<const DelzantPolytope>(dim, explicit_facets);
}

SymplecticPotential RunConfig::build_u0(std::shared_ptr<const DelzantPolytope> p) const {
    return SymplecticPotential(std::move(p), u0_smooth.value_or(std::vector<Monomial>{}));
}

SymplecticPotential RunConfig::build_u1(std::shared_ptr<const DelzantPolytope> p) const {
    if (!u1_smooth) fail(ErrorCode::SchemaError, "u1 is not configured");
    return SymplecticPotential(std::move(p), *u1_smooth);
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string raw = buf.str();

    json j;
    try {
        j = json::parse(raw);
    } catch (const std::exception& e) {
        fail(ErrorCode::SchemaError, std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig cfg;
    cfg.config_hash = fnv1a_hex(raw);
    cfg.source_path = path;
    std::vector<std::string> errs;

    // polytope
    if (!j.contains("polytope") || !j["polytope"].is_object()) {
        errs.push_back("polytope: required object");
    } else {
        const json& p = j["polytope"];
        cfg.polytope_type = p.value("type", "");
        if (cfg.polytope_type == "interval") {
            cfg.dim = 1;
        } else if (cfg.polytope_type == "simplex" || cfg.polytope_type == "cube") {
            cfg.dim = p.value("dim", 2);
            if (cfg.dim < 1 || cfg.dim > 3) errs.push_back("polytope.dim: must be 1, 2 or 3");
        } else if (cfg.polytope_type == "hirzebruch") {
            cfg.dim = 2;
            cfg.hirzebruch_a = p.value("a", 1);
            if (cfg.hirzebruch_a < 0) errs.push_back("polytope.a: must be >= 0");
        } else if (cfg.polytope_type == "facets") {
            cfg.dim = p.value("dim", 0);
            if (cfg.dim < 1 || cfg.dim > 3) errs.push_back("polytope.dim: must be 1, 2 or 3");
            if (!p.contains("facets") || !p["facets"].is_array()) {
                errs.push_back("polytope.facets: required array");
            } else {
                for (std::size_t i = 0; i < p["facets"].size(); ++i) {
                    const json& fj = p["facets"][i];
                    std::string at = "polytope.facets[" + std::to_string(i) + "]";
                    if (!fj.contains("normal") || !fj["normal"].is_array() ||
                        static_cast<int>(fj["normal"].size()) != cfg.dim ||
                        !fj.contains("offset") || !fj["offset"].is_number_integer()) {
                        errs.push_back(at + ": expected {normal: int[dim], offset: int}");
                        continue;
                    }
                    Facet f;
                    f.normal = VecI(cfg.dim);
                    for (int jx = 0; jx < cfg.dim; ++jx)
                        f.normal[jx] = fj["normal"][jx].get<int>();
                    f.offset = fj["offset"].get<std::int64_t>();
                    cfg.explicit_facets.push_back(f);
                }
            }
        } else {
            errs.push_back("polytope.type: one of interval, simplex, cube, hirzebruch, facets");
        }
    }

    if (j.contains("u0")) {
        if (!j["u0"].is_object() || !j["u0"].contains("smooth"))
            errs.push_back("u0: expected {\"smooth\": [...]}");
        else
            cfg.u0_smooth = parse_monomials(j["u0"]["smooth"], cfg.dim, "u0.smooth", errs);
    }
    if (j.contains("u1")) {
        if (!j["u1"].is_object() || !j["u1"].contains("smooth"))
            errs.push_back("u1: expected {\"smooth\": [...]}");
        else
            cfg.u1_smooth = parse_monomials(j["u1"]["smooth"], cfg.dim, "u1.smooth", errs);
    }

    if (j.contains("k_values")) {
        if (!j["k_values"].is_array() || j["k_values"].empty()) {
            errs.push_back("k_values: expected a nonempty integer array");
        } else {
            cfg.k_values.clear();
            for (const auto& v : j["k_values"]) {
                if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
                    errs.push_back("k_values: entries must be integers >= 1");
                    break;
                }
                cfg.k_values.push_back(v.get<std::int64_t>());
            }
            for (std::size_t i = 0; i + 1 < cfg.k_values.size(); ++i)
                if (cfg.k_values[i] >= cfg.k_values[i + 1]) {
                    errs.push_back("k_values not increasing");
                    break;
                }
        }
    }

    cfg.t_grid = j.value("t_grid", 11);
    cfg.x_grid = j.value("x_grid", 33);
    if (cfg.t_grid < 3) errs.push_back("t_grid: must be >= 3");
    if (cfg.x_grid < 3) errs.push_back("x_grid: must be >= 3");
    if (j.contains("margin")) {
        if (j["margin"].is_number() && j["margin"].get<double>() > 0)
            cfg.margin = j["margin"].get<double>();
        else if (!(j["margin"].is_string() && j["margin"] == "auto"))
            errs.push_back("margin: positive number or \"auto\"");
    }

    if (j.contains("quadrature")) {
        const json& q = j["quadrature"];
        cfg.quadrature.cells_per_axis = q.value("cells_per_axis", 32);
        cfg.quadrature.gauss_order = q.value("gauss_order", 16);
        cfg.quadrature.refine_factor = q.value("refine_factor", 4);
        cfg.quadrature.rtol = q.value("rtol", 1e-8);
        if (cfg.quadrature.cells_per_axis < 2) errs.push_back("quadrature.cells_per_axis: >= 2");
        if (cfg.quadrature.gauss_order < 2 || cfg.quadrature.gauss_order > 64)
            errs.push_back("quadrature.gauss_order: in [2, 64]");
        if (cfg.quadrature.refine_factor < 1) errs.push_back("quadrature.refine_factor: >= 1");
        if (!(cfg.quadrature.rtol > 0)) errs.push_back("quadrature.rtol: > 0");
    }

    if (j.contains("rho_values")) {
        if (!j["rho_values"].is_array()) {
            errs.push_back("rho_values: expected array of number arrays");
        } else {
            for (const auto& rv : j["rho_values"]) {
                if (!rv.is_array() || static_cast<int>(rv.size()) != cfg.dim) {
                    errs.push_back("rho_values: each entry must be a number array of length dim");
                    break;
                }
                Vec r(cfg.dim);
                for (int jx = 0; jx < cfg.dim; ++jx) r[jx] = rv[jx].get<double>();
                cfg.rho_values.push_back(r);
            }
        }
    }
    cfg.localization_delta = j.value("localization_delta", 0.1);

    cfg.out_dir = j.value("out_dir", ".");
    cfg.threads = j.value("threads", 1);
    if (cfg.threads < 1) errs.push_back("threads: must be >= 1");

    if (!errs.empty()) {
        std::string msg = "config violations:";
        for (const std::string& e : errs) msg += "\n  - " + e;
        fail(ErrorCode::SchemaError, msg);
    }
    return cfg;
}

} // namespace toge
