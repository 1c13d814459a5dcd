#include "toge/config.hpp"
#include "toge/converge.hpp"
#include "toge/parallel.hpp"
#include "toge/special.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace toge {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_vec(const Vec& v) {
    std::string s;
    for (int j = 0; j < v.size(); ++j) {
        if (j) s += ';';
        s += fmt17(v[j]);
    }
    return s;
}

std::string join_veci(const VecI& v) {
    std::string s;
    for (int j = 0; j < v.size(); ++j) {
        if (j) s += ';';
        s += std::to_string(v[j]);
    }
    return s;
}

std::string join_mat(const Mat& m) {
    std::string s;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (i || j) s += ';';
            s += fmt17(m(i, j));
        }
    return s;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& dir, const std::string& name, const RunConfig& cfg,
              const std::string& header) {
        std::filesystem::create_directories(dir);
        path_ = dir + "/" + name;
        out_.open(path_, std::ios::binary | std::ios::trunc);
        if (!out_) fail(ErrorCode::IoError, "cannot write " + path_);
        out_ << "# " << kToolVersion << " config=" << cfg.config_hash << "\n";
        out_ << header << "\n";
    }
    void row(const std::string& line) { out_ << line << "\n"; }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
};

std::vector<Vec> default_rhos(const RunConfig& cfg) {
    if (!cfg.rho_values.empty()) return cfg.rho_values;
    std::vector<Vec> out;
    for (double v : {-2.0, -0.5, 0.0, 0.7, 2.3}) out.push_back(Vec::Constant(cfg.dim, v));
    return out;
}

struct TableCache {
    std::map<std::pair<std::int64_t, int>, NormingTable> by_kt; // t index on the 11-grid; -1 => u0, -2 => u1
    const NormingTable& get(const GeodesicPair& pair, const RunConfig& cfg, std::int64_t k,
                            int t_index, double t) {
        auto key = std::make_pair(k, t_index);
        auto it = by_kt.find(key);
        if (it != by_kt.end()) return it->second;
        SymplecticPotential ut = pair.at_time(t);
        std::string id = t_index == -1 ? "u0" : (t_index == -2 ? "u1" : "u_t" + std::to_string(t_index));
        NormingTable tab = build_norming_table(ut, id, k, cfg.quadrature, cfg.threads);
        return by_kt.emplace(key, std::move(tab)).first->second;
    }
};

double margin_for(const RunConfig& cfg, std::int64_t k) {
    if (cfg.margin) return *cfg.margin;
    return std::max(0.02, 1.0 / (4.0 * static_cast<double>(k)));
}

int cmd_validate(const RunConfig& cfg) {
    auto poly = cfg.build_polytope();
    std::cout << "polytope: dim=" << poly->dim() << " facets=" << poly->facet_count()
              << " vertices=" << poly->vertices().size()
              << " volume=" << fmt17(poly->euclidean_volume()) << "\n";
    SymplecticPotential u0 = cfg.build_u0(poly);
    double c0 = convexity_check(u0, 64);
    std::cout << "u0 convexity: min Hessian eigenvalue " << fmt17(c0) << "\n";
    if (c0 <= 0) fail(ErrorCode::NonConvexAt, "u0 fails the convexity check");
    if (cfg.u1_smooth) {
        SymplecticPotential u1 = cfg.build_u1(poly);
        double c1 = convexity_check(u1, 64);
        std::cout << "u1 convexity: min Hessian eigenvalue " << fmt17(c1) << "\n";
        if (c1 <= 0) fail(ErrorCode::NonConvexAt, "u1 fails the convexity check");
    }
    std::cout << "validate: OK\n";
    return 0;
}

int cmd_qconst(const RunConfig& cfg) {
    auto poly = cfg.build_polytope();
    std::vector<std::pair<std::string, SymplecticPotential>> pots;
    pots.emplace_back("u0", cfg.build_u0(poly));
    if (cfg.u1_smooth) pots.emplace_back("u1", cfg.build_u1(poly));
    for (auto& [id, u] : pots) {
        CsvWriter csv(cfg.out_dir, "qconst_" + id + ".csv", cfg,
                      "k,alpha,logQ_raw,logP_special,quad_err");
        for (std::int64_t k : cfg.k_values) {
            NormingTable tab = build_norming_table(u, id, k, cfg.quadrature, cfg.threads);
            for (std::size_t i = 0; i < tab.size(); ++i) {
                PValue pv = pkernel(u, tab, tab.lattice().points[i]);
                csv.row(std::to_string(k) + "," + join_veci(tab.lattice().points[i]) + "," +
                        fmt17(tab.log_q(i)) + "," + fmt17(pv.log_special) + "," +
                        fmt17(tab.quad_err(i)));
            }
        }
        std::cout << "wrote " << csv.path() << "\n";
    }
    return 0;
}

int cmd_pkernel(const RunConfig& cfg) {
    auto poly = cfg.build_polytope();
    SymplecticPotential u0 = cfg.build_u0(poly);
    std::vector<Vec> rhos = default_rhos(cfg);
    CsvWriter csv(cfg.out_dir, "pkernel.csv", cfg, "k,alpha,rho,logP_at_z,logP_special,boundary");
    for (std::int64_t k : cfg.k_values) {
        NormingTable tab = build_norming_table(u0, "u0", k, cfg.quadrature, cfg.threads);
        for (const Vec& rho : rhos) {
            for (std::size_t i = 0; i < tab.size(); ++i) {
                PValue pv = pkernel(u0, tab, tab.lattice().points[i], rho);
                csv.row(std::to_string(k) + "," + join_veci(tab.lattice().points[i]) + "," +
                        join_vec(rho) + "," + fmt17(*pv.log_at_z) + "," + fmt17(pv.log_special) +
                        "," + std::to_string(pv.boundary ? 1 : 0));
            }
        }
    }
    std::cout << "wrote " << csv.path() << "\n";
    return 0;
}

int cmd_szego(const RunConfig& cfg) {
    auto poly = cfg.build_polytope();
    SymplecticPotential u0 = cfg.build_u0(poly);
    std::vector<Vec> rhos = default_rhos(cfg);
    CsvWriter csv(cfg.out_dir, "szego.csv", cfg, "k,rho,Pi,tyz_deviation");
    const double vol = poly->euclidean_volume();
    const int m = poly->dim();
    for (std::int64_t k : cfg.k_values) {
        NormingTable tab = build_norming_table(u0, "u0", k, cfg.quadrature, cfg.threads);
        for (const Vec& rho : rhos) {
            SzegoDiagonal sz = szego_diagonal(u0, tab, rho);
            double dev = std::abs(vol * std::pow(static_cast<double>(k), -m) * sz.value - 1.0);
            csv.row(std::to_string(k) + "," + join_vec(rho) + "," + fmt17(sz.value) + "," +
                    fmt17(dev));
        }
    }
    std::cout << "wrote " << csv.path() << "\n";
    return 0;
}

GeodesicPair build_pair(const RunConfig& cfg) {
    auto poly = cfg.build_polytope();
    if (!cfg.u1_smooth)
        fail(ErrorCode::SchemaError, "this command needs both u0 and u1 configured");
    GeodesicPair pair(cfg.build_u0(poly), cfg.build_u1(poly));
    pair.validate();
    return pair;
}

int cmd_geodesic(const RunConfig& cfg) {
    GeodesicPair pair = build_pair(cfg);
    CsvWriter csv(cfg.out_dir, "geodesic.csv", cfg,
                  "kind,k,t,x,rho,phi,dt_phi,dt2_phi,grad,hess,mixed");
    std::map<std::int64_t, std::pair<NormingTable, NormingTable>> tabs;
    for (std::int64_t k : cfg.k_values)
        tabs.emplace(k, std::make_pair(
                            build_norming_table(pair.endpoint0(), "u0", k, cfg.quadrature, cfg.threads),
                            build_norming_table(pair.endpoint1(), "u1", k, cfg.quadrature, cfg.threads)));
    EvalGrid grid = build_grid(pair, cfg.t_grid, cfg.x_grid,
                               cfg.margin ? *cfg.margin : 0.02);
    for (double t : grid.t_values) {
        SymplecticPotential ut = pair.at_time(t);
        for (const Vec& x : grid.x_values) {
            Vec rho = inverse_moment(ut, x);
            MAJet mj = ma_jet(pair, t, rho);
            csv.row("ma,0," + fmt17(t) + "," + join_vec(x) + "," + join_vec(rho) + "," +
                    fmt17(mj.phi) + "," + fmt17(mj.dt) + "," + fmt17(mj.dt2) + "," +
                    join_vec(mj.grad) + "," + join_mat(mj.hess) + "," + join_vec(mj.mixed));
            for (std::int64_t k : cfg.k_values) {
                const auto& [q0, q1] = tabs.at(k);
                BergmanJet bj = bergman_jet(pair, q0, q1, t, rho);
                csv.row("bergman," + std::to_string(k) + "," + fmt17(t) + "," + join_vec(x) +
                        "," + join_vec(rho) + "," + fmt17(bj.phi) + "," + fmt17(bj.dt) + "," +
                        fmt17(bj.dt2) + "," + join_vec(bj.grad) + "," + join_mat(bj.hess) + "," +
                        join_vec(bj.mixed));
            }
        }
    }
    std::cout << "wrote " << csv.path() << "\n";
    return 0;
}

int cmd_rk(const RunConfig& cfg) {
    GeodesicPair pair = build_pair(cfg);
    TableCache cache;
    CsvWriter csv(cfg.out_dir, "rk.csv", cfg, "k,t,alpha,Rk,Rinfty,gap,interior");
    for (std::int64_t k : cfg.k_values) {
        const NormingTable& q0 = cache.get(pair, cfg, k, -1, 0.0);
        const NormingTable& q1 = cache.get(pair, cfg, k, -2, 1.0);
        const double dk = std::pow(static_cast<double>(k), -2.0 / 3.0);
        for (int ti = 0; ti < cfg.t_grid; ++ti) {
            double t = static_cast<double>(ti) / (cfg.t_grid - 1);
            const NormingTable& qt =
                ti == 0 ? q0 : (ti == cfg.t_grid - 1 ? q1 : cache.get(pair, cfg, k, ti, t));
            for (std::size_t i = 0; i < qt.size(); ++i) {
                const VecI& al = qt.lattice().points[i];
                Vec a(al.size());
                for (int j = 0; j < al.size(); ++j) a[j] = static_cast<double>(al[j]) / k;
                double rk = std::exp(rk_log_ratio(pair, qt, q0, q1, t, al));
                double ri = rinfty(pair, t, a);
                bool interior = pair.polytope().min_facet_value(a) >= dk;
                csv.row(std::to_string(k) + "," + fmt17(t) + "," + join_veci(al) + "," +
                        fmt17(rk) + "," + fmt17(ri) + "," + fmt17(std::abs(rk - ri)) + "," +
                        (interior ? "1" : "0"));
            }
        }
    }
    std::cout << "wrote " << csv.path() << "\n";
    return 0;
}

int cmd_converge(const RunConfig& cfg, bool write_errors, bool write_rates) {
    GeodesicPair pair = build_pair(cfg);
    std::vector<ErrorRow> rows;
    for (std::int64_t k : cfg.k_values) {
        NormingTable q0 = build_norming_table(pair.endpoint0(), "u0", k, cfg.quadrature, cfg.threads);
        NormingTable q1 = build_norming_table(pair.endpoint1(), "u1", k, cfg.quadrature, cfg.threads);
        EvalGrid grid = build_grid(pair, cfg.t_grid, cfg.x_grid, margin_for(cfg, k));
        rows.push_back(error_fields(pair, q0, q1, grid, cfg.threads));
    }
    if (write_errors) {
        CsvWriter csv(cfg.out_dir, "errors.csv", cfg, "k,field,sup_value,argmax_t,argmax_x,c_k");
        for (const ErrorRow& row : rows)
            for (std::size_t f = 0; f < kErrorFieldNames.size(); ++f)
                csv.row(std::to_string(row.k) + "," + kErrorFieldNames[f] + "," +
                        fmt17(row.fields[f].value) + "," + fmt17(row.fields[f].arg_t) + "," +
                        join_vec(row.fields[f].arg_x) + "," + fmt17(row.c_k));
        std::cout << "wrote " << csv.path() << "\n";
    }
    if (write_rates) {
        CsvWriter csv(cfg.out_dir, "rates.csv", cfg, "field,model,slope,residual");
        for (std::size_t f = 0; f < 6; ++f) { // the six convergence fields
            std::vector<double> es;
            for (const ErrorRow& row : rows) es.push_back(row.fields[f].value);
            for (RateModel model : {RateModel::PurePower, RateModel::PowerLog}) {
                RateFit fit = fit_rate(cfg.k_values, es, model);
                csv.row(std::string(kErrorFieldNames[f]) + "," +
                        (model == RateModel::PurePower ? "pure_power" : "power_log") + "," +
                        fmt17(fit.slope) + "," + fmt17(fit.residual));
            }
        }
        std::cout << "wrote " << csv.path() << "\n";
    }
    return 0;
}

int cmd_oracle(const RunConfig& cfg) {
    // closed-form quadrature self-test; independent of any configured polytope
    double worst = 0.0;
    auto check = [&](const char* what, double got, double expected, double tol) {
        double rel = std::abs(got - expected) / std::max(1.0, std::abs(expected));
        worst = std::max(worst, rel);
        std::cout << (rel <= tol ? "ok   " : "FAIL ") << what << " rel_err=" << fmt17(rel)
                  << "\n";
        return rel <= tol;
    };
    bool all = true;

    // Beta: interval Fubini-Study, raw Q(alpha) = B(alpha+1, k-alpha+1)
    {
        auto poly = std::make_shared<const DelzantPolytope>(DelzantPolytope::interval());
        SymplecticPotential fs(poly, {});
        for (std::int64_t k : {3ll, 8ll, 16ll}) {
            NormingTable tab = build_norming_table(fs, "fs", k, cfg.quadrature, cfg.threads);
            double dev = 0;
            for (std::size_t i = 0; i < tab.size(); ++i) {
                double expect = log_beta(tab.lattice().points[i][0] + 1.0,
                                         k - tab.lattice().points[i][0] + 1.0);
                dev = std::max(dev, std::abs(tab.log_q(i) - expect));
            }
            all &= check(("interval Beta k=" + std::to_string(k)).c_str(), dev, 0.0, 1e-8);
        }
    }
    // multinomial: simplex m=2, raw Q = 1 / (multinom * (k+1)(k+2))
    {
        auto poly = std::make_shared<const DelzantPolytope>(DelzantPolytope::simplex(2));
        SymplecticPotential fs(poly, {});
        for (std::int64_t k : {2ll, 8ll}) {
            NormingTable tab = build_norming_table(fs, "fs2", k, cfg.quadrature, cfg.threads);
            double dev = 0;
            for (std::size_t i = 0; i < tab.size(); ++i) {
                double expect = -log_multinomial(k, tab.lattice().points[i]) -
                                std::log(static_cast<double>((k + 1) * (k + 2)));
                dev = std::max(dev, std::abs(tab.log_q(i) - expect));
            }
            all &= check(("simplex multinomial k=" + std::to_string(k)).c_str(), dev, 0.0, 1e-8);
        }
    }
    // incomplete gamma: truncated Bargmann-Fock, raw Q = k^{-a-1} gamma(a+1, kL)
    {
        TruncatedBargmannFock bf(1, 3);
        for (std::int64_t k : {4ll, 8ll}) {
            double dev = 0;
            for (std::int64_t a = 0; a <= 3 * k; ++a) {
                VecI alpha(1);
                alpha[0] = static_cast<int>(a);
                double got = norming_log(bf, k, alpha, cfg.quadrature);
                double expect = log_lower_incomplete_gamma(a + 1.0, 3.0 * k) -
                                (a + 1.0) * std::log(static_cast<double>(k));
                dev = std::max(dev, std::abs(got - expect));
            }
            all &= check(("bargmann-fock gamma k=" + std::to_string(k)).c_str(), dev, 0.0, 1e-8);
        }
    }
    std::cout << "oracle max rel err: " << fmt17(worst) << "\n";
    if (!all) fail(ErrorCode::QuadratureNotConverged, "oracle suite tolerance breach");
    return 0;
}

} // namespace

int run_command(const std::string& command, RunConfig cfg) {
    try {
        if (command == "validate") return cmd_validate(cfg);
        if (command == "qconst") return cmd_qconst(cfg);
        if (command == "pkernel") return cmd_pkernel(cfg);
        if (command == "szego") return cmd_szego(cfg);
        if (command == "geodesic") return cmd_geodesic(cfg);
        if (command == "rk") return cmd_rk(cfg);
        if (command == "converge") return cmd_converge(cfg, true, true);
        if (command == "rates") return cmd_converge(cfg, false, true);
        if (command == "oracle") return cmd_oracle(cfg);
        std::cerr << "unknown command: " << command << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == ErrorCode::SchemaError ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace toge
