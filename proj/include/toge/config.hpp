#ifndef TOGE_CONFIG_HPP
#define TOGE_CONFIG_HPP

#include "toge/geodesic.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace toge {

/// Fully validated run configuration.  Every computation downstream is
/// deterministic given one of these (no seeds anywhere).
struct RunConfig {
    // polytope
    std::string polytope_type; // interval | simplex | cube | hirzebruch | facets
    int dim = 1;
    int hirzebruch_a = 0;
    std::vector<Facet> explicit_facets;

    std::optional<std::vector<Monomial>> u0_smooth;
    std::optional<std::vector<Monomial>> u1_smooth;

    std::vector<std::int64_t> k_values = {16, 32, 64, 128};
    int t_grid = 11;
    int x_grid = 33;
    std::optional<double> margin; // absent: max(0.02, 1/(4k)) per k

    QuadratureOptions quadrature;

    std::vector<Vec> rho_values; // szego / pkernel / localization probes
    double localization_delta = 0.1;

    std::string out_dir = ".";
    int threads = 1;

    std::string config_hash; // FNV-1a over the raw config bytes
    std::string source_path;

    std::shared_ptr<const DelzantPolytope> build_polytope() const;
    SymplecticPotential build_u0(std::shared_ptr<const DelzantPolytope> p) const;
    SymplecticPotential build_u1(std::shared_ptr<const DelzantPolytope> p) const;
};

/// Parses and validates; throws SchemaError listing every violation, or
/// IoError if the file cannot be read.
RunConfig parse_config(const std::string& path);

/// Command dispatch: validate, qconst, pkernel, szego, geodesic, rk,
/// converge, rates, oracle.  Returns the process exit code (0 success,
/// 2 schema, 3 numerical failure) and writes CSVs under config.out_dir.
int run_command(const std::string& command, RunConfig config);

extern const char* kToolVersion;

} // namespace toge

#endif
