#ifndef TOGE_CONVERGE_HPP
#define TOGE_CONVERGE_HPP

#include "toge/geodesic.hpp"

#include <array>
#include <string>

namespace toge {

struct EvalGrid {
    std::vector<double> t_values;
    std::vector<Vec> x_values;         // interior points, min l >= margin
    std::vector<bool> near_boundary;   // any l_r(x) < 0.1
    double margin = 0.0;
};

EvalGrid build_grid(const GeodesicPair& pair, int n_t, int n_x, double margin);

/// Sup of one error field over the grid, with its argmax.
struct FieldSup {
    double value = 0.0;
    double arg_t = 0.0;
    Vec arg_x;
};

inline constexpr std::array<const char*, 8> kErrorFieldNames = {
    "e0", "e1_space", "e1_time", "e2_space", "e2_mixed", "e2_time",
    "e1_space_r", "e2_space_r"};

struct ErrorRow {
    std::int64_t k = 0;
    double c_k = 0.0; // fitted additive constant, grid mean of psi_k - phi_t at t = 0
    std::array<FieldSup, 8> fields;
};

/// C0/C1/C2 sup differences between the Bergman and Monge-Ampere jets over
/// the grid; near-boundary points also contribute the r-frame first and
/// second space derivatives through d/dr = (2/r) d/drho and
/// d^2/dr^2 = (4/r^2)(d^2/drho^2 - (1/2) d/drho), r_j = e^{rho_j/2}.
ErrorRow error_fields(const GeodesicPair& pair, const NormingTable& q0, const NormingTable& q1,
                      const EvalGrid& grid, int threads = 1);

enum class RateModel { PurePower, PowerLog };

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // max abs log-residual
};

/// Least squares on log e vs log k (PurePower), or with the log log k term
/// removed first (PowerLog: e = c log(k) k^slope).  All-zero errors return
/// slope -inf (DegenerateFit sentinel) rather than throwing.
RateFit fit_rate(const std::vector<std::int64_t>& k_list, const std::vector<double>& e_list,
                 RateModel model);

} // namespace toge

#endif
