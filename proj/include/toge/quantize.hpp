#ifndef TOGE_QUANTIZE_HPP
#define TOGE_QUANTIZE_HPP

#include "toge/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace toge {

struct QuadratureOptions {
    int cells_per_axis = 32;
    int gauss_order = 16;
    int refine_factor = 4;   // extra splits of the cell containing alpha/k
    int grade_levels = 6;    // geometric grading depth at axis ends
    double rtol = 1e-8;      // refinement disagreement tolerance on log Q
    double prune_slack = 100.0; // skip cells with k(g - g_peak) below -slack
};

/// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// log Q_raw(alpha) = log of the integral over P of exp(k g_alpha), where
/// g_alpha(x) = u(x) + <alpha/k - x, grad u(x)> is maximized at x = alpha/k
/// with value u(alpha/k).  No angular or volume normalization is applied.
double norming_log(const PotentialBase& u, std::int64_t k, const VecI& alpha,
                   const QuadratureOptions& opts = {}, double* err_estimate = nullptr);

/// Per-(k, alpha) table of log Q_raw over kP, entries in lattice order.
class NormingTable {
  public:
    NormingTable() = default;
    NormingTable(std::string potential_id, std::int64_t k, LatticeSet lattice,
                 std::vector<double> log_q_raw, std::vector<double> quad_err,
                 double normalization);

    const std::string& potential_id() const { return id_; }
    std::int64_t k() const { return k_; }
    const LatticeSet& lattice() const { return lattice_; }
    std::size_t size() const { return lattice_.points.size(); }
    double log_q(std::size_t i) const { return log_q_[i]; }
    double quad_err(std::size_t i) const { return err_[i]; }
    /// (d_k + 1) / vol(P); multiply Q_raw by this to compare with the CP^m tables.
    double normalization() const { return normalization_; }
    std::size_t index_of(const VecI& alpha) const; // throws OutsideLattice

  private:
    std::string id_;
    std::int64_t k_ = 0;
    LatticeSet lattice_;
    std::vector<double> log_q_, err_;
    double normalization_ = 1.0;
};

NormingTable build_norming_table(const PotentialBase& u, const std::string& potential_id,
                                 std::int64_t k, const QuadratureOptions& opts = {},
                                 int threads = 1);

struct PValue {
    VecI alpha;
    std::optional<double> log_at_z; // log P(alpha, z) at the supplied rho
    double log_special = 0.0;       // log P(alpha) = k u(alpha/k) - log Q_raw
    bool boundary = false;          // alpha/k on the boundary; special value by limit formula
};

/// P(alpha, z) = |s_alpha(z)|^2 / Q(alpha); the special value P(alpha) is its
/// value at z = mu^{-1}(alpha/k), computed through the duality identity
/// Q = e^{k u(alpha/k)} / P(alpha) so that boundary lattice points need no
/// Legendre solve.
PValue pkernel(const PotentialBase& u, const NormingTable& table, const VecI& alpha,
               const std::optional<Vec>& rho = std::nullopt);

struct SzegoDiagonal {
    double log_value = 0.0;       // log Pi(z, z)
    double value = 0.0;
    std::vector<double> weights;  // p_alpha, normalized, lattice order
    double kahler_potential = 0.0; // phi(rho) used in the exponents
};

SzegoDiagonal szego_diagonal(const PotentialBase& u, const NormingTable& table, const Vec& rho);

struct LocalizationProfile {
    double inside_mass = 0.0;  // total weight with |alpha/k - mu(rho)| <= radius
    double outside_max = 0.0;  // max single P(alpha, z) outside
    double radius = 0.0;       // k^{-1/2 + delta}
    std::size_t outside_count = 0;
};

LocalizationProfile localization_profile(const PotentialBase& u, const NormingTable& table,
                                         const Vec& rho, double delta);

struct AsymptoticModel {
    double detg_factor = 0.0;   // sqrt(det G(alpha/k)); +inf at boundary alpha
    double log_ptwiddle = 0.0;  // log of the all-facets Bargmann-Fock product
    double log_bf_corner = 0.0; // log of the close-facet Bargmann-Fock product
    double log_gcal = 0.0;      // log G_{phi, delta_k}
    int near_count = 0;
    double log_model1 = 0.0;    // k^{m/2} sqrt(det G) * ptwiddle, evaluated in cancelled form
    double log_model2 = 0.0;    // k^{(m-near)/2} sqrt(gcal) * bf_corner
    bool boundary_flag = false; // some l_j(alpha/k) = 0, or l_j between delta_k and 2 delta_k
};

/// Boundary-zone model of the special values P(alpha); delta_k defaults to
/// k^{-2/3}.  The overall constant C_m is not included: fit it with
/// fit_model_constant.
AsymptoticModel asymptotic_model(const PotentialBase& u, std::int64_t k, const VecI& alpha,
                                 double delta_k = -1.0);

struct ModelFit {
    double c_median = 0.0;            // fitted C_m over interior alpha, model 1
    std::vector<double> ratios;       // P(alpha)/model1 over interior alpha
    double spread = 0.0;              // max ratio / min ratio over interior alpha
    std::size_t interior_count = 0;
};

ModelFit fit_model_constant(const PotentialBase& u, const NormingTable& table,
                            double delta_k = -1.0);

} // namespace toge

#endif
