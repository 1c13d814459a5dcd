#ifndef TOGE_GEODESIC_HPP
#define TOGE_GEODESIC_HPP

#include "toge/quantize.hpp"

namespace toge {

/// Two symplectic potentials on one polytope; u_t = (1-t) u0 + t u1 is the
/// linear path whose Legendre inverse is the Monge-Ampere geodesic.
class GeodesicPair {
  public:
    GeodesicPair(SymplecticPotential u0, SymplecticPotential u1);

    const DelzantPolytope& polytope() const { return u0_.polytope(); }
    const SymplecticPotential& endpoint0() const { return u0_; }
    const SymplecticPotential& endpoint1() const { return u1_; }
    /// u_t with smooth part (1-t) f0 + t f1.
    SymplecticPotential at_time(double t) const;

    /// f = u1 - u0 (a polynomial), and its gradient.
    double f(const Vec& x) const;
    Vec grad_f(const Vec& x) const;

    /// Rejects pairs whose endpoints fail the interior convexity check.
    void validate(int grid_resolution = 64) const;

  private:
    SymplecticPotential u0_, u1_;
    std::vector<Monomial> f_diff_;
};

/// Full jet of the Monge-Ampere geodesic potential phi_t(rho) at (t, rho):
/// all fields are exact envelope formulas evaluated at the Legendre maximizer.
struct MAJet {
    double t = 0.0;
    Vec rho;
    Vec x;        // maximizer = moment map image
    double phi = 0.0;
    double dt = 0.0;   // d phi / dt = -f(x)
    double dt2 = 0.0;  // <grad f, G_t^{-1} grad f>
    Vec grad;          // grad_rho phi = x
    Mat hess;          // G_t(x)^{-1}
    Vec mixed;         // d/dt grad_rho phi = -G_t^{-1} grad f
};

MAJet ma_jet(const GeodesicPair& pair, double t, const Vec& rho);

/// Same jet fields for the Bergman potential psi_k(t, rho)
/// = (1/k) log sum_alpha w_alpha(t) e^{<alpha, rho>},
/// w_alpha(t) = Q0^{t-1} Q1^{-t}; derivatives are exact moment formulas under
/// the weight distribution p_alpha.
struct BergmanJet {
    double t = 0.0;
    std::int64_t k = 0;
    Vec rho;
    double phi = 0.0; // psi_k
    double dt = 0.0;
    double dt2 = 0.0;
    Vec grad;
    Mat hess;
    Vec mixed;
};

BergmanJet bergman_jet(const GeodesicPair& pair, const NormingTable& q0, const NormingTable& q1,
                       double t, const Vec& rho);

/// log R_k(t, alpha) = log Q_t - (1-t) log Q0 - t log Q1, with the Cor. (RP)
/// dual form asserted as an internal guard.
double rk_log_ratio(const GeodesicPair& pair, const NormingTable& qt, const NormingTable& q0,
                    const NormingTable& q1, double t, const VecI& alpha);

/// Pointwise limit of R_k: (det hess u0^{1-t} det hess u1^t / det hess u_t)^{1/2},
/// evaluated through the boundary-safe Lambda = det(hess u) * prod l form so the
/// facet poles cancel.
double rinfty(const GeodesicPair& pair, double t, const Vec& x);

struct RegularityGap {
    double sup_all = 0.0;
    double sup_interior = 0.0; // alpha with every l_j(alpha/k) >= k^{-2/3}
    double sup_boundary = 0.0;
    VecI argmax_all;
};

RegularityGap regularity_gap(const GeodesicPair& pair, const NormingTable& qt,
                             const NormingTable& q0, const NormingTable& q1, double t);

} // namespace toge

#endif
