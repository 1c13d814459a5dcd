#ifndef TOGE_POTENTIAL_HPP
#define TOGE_POTENTIAL_HPP

#include "toge/polytope.hpp"

#include <memory>
#include <vector>

namespace toge {

/// Term of the smooth polynomial part: coef * prod_j x_j^exponents[j].
struct Monomial {
    VecI exponents;
    double coef = 0.0;
};

struct HessianPair {
    Mat G;               // Hessian of u at x
    Mat H;               // G^{-1}
    double det_G = 0.0;
    double delta_factor = 0.0; // delta_phi, from det(G^{-1}) = delta_phi * prod_r l_r
};

struct LegendreResult {
    double value = 0.0; // phi(rho) = <x*, rho> - u(x*)
    Vec maximizer;      // x*, strictly interior
    int iterations = 0;
    double residual = 0.0; // ||grad u(x*) - rho||
};

/// Convex potential on a Delzant polytope.  Subclasses supply u, grad u,
/// hess u; the canonical Guillemin form (l log l plus polynomial) is the main
/// implementation, the truncated Bargmann-Fock model a second one used as a
/// closed-form oracle.
class PotentialBase {
  public:
    virtual ~PotentialBase() = default;

    virtual const DelzantPolytope& polytope() const = 0;

    /// u(x) on the closed polytope; l log l terms use the continuous
    /// extension 0 log 0 = 0.
    virtual double value(const Vec& x) const = 0;
    /// grad u at strictly interior x (every l_r >= eps_bd).
    virtual Vec gradient(const Vec& x, double eps_bd = 1e-12) const = 0;
    virtual HessianPair hessian(const Vec& x, double eps_bd = 1e-12) const = 0;

    /// Lambda(x) = det(hess u(x)) * prod_r l_r(x), the reciprocal volume
    /// density of (VOLDEN): smooth and strictly positive up to the boundary.
    virtual double hess_det_times_barrier(const Vec& x) const = 0;

    /// g_a(x) = u(x) + <a - x, grad u(x)>, continuously extended to the
    /// closed polytope (-inf where the integrand exp(k g) vanishes).
    /// Decreases along every ray leaving a, so max g = u(a) at x = a.
    virtual double laplace_exponent(const Vec& x, const Vec& a) const = 0;
};

/// u(x) = sum_r l_r(x) log l_r(x) + f(x) with polynomial f.
class SymplecticPotential final : public PotentialBase {
  public:
    SymplecticPotential(std::shared_ptr<const DelzantPolytope> polytope,
                        std::vector<Monomial> smooth_part);

    const DelzantPolytope& polytope() const override { return *polytope_; }
    std::shared_ptr<const DelzantPolytope> polytope_ptr() const { return polytope_; }
    const std::vector<Monomial>& smooth_part() const { return smooth_; }

    double value(const Vec& x) const override;
    Vec gradient(const Vec& x, double eps_bd = 1e-12) const override;
    HessianPair hessian(const Vec& x, double eps_bd = 1e-12) const override;
    double hess_det_times_barrier(const Vec& x) const override;
    double laplace_exponent(const Vec& x, const Vec& a) const override;

    double smooth_value(const Vec& x) const;
    Vec smooth_gradient(const Vec& x) const;
    Mat smooth_hessian(const Vec& x) const;

  private:
    std::shared_ptr<const DelzantPolytope> polytope_;
    std::vector<Monomial> smooth_;
};

/// u(x) = sum_j (x_j log x_j - x_j) on the cube [0, L]^m; Legendre dual of
/// the flat model phi(rho) = sum_j e^{rho_j}.  Not of Guillemin type for the
/// cube (no log terms at the far faces); used as a quadrature oracle.
class TruncatedBargmannFock final : public PotentialBase {
  public:
    TruncatedBargmannFock(int m, std::int64_t side);

    const DelzantPolytope& polytope() const override { return *polytope_; }
    double value(const Vec& x) const override;
    Vec gradient(const Vec& x, double eps_bd = 1e-12) const override;
    HessianPair hessian(const Vec& x, double eps_bd = 1e-12) const override;
    double hess_det_times_barrier(const Vec& x) const override;
    double laplace_exponent(const Vec& x, const Vec& a) const override;

  private:
    std::shared_ptr<const DelzantPolytope> polytope_;
    double side_;
};

/// Damped Newton solve of grad u(x) = rho, maximizing <x,rho> - u(x).
/// Seeded at the barrier analytic center; fraction-to-boundary factor 0.5;
/// tolerance ||grad u - rho|| <= 1e-12 (1 + ||rho||).
LegendreResult legendre(const PotentialBase& u, const Vec& rho, int max_iter = 200);

/// Maximizer of the Legendre problem, mu(rho).
Vec moment_map(const PotentialBase& u, const Vec& rho);
/// grad u(x) = rho_x, the inverse of the moment map.
Vec inverse_moment(const PotentialBase& u, const Vec& x, double eps_bd = 1e-12);

/// Minimum Hessian eigenvalue over an interior tensor grid; negative or zero
/// means the potential is rejected as non-convex.
double convexity_check(const PotentialBase& u, int grid_resolution);

/// Merge-and-sum monomial lists; drops cancelled terms.
std::vector<Monomial> combine_monomials(const std::vector<Monomial>& a, double ca,
                                        const std::vector<Monomial>& b, double cb);

} // namespace toge

#endif
