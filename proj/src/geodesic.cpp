#include "toge/geodesic.hpp"

#include <algorithm>
#include <cmath>

namespace toge {

GeodesicPair::GeodesicPair(SymplecticPotential u0, SymplecticPotential u1)
    : u0_(std::move(u0)), u1_(std::move(u1)) {
    if (u0_.polytope_ptr().get() != u1_.polytope_ptr().get()) {
        // allow distinct objects with identical facet data
        const DelzantPolytope& a = u0_.polytope();
        const DelzantPolytope& b = u1_.polytope();
        bool same = a.dim() == b.dim() && a.facet_count() == b.facet_count();
        for (int r = 0; same && r < a.facet_count(); ++r)
            same = a.facets()[r].normal == b.facets()[r].normal &&
                   a.facets()[r].offset == b.facets()[r].offset;
        if (!same) fail(ErrorCode::DimensionMismatch, "endpoints live on different polytopes");
    }
    f_diff_ = combine_monomials(u1_.smooth_part(), 1.0, u0_.smooth_part(), -1.0);
}

SymplecticPotential GeodesicPair::at_time(double t) const {
    if (t == 0.0) return u0_;
    if (t == 1.0) return u1_;
    return SymplecticPotential(u0_.polytope_ptr(),
                               combine_monomials(u0_.smooth_part(), 1.0 - t,
                                                 u1_.smooth_part(), t));
}

double GeodesicPair::f(const Vec& x) const {
    double s = 0.0;
    for (const Monomial& m : f_diff_) {
        double t = m.coef;
        for (int j = 0; j < x.size(); ++j)
            for (int e = 0; e < m.exponents[j]; ++e) t *= x[j];
        s += t;
    }
    return s;
}

Vec GeodesicPair::grad_f(const Vec& x) const {
    SymplecticPotential diff(u0_.polytope_ptr(), f_diff_);
    return diff.smooth_gradient(x);
}

void GeodesicPair::validate(int grid_resolution) const {
    if (convexity_check(u0_, grid_resolution) <= 0)
        fail(ErrorCode::NonConvexAt, "endpoint u0 fails the convexity check");
    if (convexity_check(u1_, grid_resolution) <= 0)
        fail(ErrorCode::NonConvexAt, "endpoint u1 fails the convexity check");
}

MAJet ma_jet(const GeodesicPair& pair, double t, const Vec& rho) {
    SymplecticPotential ut = pair.at_time(t);
    LegendreResult lr = legendre(ut, rho);
    const Vec& x = lr.maximizer;
    HessianPair hp = ut.hessian(x);

    MAJet jet;
    jet.t = t;
    jet.rho = rho;
    jet.x = x;
    jet.phi = lr.value;
    jet.grad = x;
    jet.hess = hp.H;
    double fx = pair.f(x);
    Vec gf = pair.grad_f(x);
    jet.dt = -fx;
    jet.mixed = -(hp.H * gf);
    jet.dt2 = gf.dot(hp.H * gf);
    return jet;
}

BergmanJet bergman_jet(const GeodesicPair& pair, const NormingTable& q0, const NormingTable& q1,
                       double t, const Vec& rho) {
    (void)pair; // the pair enters only through its norming tables
    if (q0.k() != q1.k()) fail(ErrorCode::MissingNormingTable, "tables at different k");
    if (q0.size() != q1.size()) fail(ErrorCode::MissingNormingTable, "tables over different lattices");
    const std::int64_t k = q0.k();
    const std::size_t n = q0.size();
    const int m = static_cast<int>(rho.size());

    // log weights and two-eigenvalue combination 2 lambda_alpha = log(Q0/Q1)
    std::vector<double> le(n), lam2(n);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        lam2[i] = q0.log_q(i) - q1.log_q(i);
        double e = (t - 1.0) * q0.log_q(i) - t * q1.log_q(i);
        const VecI& al = q0.lattice().points[i];
        for (int j = 0; j < m; ++j) e += static_cast<double>(al[j]) * rho[j];
        le[i] = e;
        mx = std::max(mx, e);
    }
    double z = 0.0;
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = std::exp(le[i] - mx);
        z += p[i];
    }
    for (std::size_t i = 0; i < n; ++i) p[i] /= z;

    BergmanJet jet;
    jet.t = t;
    jet.k = k;
    jet.rho = rho;
    jet.phi = (mx + std::log(z)) / k;

    Vec ea = Vec::Zero(m);
    double el = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const VecI& al = q0.lattice().points[i];
        for (int j = 0; j < m; ++j) ea[j] += p[i] * al[j];
        el += p[i] * lam2[i];
    }
    Mat cov = Mat::Zero(m, m);
    Vec covl = Vec::Zero(m);
    double varl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const VecI& al = q0.lattice().points[i];
        Vec d(m);
        for (int j = 0; j < m; ++j) d[j] = al[j] - ea[j];
        double dl = lam2[i] - el;
        cov += p[i] * d * d.transpose();
        covl += p[i] * dl * d;
        varl += p[i] * dl * dl;
    }
    jet.grad = ea / static_cast<double>(k);
    jet.hess = cov / static_cast<double>(k);
    jet.dt = el / static_cast<double>(k);
    jet.mixed = covl / static_cast<double>(k);
    jet.dt2 = varl / static_cast<double>(k);
    return jet;
}

double rk_log_ratio(const GeodesicPair& pair, const NormingTable& qt, const NormingTable& q0,
                    const NormingTable& q1, double t, const VecI& alpha) {
    std::size_t i = qt.index_of(alpha);
    std::size_t i0 = q0.index_of(alpha), i1 = q1.index_of(alpha);
    double log_r = qt.log_q(i) - (1.0 - t) * q0.log_q(i0) - t * q1.log_q(i1);

    // guard: the Cor. (RP) form P0^{1-t} P1^t / Pt must agree identically
    Vec a(alpha.size());
    for (int j = 0; j < alpha.size(); ++j)
        a[j] = static_cast<double>(alpha[j]) / static_cast<double>(qt.k());
    SymplecticPotential ut = pair.at_time(t);
    double k = static_cast<double>(qt.k());
    double lp_t = k * ut.value(a) - qt.log_q(i);
    double lp_0 = k * pair.endpoint0().value(a) - q0.log_q(i0);
    double lp_1 = k * pair.endpoint1().value(a) - q1.log_q(i1);
    double log_r_dual = (1.0 - t) * lp_0 + t * lp_1 - lp_t;
    if (std::abs(log_r - log_r_dual) > 1e-9 * (1.0 + std::abs(log_r)))
        fail(ErrorCode::MissingNormingTable, "R_k dual-form guard failed");
    return log_r;
}

double rinfty(const GeodesicPair& pair, double t, const Vec& x) {
    SymplecticPotential ut = pair.at_time(t);
    double lam_t = ut.hess_det_times_barrier(x);
    double lam_0 = pair.endpoint0().hess_det_times_barrier(x);
    double lam_1 = pair.endpoint1().hess_det_times_barrier(x);
    return std::sqrt(std::pow(lam_0, 1.0 - t) * std::pow(lam_1, t) / lam_t);
}

RegularityGap regularity_gap(const GeodesicPair& pair, const NormingTable& qt,
                             const NormingTable& q0, const NormingTable& q1, double t) {
    RegularityGap out;
    const std::int64_t k = qt.k();
    const double dk = std::pow(static_cast<double>(k), -2.0 / 3.0);
    const DelzantPolytope& P = pair.polytope();
    for (std::size_t i = 0; i < qt.size(); ++i) {
        const VecI& al = qt.lattice().points[i];
        Vec a(al.size());
        for (int j = 0; j < al.size(); ++j) a[j] = static_cast<double>(al[j]) / k;
        double rk = std::exp(rk_log_ratio(pair, qt, q0, q1, t, al));
        double gap = std::abs(rk - rinfty(pair, t, a));
        if (gap > out.sup_all) {
            out.sup_all = gap;
            out.argmax_all = al;
        }
        if (P.min_facet_value(a) >= dk)
            out.sup_interior = std::max(out.sup_interior, gap);
        else
            out.sup_boundary = std::max(out.sup_boundary, gap);
    }
    return out;
}

} // namespace toge
