#include "toge/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace toge {

namespace {

double pow_int(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

} // namespace

SymplecticPotential::SymplecticPotential(std::shared_ptr<const DelzantPolytope> polytope,
                                         std::vector<Monomial> smooth_part)
    : polytope_(std::move(polytope)), smooth_(std::move(smooth_part)) {
    for (const Monomial& m : smooth_) {
        if (m.exponents.size() != polytope_->dim())
            fail(ErrorCode::DimensionMismatch, "monomial exponent vector has wrong dimension");
        if (m.exponents.minCoeff() < 0)
            fail(ErrorCode::SchemaError, "monomial exponents must be nonnegative");
        if (!std::isfinite(m.coef)) fail(ErrorCode::SchemaError, "monomial coefficient not finite");
    }
}

double SymplecticPotential::smooth_value(const Vec& x) const {
    double s = 0.0;
    for (const Monomial& m : smooth_) {
        double t = m.coef;
        for (int j = 0; j < x.size(); ++j) t *= pow_int(x[j], m.exponents[j]);
        s += t;
    }
    return s;
}

Vec SymplecticPotential::smooth_gradient(const Vec& x) const {
    Vec g = Vec::Zero(x.size());
    for (const Monomial& m : smooth_) {
        for (int j = 0; j < x.size(); ++j) {
            int e = m.exponents[j];
            if (e == 0) continue;
            double t = m.coef * e * pow_int(x[j], e - 1);
            for (int l = 0; l < x.size(); ++l)
                if (l != j) t *= pow_int(x[l], m.exponents[l]);
            g[j] += t;
        }
    }
    return g;
}

Mat SymplecticPotential::smooth_hessian(const Vec& x) const {
    const int n = static_cast<int>(x.size());
    Mat H = Mat::Zero(n, n);
    for (const Monomial& m : smooth_) {
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                int ei = m.exponents[i], ej = m.exponents[j];
                double t;
                if (i == j) {
                    if (ei < 2) continue;
                    t = m.coef * ei * (ei - 1) * pow_int(x[i], ei - 2);
                    for (int l = 0; l < n; ++l)
                        if (l != i) t *= pow_int(x[l], m.exponents[l]);
                } else {
                    if (ei == 0 || ej == 0) continue;
                    t = m.coef * ei * ej * pow_int(x[i], ei - 1) * pow_int(x[j], ej - 1);
                    for (int l = 0; l < n; ++l)
                        if (l != i && l != j) t *= pow_int(x[l], m.exponents[l]);
                }
                H(i, j) += t;
                if (i != j) H(j, i) += t;
            }
        }
    }
    return H;
}

double SymplecticPotential::value(const Vec& x) const {
    Vec l = polytope_->facet_values(x);
    double s = 0.0;
    for (int r = 0; r < l.size(); ++r) {
        // points like alpha/k on a diagonal facet can land O(eps) outside
        if (l[r] < -1e-12) fail(ErrorCode::OutsidePolytope, "value: x outside P");
        if (l[r] > 0) s += l[r] * std::log(l[r]);
    }
    return s + smooth_value(x);
}

Vec SymplecticPotential::gradient(const Vec& x, double eps_bd) const {
    Vec l = polytope_->facet_values(x);
    if (l.minCoeff() < eps_bd)
        fail(ErrorCode::TooCloseToBoundary, "gradient: some l_r below eps_bd");
    Vec g = smooth_gradient(x);
    for (int r = 0; r < l.size(); ++r) {
        double c = 1.0 + std::log(l[r]);
        for (int j = 0; j < x.size(); ++j) g[j] += c * polytope_->facets()[r].normal[j];
    }
    return g;
}

HessianPair SymplecticPotential::hessian(const Vec& x, double eps_bd) const {
    Vec l = polytope_->facet_values(x);
    if (l.minCoeff() < eps_bd)
        fail(ErrorCode::TooCloseToBoundary, "hessian: some l_r below eps_bd");
    const int n = polytope_->dim();
    Mat G = smooth_hessian(x);
    for (int r = 0; r < l.size(); ++r) {
        Vec vr(n);
        for (int j = 0; j < n; ++j) vr[j] = polytope_->facets()[r].normal[j];
        G += vr * vr.transpose() / l[r];
    }
    HessianPair out;
    out.G = G;
    Eigen::LDLT<Mat> ldlt(G);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        fail(ErrorCode::NonConvexAt, "hessian not positive definite");
    out.H = ldlt.solve(Mat::Identity(n, n));
    out.det_G = G.determinant();
    double barrier = 1.0;
    for (int r = 0; r < l.size(); ++r) barrier *= l[r];
    out.delta_factor = 1.0 / (out.det_G * barrier);
    return out;
}

// det(hess u) * prod_r l_r expanded multilinearly over the rank-one facet
// terms: every l-denominator cancels against the barrier product, which is
// what makes the result evaluable on the boundary.
double SymplecticPotential::hess_det_times_barrier(const Vec& x) const {
    const DelzantPolytope& P = *polytope_;
    const int d = P.facet_count();
    Vec l = P.facet_values(x);
    if (l.minCoeff() < -1e-12) fail(ErrorCode::OutsidePolytope, "x outside P");
    Mat A = smooth_hessian(x);

    auto prod_excluding = [&](int skip1, int skip2) {
        double p = 1.0;
        for (int r = 0; r < d; ++r)
            if (r != skip1 && r != skip2) p *= l[r];
        return p;
    };

    if (polytope_->dim() == 1) {
        double s = A(0, 0) * prod_excluding(-1, -1);
        for (int r = 0; r < d; ++r) {
            double v = P.facets()[r].normal[0];
            s += v * v * prod_excluding(r, -1);
        }
        return s;
    }
    if (polytope_->dim() == 2) {
        double s = A.determinant() * prod_excluding(-1, -1);
        Mat adjA(2, 2);
        adjA << A(1, 1), -A(0, 1), -A(1, 0), A(0, 0);
        for (int r = 0; r < d; ++r) {
            Vec vr(2);
            vr << P.facets()[r].normal[0], P.facets()[r].normal[1];
            s += vr.dot(adjA * vr) * prod_excluding(r, -1);
            for (int q = r + 1; q < d; ++q) {
                double det2 = static_cast<double>(P.facets()[r].normal[0]) * P.facets()[q].normal[1] -
                              static_cast<double>(P.facets()[r].normal[1]) * P.facets()[q].normal[0];
                s += det2 * det2 * prod_excluding(r, q);
            }
        }
        return s;
    }
    // m == 3 polytopes carry no quantization in this library; interior only.
    HessianPair hp = hessian(x);
    double barrier = 1.0;
    for (int r = 0; r < d; ++r) barrier *= l[r];
    return hp.det_G * barrier;
}

double SymplecticPotential::laplace_exponent(const Vec& x, const Vec& a) const {
    Vec l = polytope_->facet_values(x);
    Vec la = polytope_->facet_values(a);
    double g = 0.0;
    for (int r = 0; r < l.size(); ++r) {
        if (l[r] < 0) return -std::numeric_limits<double>::infinity();
        if (l[r] == 0.0) {
            if (la[r] > 0) return -std::numeric_limits<double>::infinity();
            continue; // l_r(a) = 0 too: both terms vanish in the limit
        }
        double lg = std::log(l[r]);
        g += l[r] * lg + (la[r] - l[r]) * (1.0 + lg);
    }
    return g + smooth_value(x) + (a - x).dot(smooth_gradient(x));
}

TruncatedBargmannFock::TruncatedBargmannFock(int m, std::int64_t side) : side_(static_cast<double>(side)) {
    if (side < 1) fail(ErrorCode::SchemaError, "side must be >= 1");
    std::vector<Facet> f;
    for (int j = 0; j < m; ++j) {
        Facet lo, hi;
        lo.normal = VecI::Zero(m);
        lo.normal[j] = 1;
        lo.offset = 0;
        hi.normal = VecI::Zero(m);
        hi.normal[j] = -1;
        hi.offset = -side;
        f.push_back(lo);
        f.push_back(hi);
    }
    polytope_ = std::make_shared<const DelzantPolytope>(m, std::move(f));
}

double TruncatedBargmannFock::value(const Vec& x) const {
    double s = 0.0;
    for (int j = 0; j < x.size(); ++j) {
        if (x[j] < 0 || x[j] > side_) fail(ErrorCode::OutsidePolytope, "value: x outside box");
        if (x[j] > 0) s += x[j] * std::log(x[j]);
        s -= x[j];
    }
    return s;
}

Vec TruncatedBargmannFock::gradient(const Vec& x, double eps_bd) const {
    Vec g(x.size());
    for (int j = 0; j < x.size(); ++j) {
        if (x[j] < eps_bd || x[j] > side_ - eps_bd)
            fail(ErrorCode::TooCloseToBoundary, "gradient: x at box boundary");
        g[j] = std::log(x[j]);
    }
    return g;
}

HessianPair TruncatedBargmannFock::hessian(const Vec& x, double eps_bd) const {
    const int n = static_cast<int>(x.size());
    HessianPair out;
    out.G = Mat::Zero(n, n);
    out.H = Mat::Zero(n, n);
    double det = 1.0, barrier = 1.0;
    for (int j = 0; j < n; ++j) {
        if (x[j] < eps_bd || x[j] > side_ - eps_bd)
            fail(ErrorCode::TooCloseToBoundary, "hessian: x at box boundary");
        out.G(j, j) = 1.0 / x[j];
        out.H(j, j) = x[j];
        det /= x[j];
        barrier *= x[j] * (side_ - x[j]);
    }
    out.det_G = det;
    out.delta_factor = 1.0 / (det * barrier);
    return out;
}

double TruncatedBargmannFock::hess_det_times_barrier(const Vec& x) const {
    double s = 1.0;
    for (int j = 0; j < x.size(); ++j) s *= (side_ - x[j]);
    return s;
}

double TruncatedBargmannFock::laplace_exponent(const Vec& x, const Vec& a) const {
    // g = sum_j a_j log x_j - x_j
    double g = 0.0;
    for (int j = 0; j < x.size(); ++j) {
        if (x[j] < 0 || x[j] > side_) return -std::numeric_limits<double>::infinity();
        if (x[j] == 0.0) {
            if (a[j] > 0) return -std::numeric_limits<double>::infinity();
            continue;
        }
        g += a[j] * std::log(x[j]) - x[j];
    }
    return g;
}

LegendreResult legendre(const PotentialBase& u, const Vec& rho, int max_iter) {
    const DelzantPolytope& P = u.polytope();
    if (rho.size() != P.dim()) fail(ErrorCode::DimensionMismatch, "legendre: rho dimension");
    for (int j = 0; j < rho.size(); ++j)
        if (!std::isfinite(rho[j])) fail(ErrorCode::SchemaError, "legendre: rho not finite");

    const double tol = 1e-12 * (1.0 + rho.norm());
    Vec x = P.analytic_center();
    Vec g = u.gradient(x) - rho;
    double res = g.norm();
    int it = 0;
    for (; it < max_iter && res > tol; ++it) {
        HessianPair hp = u.hessian(x);
        Vec dx = hp.H * (-g);
        // fraction-to-boundary: no l_r may lose more than half its value
        double step = 1.0;
        Vec l = P.facet_values(x);
        for (int r = 0; r < P.facet_count(); ++r) {
            double dl = 0;
            for (int j = 0; j < P.dim(); ++j) dl += dx[j] * P.facets()[r].normal[j];
            if (dl < 0) step = std::min(step, -0.5 * l[r] / dl);
        }
        // backtrack on the residual norm
        double res_new = res;
        Vec x_new = x, g_new = g;
        for (int bt = 0; bt < 40; ++bt) {
            x_new = x + step * dx;
            g_new = u.gradient(x_new) - rho;
            res_new = g_new.norm();
            if (res_new < res || res_new <= tol) break;
            step *= 0.5;
        }
        if (!(res_new < res) && res_new > tol)
            fail(ErrorCode::NewtonDivergence, "legendre: no residual decrease");
        x = x_new;
        g = g_new;
        res = res_new;
    }
    if (res > tol) fail(ErrorCode::NewtonDivergence, "legendre: max iterations reached");
    LegendreResult out;
    out.maximizer = x;
    out.value = x.dot(rho) - u.value(x);
    out.iterations = it;
    out.residual = res;
    return out;
}

Vec moment_map(const PotentialBase& u, const Vec& rho) { return legendre(u, rho).maximizer; }

Vec inverse_moment(const PotentialBase& u, const Vec& x, double eps_bd) {
    return u.gradient(x, eps_bd);
}

double convexity_check(const PotentialBase& u, int grid_resolution) {
    const DelzantPolytope& P = u.polytope();
    const int m = P.dim();
    const double margin = 1.0 / (4.0 * grid_resolution);
    // tensor grid over the vertex bounding box
    Vec lo = P.vertices().front(), hi = lo;
    for (const Vec& v : P.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    double min_eig = std::numeric_limits<double>::infinity();
    std::vector<int> idx(m, 0);
    while (true) {
        Vec x(m);
        for (int j = 0; j < m; ++j)
            x[j] = lo[j] + (hi[j] - lo[j]) * (idx[j] + 0.5) / grid_resolution;
        if (P.min_facet_value(x) >= margin) {
            bool ok = true;
            Mat G;
            try {
                // bypass the PD check in hessian(): convexity is what we measure
                Vec l = P.facet_values(x);
                G = Mat::Zero(m, m);
                if (const auto* sp = dynamic_cast<const SymplecticPotential*>(&u)) {
                    G = sp->smooth_hessian(x);
                    for (int r = 0; r < P.facet_count(); ++r) {
                        Vec vr(m);
                        for (int j = 0; j < m; ++j) vr[j] = P.facets()[r].normal[j];
                        G += vr * vr.transpose() / l[r];
                    }
                } else {
                    G = u.hessian(x).G;
                }
            } catch (const Error&) {
                ok = false;
            }
            if (ok) {
                Eigen::SelfAdjointEigenSolver<Mat> es(G);
                min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
            }
        }
        int j = m - 1;
        while (j >= 0 && idx[j] == grid_resolution - 1) {
            idx[j] = 0;
            --j;
        }
        if (j < 0) break;
        ++idx[j];
    }
    return min_eig;
}

std::vector<Monomial> combine_monomials(const std::vector<Monomial>& a, double ca,
                                        const std::vector<Monomial>& b, double cb) {
    std::map<std::vector<int>, double> acc;
    auto add = [&](const std::vector<Monomial>& v, double c) {
        for (const Monomial& m : v) {
            std::vector<int> key(m.exponents.data(), m.exponents.data() + m.exponents.size());
            acc[key] += c * m.coef;
        }
    };
    add(a, ca);
    add(b, cb);
    std::vector<Monomial> out;
    for (const auto& [key, coef] : acc) {
        if (coef == 0.0) continue;
        Monomial m;
        m.exponents = Eigen::Map<const VecI>(key.data(), static_cast<int>(key.size()));
        m.coef = coef;
        out.push_back(m);
    }
    return out;
}

} // namespace toge
