#include "toge/quantize.hpp"

#include "toge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace toge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string alpha_str(const VecI& alpha) {
    std::ostringstream os;
    for (int j = 0; j < alpha.size(); ++j) {
        if (j) os << ';';
        os << alpha[j];
    }
    return os.str();
}

// e^{-y} y^y / Gamma(y+1), the one-dimensional Bargmann-Fock law without its
// factor of k, extended real-analytically; B(0) = 1, B(y) ~ (2 pi y)^{-1/2}.
double log_bf_law(double y) {
    if (y < 0) fail(ErrorCode::SchemaError, "bf law needs y >= 0");
    if (y == 0.0) return 0.0;
    return -y + y * std::log(y) - std::lgamma(y + 1.0);
}

} // namespace

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = (1.0 - x) / 2.0;
        nodes[n - 1 - i] = (1.0 + x) / 2.0;
        double w = 1.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

namespace {

// one axis of the integration grid: uniform cells with geometric grading at
// both ends and extra splits of the cell containing the peak coordinate
std::vector<double> axis_breaks(double lo, double hi, double peak, int n, int levels,
                                int refine_factor) {
    std::set<double> b;
    double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) b.insert(lo + i * h);
    for (int j = 1; j <= levels; ++j) {
        b.insert(lo + h / std::pow(2.0, j));
        b.insert(hi - h / std::pow(2.0, j));
    }
    std::vector<double> breaks(b.begin(), b.end());
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        out.push_back(breaks[i]);
        if (breaks[i] <= peak && peak <= breaks[i + 1])
            for (int j = 1; j < refine_factor; ++j)
                out.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * j / refine_factor);
    }
    out.push_back(breaks.back());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// integration frame: unimodular vertex chart y = N (x - v*) making every
// facet with small k l_r(a) a coordinate hyperplane
struct Frame {
    Vec vstar;
    Mat Ninv; // columns map y back to x
    Vec y_peak;
    std::vector<double> lo, hi;
};

Frame choose_frame(const DelzantPolytope& P, const Vec& a, std::int64_t k) {
    const double tau = 50.0;
    Vec la = P.facet_values(a);
    int best = -1;
    double best_pen = 0, best_dist = 0;
    for (std::size_t i = 0; i < P.vertices().size(); ++i) {
        const std::vector<int>& inc = P.vertex_facets()[i];
        double pen = 0;
        for (int r = 0; r < P.facet_count(); ++r)
            if (std::find(inc.begin(), inc.end(), r) == inc.end())
                pen += std::max(0.0, tau - static_cast<double>(k) * la[r]);
        double dist = (a - P.vertices()[i]).norm();
        if (best < 0 || pen < best_pen - 1e-12 ||
            (pen < best_pen + 1e-12 && dist < best_dist - 1e-12)) {
            best = static_cast<int>(i);
            best_pen = pen;
            best_dist = dist;
        }
    }
    Frame f;
    f.vstar = P.vertices()[best];
    const std::vector<int>& inc = P.vertex_facets()[best];
    const int m = P.dim();
    Mat N(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) N(i, j) = P.facets()[inc[i]].normal[j];
    // |det N| = 1 (Delzant), so the inverse is an integer matrix
    Mat Ninv = N.inverse();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Ninv(i, j) = std::round(Ninv(i, j));
    f.Ninv = Ninv;
    f.y_peak = N * (a - f.vstar);
    f.lo.assign(m, std::numeric_limits<double>::infinity());
    f.hi.assign(m, -std::numeric_limits<double>::infinity());
    for (const Vec& v : P.vertices()) {
        Vec y = N * (v - f.vstar);
        for (int j = 0; j < m; ++j) {
            f.lo[j] = std::min(f.lo[j], y[j]);
            f.hi[j] = std::max(f.hi[j], y[j]);
        }
    }
    return f;
}

// Clip a convex polygon (counterclockwise or any orientation) against the
// half-plane c + <w, y> >= 0.
void clip_halfplane(std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& w, double c) {
    if (poly.empty()) return;
    std::vector<Eigen::Vector2d> out;
    out.reserve(poly.size() + 2);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Eigen::Vector2d& p = poly[i];
        const Eigen::Vector2d& q = poly[(i + 1) % poly.size()];
        double sp = c + w.dot(p), sq = c + w.dot(q);
        if (sp >= 0) out.push_back(p);
        if ((sp >= 0) != (sq >= 0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
    }
    poly = std::move(out);
}

// single tensor-product pass at a given base resolution; within the lattice
// frame the integrand exp(k g) equals prod_r l_r^{k l_r(a)} times an analytic
// factor (the exponents k l_r(a) are integers), so cells that conform to P
// keep Gauss-Legendre at full order.  Cells crossed by a facet are clipped
// exactly and integrated over a triangle fan with a Duffy map.
double integrate_pass(const PotentialBase& u, const Vec& a, std::int64_t k, const Frame& fr,
                      const QuadratureOptions& opts, int cells_per_axis, double kg_peak,
                      const std::vector<double>& gl_x, const std::vector<double>& gl_w) {
    const int m = static_cast<int>(fr.lo.size());
    const DelzantPolytope& P = u.polytope();
    const int d = P.facet_count();
    std::vector<std::vector<double>> breaks(m);
    for (int j = 0; j < m; ++j)
        breaks[j] = axis_breaks(fr.lo[j], fr.hi[j], fr.y_peak[j], cells_per_axis,
                                opts.grade_levels, opts.refine_factor);

    // facet forms in frame coordinates: l_r(x(y)) = fc[r] + <fw.row(r), y>
    Mat fw(d, m);
    Vec fc = P.facet_values(fr.vstar);
    for (int r = 0; r < d; ++r) {
        Vec vr(m);
        for (int j = 0; j < m; ++j) vr[j] = P.facets()[r].normal[j];
        fw.row(r) = vr.transpose() * fr.Ninv;
    }

    Vec y(m), x(m);
    auto kg_at = [&](const double* yv) {
        for (int j = 0; j < m; ++j) y[j] = yv[j];
        x = fr.vstar + fr.Ninv * y;
        return static_cast<double>(k) * u.laplace_exponent(x, a);
    };

    double total = 0.0, comp = 0.0; // Kahan accumulation, fixed cell order
    auto accumulate = [&](double w, double kg) {
        if (kg == kNegInf) return;
        double term = w * std::exp(std::max(kg - kg_peak, -745.0));
        double t = total + (term - comp);
        comp = (t - total) - (term - comp);
        total = t;
    };

    const int q = static_cast<int>(gl_x.size());
    std::vector<int> ci(m, 0);
    std::vector<double> sample(m);
    while (true) {
        bool contains_peak = true;
        for (int j = 0; j < m; ++j) {
            double c0 = breaks[j][ci[j]], c1 = breaks[j][ci[j] + 1];
            if (!(c0 <= fr.y_peak[j] && fr.y_peak[j] <= c1)) contains_peak = false;
        }

        // classify against each facet by the cell corners (exact: l is affine)
        bool outside = false, cut = false;
        {
            std::vector<int> pi(m, 0);
            for (int r = 0; r < d && !outside; ++r) {
                int pos = 0, corners = 1 << m;
                for (int cbit = 0; cbit < corners; ++cbit) {
                    double s = fc[r];
                    for (int j = 0; j < m; ++j)
                        s += fw(r, j) * breaks[j][ci[j] + ((cbit >> j) & 1)];
                    if (s >= 0) ++pos;
                }
                if (pos == 0) outside = true;
                else if (pos < corners) cut = true;
            }
            (void)pi;
        }

        if (!outside && !cut) {
            bool keep = contains_peak;
            if (!keep) {
                // 3^m probe lattice (corners, edge midpoints, center)
                double best = kNegInf;
                std::vector<int> pi(m, 0);
                while (true) {
                    for (int j = 0; j < m; ++j) {
                        double c0 = breaks[j][ci[j]], c1 = breaks[j][ci[j] + 1];
                        sample[j] = pi[j] == 0 ? c0 : (pi[j] == 1 ? 0.5 * (c0 + c1) : c1);
                    }
                    best = std::max(best, kg_at(sample.data()));
                    if (best - kg_peak >= -opts.prune_slack) break;
                    int j = m - 1;
                    while (j >= 0 && pi[j] == 2) {
                        pi[j] = 0;
                        --j;
                    }
                    if (j < 0) break;
                    ++pi[j];
                }
                keep = best - kg_peak >= -opts.prune_slack;
            }
            if (keep) {
                std::vector<int> gi(m, 0);
                while (true) {
                    double w = 1.0;
                    for (int j = 0; j < m; ++j) {
                        double c0 = breaks[j][ci[j]], c1 = breaks[j][ci[j] + 1];
                        sample[j] = c0 + (c1 - c0) * gl_x[gi[j]];
                        w *= (c1 - c0) * gl_w[gi[j]];
                    }
                    accumulate(w, kg_at(sample.data()));
                    int j = m - 1;
                    while (j >= 0 && gi[j] == q - 1) {
                        gi[j] = 0;
                        --j;
                    }
                    if (j < 0) break;
                    ++gi[j];
                }
            }
        } else if (!outside && cut) {
            if (m == 1) {
                // 1D: intersect the segment with every facet halfline
                double lo = breaks[0][ci[0]], hi = breaks[0][ci[0] + 1];
                for (int r = 0; r < d; ++r) {
                    if (fw(r, 0) > 0)
                        lo = std::max(lo, -fc[r] / fw(r, 0));
                    else if (fw(r, 0) < 0)
                        hi = std::min(hi, -fc[r] / fw(r, 0));
                    else if (fc[r] < 0)
                        hi = lo;
                }
                for (int g = 0; g < q; ++g) {
                    sample[0] = lo + (hi - lo) * gl_x[g];
                    if (hi > lo) accumulate((hi - lo) * gl_w[g], kg_at(sample.data()));
                }
            } else {
                // clip the rectangle to P, then a Duffy triangle fan
                std::vector<Eigen::Vector2d> poly = {
                    {breaks[0][ci[0]], breaks[1][ci[1]]},
                    {breaks[0][ci[0] + 1], breaks[1][ci[1]]},
                    {breaks[0][ci[0] + 1], breaks[1][ci[1] + 1]},
                    {breaks[0][ci[0]], breaks[1][ci[1] + 1]}};
                for (int r = 0; r < d && !poly.empty(); ++r)
                    clip_halfplane(poly, fw.row(r).transpose(), fc[r]);
                if (poly.size() >= 3) {
                    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
                    for (const auto& p : poly) centroid += p;
                    centroid /= static_cast<double>(poly.size());
                    for (std::size_t e = 0; e < poly.size(); ++e) {
                        const Eigen::Vector2d& p1 = poly[e];
                        const Eigen::Vector2d& p2 = poly[(e + 1) % poly.size()];
                        Eigen::Vector2d e1 = p1 - centroid, e2 = p2 - centroid;
                        double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
                        if (jac < 1e-300) continue;
                        for (int gu = 0; gu < q; ++gu) {
                            double uu = gl_x[gu];
                            for (int gv = 0; gv < q; ++gv) {
                                double vv = gl_x[gv];
                                Eigen::Vector2d pt =
                                    centroid + uu * ((1 - vv) * e1 + vv * e2);
                                sample[0] = pt.x();
                                sample[1] = pt.y();
                                accumulate(jac * uu * gl_w[gu] * gl_w[gv],
                                           kg_at(sample.data()));
                            }
                        }
                    }
                }
            }
        }

        int j = m - 1;
        while (j >= 0 && ci[j] + 2 == static_cast<int>(breaks[j].size())) {
            ci[j] = 0;
            --j;
        }
        if (j < 0) break;
        ++ci[j];
    }
    return kg_peak + std::log(total);
}

} // namespace

double norming_log(const PotentialBase& u, std::int64_t k, const VecI& alpha,
                   const QuadratureOptions& opts, double* err_estimate) {
    const DelzantPolytope& P = u.polytope();
    if (alpha.size() != P.dim()) fail(ErrorCode::DimensionMismatch, "norming_log: alpha dim");
    for (int r = 0; r < P.facet_count(); ++r)
        if (P.scaled_facet_value(alpha, k, r) < 0)
            fail(ErrorCode::OutsideLattice, "alpha not in kP: alpha=" + alpha_str(alpha));

    Vec a(P.dim());
    for (int j = 0; j < P.dim(); ++j) a[j] = static_cast<double>(alpha[j]) / k;
    Frame fr = choose_frame(P, a, k);
    double kg_peak = static_cast<double>(k) * u.value(a);

    std::vector<double> gl_x, gl_w;
    gauss_legendre_01(opts.gauss_order, gl_x, gl_w);

    double coarse = integrate_pass(u, a, k, fr, opts, opts.cells_per_axis, kg_peak, gl_x, gl_w);
    double fine = integrate_pass(u, a, k, fr, opts, 2 * opts.cells_per_axis, kg_peak, gl_x, gl_w);
    double err = std::abs(fine - coarse);
    if (err_estimate) *err_estimate = err;
    if (!(err <= opts.rtol))
        fail(ErrorCode::QuadratureNotConverged,
             "refinement disagreement " + std::to_string(err) + " at k=" + std::to_string(k) +
                 " alpha=" + alpha_str(alpha));
    return fine;
}

NormingTable::NormingTable(std::string potential_id, std::int64_t k, LatticeSet lattice,
                           std::vector<double> log_q_raw, std::vector<double> quad_err,
                           double normalization)
    : id_(std::move(potential_id)), k_(k), lattice_(std::move(lattice)),
      log_q_(std::move(log_q_raw)), err_(std::move(quad_err)), normalization_(normalization) {}

std::size_t NormingTable::index_of(const VecI& alpha) const {
    auto lex_less = [](const VecI& a, const VecI& b) {
        for (int j = 0; j < a.size(); ++j) {
            if (a[j] < b[j]) return true;
            if (a[j] > b[j]) return false;
        }
        return false;
    };
    auto it = std::lower_bound(lattice_.points.begin(), lattice_.points.end(), alpha, lex_less);
    if (it == lattice_.points.end() || *it != alpha)
        fail(ErrorCode::OutsideLattice, "alpha not tabulated: " + alpha_str(alpha));
    return static_cast<std::size_t>(it - lattice_.points.begin());
}

NormingTable build_norming_table(const PotentialBase& u, const std::string& potential_id,
                                 std::int64_t k, const QuadratureOptions& opts, int threads) {
    LatticeSet lat = u.polytope().lattice_points(k);
    std::vector<double> logq(lat.points.size()), err(lat.points.size());
    parallel_for(lat.points.size(), threads, [&](std::size_t i) {
        logq[i] = norming_log(u, k, lat.points[i], opts, &err[i]);
    });
    double norm = static_cast<double>(lat.points.size()) / u.polytope().euclidean_volume();
    return NormingTable(potential_id, k, std::move(lat), std::move(logq), std::move(err), norm);
}

PValue pkernel(const PotentialBase& u, const NormingTable& table, const VecI& alpha,
               const std::optional<Vec>& rho) {
    const DelzantPolytope& P = u.polytope();
    std::size_t i = table.index_of(alpha);
    Vec a(P.dim());
    for (int j = 0; j < P.dim(); ++j) a[j] = static_cast<double>(alpha[j]) / table.k();

    PValue out;
    out.alpha = alpha;
    for (int r = 0; r < P.facet_count(); ++r)
        if (P.scaled_facet_value(alpha, table.k(), r) == 0) out.boundary = true;
    // duality identity log Q + log P(alpha) = k u(alpha/k); exact at the
    // boundary where mu^{-1}(alpha/k) does not exist
    out.log_special = static_cast<double>(table.k()) * u.value(a) - table.log_q(i);
    if (rho) {
        LegendreResult lr = legendre(u, *rho);
        double dot = 0;
        for (int j = 0; j < P.dim(); ++j) dot += static_cast<double>(alpha[j]) * (*rho)[j];
        out.log_at_z = dot - static_cast<double>(table.k()) * lr.value - table.log_q(i);
    }
    return out;
}

SzegoDiagonal szego_diagonal(const PotentialBase& u, const NormingTable& table, const Vec& rho) {
    LegendreResult lr = legendre(u, rho);
    SzegoDiagonal out;
    out.kahler_potential = lr.value;
    const std::size_t n = table.size();
    out.weights.resize(n);
    double mx = kNegInf;
    for (std::size_t i = 0; i < n; ++i) {
        const VecI& al = table.lattice().points[i];
        double e = -static_cast<double>(table.k()) * lr.value - table.log_q(i);
        for (int j = 0; j < rho.size(); ++j) e += static_cast<double>(al[j]) * rho[j];
        out.weights[i] = e;
        mx = std::max(mx, e);
    }
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(out.weights[i] - mx);
    out.log_value = mx + std::log(s);
    out.value = std::exp(out.log_value);
    for (std::size_t i = 0; i < n; ++i)
        out.weights[i] = std::exp(out.weights[i] - mx) / s;
    return out;
}

LocalizationProfile localization_profile(const PotentialBase& u, const NormingTable& table,
                                         const Vec& rho, double delta) {
    LegendreResult lr = legendre(u, rho);
    const Vec mu = lr.maximizer;
    const std::int64_t k = table.k();
    LocalizationProfile out;
    out.radius = std::pow(static_cast<double>(k), -0.5 + delta);
    SzegoDiagonal sz = szego_diagonal(u, table, rho);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const VecI& al = table.lattice().points[i];
        Vec d(mu.size());
        for (int j = 0; j < mu.size(); ++j) d[j] = static_cast<double>(al[j]) / k - mu[j];
        if (d.norm() <= out.radius) {
            out.inside_mass += sz.weights[i];
        } else {
            ++out.outside_count;
            // un-normalized P(alpha, z) in the raw-Q convention
            double dot = 0;
            for (int j = 0; j < rho.size(); ++j) dot += static_cast<double>(al[j]) * rho[j];
            double log_p = dot - static_cast<double>(k) * lr.value - table.log_q(i);
            out.outside_max = std::max(out.outside_max, std::exp(log_p));
        }
    }
    return out;
}

AsymptoticModel asymptotic_model(const PotentialBase& u, std::int64_t k, const VecI& alpha,
                                 double delta_k) {
    const DelzantPolytope& P = u.polytope();
    const int m = P.dim();
    const int d = P.facet_count();
    if (delta_k <= 0) delta_k = std::pow(static_cast<double>(k), -2.0 / 3.0);
    Vec a(m);
    for (int j = 0; j < m; ++j) a[j] = static_cast<double>(alpha[j]) / k;
    Vec l = P.facet_values(a);
    double lambda = u.hess_det_times_barrier(a);
    const double logk = std::log(static_cast<double>(k));

    AsymptoticModel out;
    double log_pt = 0.0;
    double log_bprod = 0.0; // sum over all facets of log B(k l_j)
    for (int r = 0; r < d; ++r) {
        double y = static_cast<double>(k) * l[r];
        double lb = log_bf_law(y);
        log_bprod += lb;
        log_pt += lb + (y > 0 ? 0.5 * std::log(kTwoPi * y) : kNegInf);
        if (P.scaled_facet_value(alpha, k, r) == 0) out.boundary_flag = true;
        if (l[r] >= delta_k && l[r] < 2 * delta_k) out.boundary_flag = true;
    }
    out.log_ptwiddle = log_pt;

    double barrier = 1.0;
    for (int r = 0; r < d; ++r) barrier *= l[r];
    out.detg_factor = barrier > 0 ? std::sqrt(lambda / barrier)
                                  : std::numeric_limits<double>::infinity();

    // cancelled form: k^{m/2} sqrt(det G) ptwiddle = k^{m/2} (2 pi k)^{d/2} sqrt(Lambda) prod B
    out.log_model1 = 0.5 * m * logk + 0.5 * d * std::log(kTwoPi * k) + 0.5 * std::log(lambda) +
                     log_bprod;

    double far_prod = 1.0;
    double log_corner = 0.0;
    for (int r = 0; r < d; ++r) {
        if (l[r] < delta_k) {
            ++out.near_count;
            log_corner += logk + log_bf_law(static_cast<double>(k) * l[r]);
        } else {
            far_prod *= l[r];
        }
    }
    out.log_bf_corner = log_corner;
    out.log_gcal = std::log(lambda / far_prod);
    out.log_model2 = 0.5 * (m - out.near_count) * logk + 0.5 * out.log_gcal + log_corner;
    return out;
}

ModelFit fit_model_constant(const PotentialBase& u, const NormingTable& table, double delta_k) {
    const std::int64_t k = table.k();
    if (delta_k <= 0) delta_k = std::pow(static_cast<double>(k), -2.0 / 3.0);
    ModelFit out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const VecI& al = table.lattice().points[i];
        AsymptoticModel mod = asymptotic_model(u, k, al, delta_k);
        if (mod.near_count != 0) continue;
        PValue pv = pkernel(u, table, al);
        out.ratios.push_back(std::exp(pv.log_special - mod.log_model1));
    }
    out.interior_count = out.ratios.size();
    if (out.ratios.empty()) return out;
    std::vector<double> sorted = out.ratios;
    std::sort(sorted.begin(), sorted.end());
    out.c_median = sorted[sorted.size() / 2];
    out.spread = sorted.back() / sorted.front();
    return out;
}

} // namespace toge
