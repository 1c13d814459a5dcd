#include "toge/converge.hpp"

#include "toge/parallel.hpp"

#include <cmath>
#include <limits>

namespace toge {

EvalGrid build_grid(const GeodesicPair& pair, int n_t, int n_x, double margin) {
    if (n_t < 3 || n_x < 3) fail(ErrorCode::SchemaError, "grid needs n_t, n_x >= 3");
    if (!(margin > 0)) fail(ErrorCode::SchemaError, "grid margin must be positive");
    const DelzantPolytope& P = pair.polytope();
    const int m = P.dim();

    EvalGrid g;
    g.margin = margin;
    for (int i = 0; i < n_t; ++i)
        g.t_values.push_back(static_cast<double>(i) / (n_t - 1));

    Vec lo = P.vertices().front(), hi = lo;
    for (const Vec& v : P.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    std::vector<int> idx(m, 0);
    while (true) {
        Vec x(m);
        for (int j = 0; j < m; ++j)
            x[j] = lo[j] + (hi[j] - lo[j]) * idx[j] / (n_x - 1);
        Vec l = P.facet_values(x);
        if (l.minCoeff() >= margin) {
            g.x_values.push_back(x);
            g.near_boundary.push_back(l.minCoeff() < 0.1);
        }
        int j = m - 1;
        while (j >= 0 && idx[j] == n_x - 1) {
            idx[j] = 0;
            --j;
        }
        if (j < 0) break;
        ++idx[j];
    }
    if (g.x_values.empty()) fail(ErrorCode::EmptyGrid, "no interior grid points at this margin");
    return g;
}

namespace {

struct PointDiffs {
    std::array<double, 8> vals{};
    double raw_e0 = 0.0; // psi_k - phi_t before constant removal
};

PointDiffs point_diffs(const GeodesicPair& pair, const NormingTable& q0, const NormingTable& q1,
                       double t, const Vec& x, bool near_bd) {
    SymplecticPotential ut = pair.at_time(t);
    Vec rho = inverse_moment(ut, x);
    MAJet mj = ma_jet(pair, t, rho);
    BergmanJet bj = bergman_jet(pair, q0, q1, t, rho);

    PointDiffs out;
    out.raw_e0 = bj.phi - mj.phi;
    Vec dgrad = bj.grad - mj.grad;
    Mat dhess = bj.hess - mj.hess;
    Vec dmixed = bj.mixed - mj.mixed;
    out.vals[1] = dgrad.norm();
    out.vals[2] = std::abs(bj.dt - mj.dt);
    out.vals[3] = dhess.cwiseAbs().maxCoeff();
    out.vals[4] = dmixed.cwiseAbs().maxCoeff();
    out.vals[5] = std::abs(bj.dt2 - mj.dt2);
    if (near_bd) {
        // polar frame along the slice: r_j = e^{rho_j / 2}
        double e1r = 0.0, e2r = 0.0;
        for (int j = 0; j < rho.size(); ++j) {
            double rj = std::exp(rho[j] / 2.0);
            e1r = std::max(e1r, std::abs(2.0 / rj * dgrad[j]));
            e2r = std::max(e2r, std::abs(4.0 / (rj * rj) * (dhess(j, j) - 0.5 * dgrad[j])));
        }
        out.vals[6] = e1r;
        out.vals[7] = e2r;
    }
    return out;
}

} // namespace

ErrorRow error_fields(const GeodesicPair& pair, const NormingTable& q0, const NormingTable& q1,
                      const EvalGrid& grid, int threads) {
    ErrorRow row;
    row.k = q0.k();
    const std::size_t nx = grid.x_values.size();
    const std::size_t nt = grid.t_values.size();

    // additive constant: grid mean of psi_k - phi_t at t = 0
    std::vector<double> raw0(nx);
    parallel_for(nx, threads, [&](std::size_t i) {
        raw0[i] = point_diffs(pair, q0, q1, 0.0, grid.x_values[i], false).raw_e0;
    });
    double ck = 0.0;
    for (double v : raw0) ck += v;
    ck /= static_cast<double>(nx);
    row.c_k = ck;

    std::vector<PointDiffs> all(nx * nt);
    parallel_for(nx * nt, threads, [&](std::size_t idx) {
        std::size_t it = idx / nx, ix = idx % nx;
        all[idx] = point_diffs(pair, q0, q1, grid.t_values[it], grid.x_values[ix],
                               grid.near_boundary[ix]);
    });
    for (std::size_t it = 0; it < nt; ++it) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            PointDiffs& pd = all[it * nx + ix];
            pd.vals[0] = std::abs(pd.raw_e0 - ck);
            for (std::size_t f = 0; f < row.fields.size(); ++f) {
                if (pd.vals[f] > row.fields[f].value) {
                    row.fields[f].value = pd.vals[f];
                    row.fields[f].arg_t = grid.t_values[it];
                    row.fields[f].arg_x = grid.x_values[ix];
                }
            }
        }
    }
    for (auto& f : row.fields)
        if (f.arg_x.size() == 0) f.arg_x = Vec::Zero(pair.polytope().dim());
    return row;
}

RateFit fit_rate(const std::vector<std::int64_t>& k_list, const std::vector<double>& e_list,
                 RateModel model) {
    if (k_list.size() != e_list.size() || k_list.size() < 4)
        fail(ErrorCode::DegenerateFit, "need at least 4 (k, e) samples");
    RateFit out;
    bool all_zero = true;
    for (double e : e_list) {
        if (e < 0) fail(ErrorCode::DegenerateFit, "negative error value");
        if (e > 0) all_zero = false;
    }
    if (all_zero) {
        out.slope = -std::numeric_limits<double>::infinity();
        return out;
    }
    for (double e : e_list)
        if (e == 0.0) fail(ErrorCode::DegenerateFit, "zero error value in nonzero series");

    const std::size_t n = k_list.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(static_cast<double>(k_list[i]));
        ys[i] = std::log(e_list[i]);
        if (model == RateModel::PowerLog) ys[i] -= std::log(xs[i]); // remove log log k
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / n;
    for (std::size_t i = 0; i < n; ++i)
        out.residual = std::max(out.residual,
                                std::abs(ys[i] - (out.intercept + out.slope * xs[i])));
    return out;
}

} // namespace toge
