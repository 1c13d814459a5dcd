#include "toge/converge.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace toge;

namespace {

Vec vec1(double a) { return Vec::Constant(1, a); }

std::shared_ptr<const DelzantPolytope> interval_ptr() {
    return std::make_shared<const DelzantPolytope>(DelzantPolytope::interval());
}

std::vector<Monomial> interval_bump(double c) {
    Monomial m1, m2;
    m1.exponents = VecI::Constant(1, 1);
    m1.coef = c;
    m2.exponents = VecI::Constant(1, 2);
    m2.coef = -c;
    return {m1, m2};
}

GeodesicPair standard_pair() {
    auto P = interval_ptr();
    return GeodesicPair(SymplecticPotential(P, {}),
                        SymplecticPotential(P, interval_bump(0.5)));
}

} // namespace

TEST_CASE("build_grid examples") {
    GeodesicPair pair = standard_pair();
    EvalGrid g = build_grid(pair, 3, 9, 0.05);
    CHECK(g.x_values.size() == 9); // tensor grid over [0,1] lands 9 points in [0.05, 0.95]
    for (const Vec& x : g.x_values) {
        CHECK(x[0] >= 0.05);
        CHECK(x[0] <= 0.95);
    }
    EvalGrid band = build_grid(pair, 3, 33, 0.4);
    for (const Vec& x : band.x_values) {
        CHECK(x[0] >= 0.4);
        CHECK(x[0] <= 0.6);
    }
    CHECK_THROWS_AS(build_grid(pair, 3, 5, 0.9), Error); // empty

    auto S = std::make_shared<const DelzantPolytope>(DelzantPolytope::simplex(2));
    GeodesicPair sp(SymplecticPotential(S, {}), SymplecticPotential(S, {}));
    EvalGrid gs = build_grid(sp, 3, 9, 0.05);
    for (const Vec& x : gs.x_values) CHECK(S->min_facet_value(x) >= 0.05);
}

TEST_CASE("fit_rate synthetic data") {
    std::vector<std::int64_t> ks = {16, 32, 64, 128, 256};
    SUBCASE("pure power c/k") {
        std::vector<double> es;
        for (auto k : ks) es.push_back(3.7 / k);
        RateFit f = fit_rate(ks, es, RateModel::PurePower);
        CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(f.residual < 1e-12);
    }
    SUBCASE("c log k / k: power-log residual vanishes, pure power lands in (-1, -0.8)") {
        std::vector<double> es;
        for (auto k : ks) es.push_back(0.4 * std::log(static_cast<double>(k)) / k);
        RateFit pl = fit_rate(ks, es, RateModel::PowerLog);
        CHECK(pl.slope == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(pl.residual < 1e-12);
        RateFit pp = fit_rate(ks, es, RateModel::PurePower);
        CHECK(pp.slope > -1.0);
        CHECK(pp.slope < -0.8);
    }
    SUBCASE("c k^{-1/3}") {
        std::vector<double> es;
        for (auto k : ks) es.push_back(2.0 * std::pow(static_cast<double>(k), -1.0 / 3.0));
        RateFit f = fit_rate(ks, es, RateModel::PurePower);
        CHECK(f.slope == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("degenerate all-zero series returns the -inf sentinel") {
        std::vector<double> es(5, 0.0);
        RateFit f = fit_rate(ks, es, RateModel::PurePower);
        CHECK(std::isinf(f.slope));
        CHECK(f.slope < 0);
    }
    SUBCASE("too few samples") {
        CHECK_THROWS_AS(fit_rate({16, 32}, {1.0, 0.5}, RateModel::PurePower), Error);
    }
}

TEST_CASE("r-frame conversion identities on a closed form") {
    // F(rho) = log(1 + e^rho) = log(1 + r^2) with r = e^{rho/2}
    auto F = [](double rho) { return std::log1p(std::exp(rho)); };
    auto dF = [](double rho) { return std::exp(rho) / (1 + std::exp(rho)); };
    auto d2F = [](double rho) {
        double e = std::exp(rho);
        return e / ((1 + e) * (1 + e));
    };
    for (double rho : {-1.5, -0.2, 0.8}) {
        double r = std::exp(rho / 2);
        // direct r-derivatives of log(1 + r^2)
        double dr_direct = 2 * r / (1 + r * r);
        double d2r_direct = 2 / (1 + r * r) - 4 * r * r / ((1 + r * r) * (1 + r * r));
        double dr_conv = 2.0 / r * dF(rho);
        double d2r_conv = 4.0 / (r * r) * (d2F(rho) - 0.5 * dF(rho));
        CHECK(dr_conv == doctest::Approx(dr_direct).epsilon(1e-12));
        CHECK(d2r_conv == doctest::Approx(d2r_direct).epsilon(1e-12));
        (void)F;
    }
}

TEST_CASE("error fields: trivial and affine structure") {
    auto P = interval_ptr();
    SUBCASE("u1 = u0: time-derivative errors vanish, space errors t-independent") {
        SymplecticPotential u(P, interval_bump(0.5));
        GeodesicPair same(u, u);
        std::int64_t k = 16;
        NormingTable q = build_norming_table(u, "u", k, {}, 2);
        EvalGrid grid = build_grid(same, 5, 17, 0.05);
        ErrorRow row = error_fields(same, q, q, grid, 2);
        CHECK(row.fields[2].value == doctest::Approx(0.0).epsilon(1e-14)); // e1_time
        CHECK(row.fields[5].value == doctest::Approx(0.0).epsilon(1e-14)); // e2_time
        // space errors are the static Bergman remainder: nonzero but small
        CHECK(row.fields[3].value > 0);
        CHECK(row.fields[3].value < 0.1);
    }
    SUBCASE("TYZ remainder rate for the trivial pair: e2 slope <= -1") {
        SymplecticPotential u(P, interval_bump(0.5));
        GeodesicPair same(u, u);
        std::vector<std::int64_t> ks = {16, 32, 64, 128, 256};
        std::vector<double> e2;
        for (auto k : ks) {
            NormingTable q = build_norming_table(u, "u", k, {}, 2);
            EvalGrid grid = build_grid(same, 3, 17, 0.1);
            ErrorRow row = error_fields(same, q, q, grid, 2);
            e2.push_back(row.fields[3].value);
        }
        RateFit f = fit_rate(ks, e2, RateModel::PurePower);
        CHECK(f.slope <= -1.0);
    }
    SUBCASE("affine pair: fields at t equal translated t=0 fields") {
        const double c = 0.5, b = 0.2;
        Monomial m1, m0;
        m1.exponents = VecI::Constant(1, 1);
        m1.coef = c;
        m0.exponents = VecI::Constant(1, 0);
        m0.coef = b;
        GeodesicPair pair(SymplecticPotential(P, {}), SymplecticPotential(P, {m1, m0}));
        std::int64_t k = 16;
        NormingTable q0 = build_norming_table(pair.endpoint0(), "u0", k, {}, 2);
        NormingTable q1 = build_norming_table(pair.endpoint1(), "u1", k, {}, 2);
        // at matching (t, x) the difference psi_k - phi_t is a pure translation
        for (double t : {0.0, 0.5, 1.0})
            for (double x : {0.3, 0.6}) {
                SymplecticPotential ut = pair.at_time(t);
                Vec rho = inverse_moment(ut, vec1(x));
                double d = bergman_jet(pair, q0, q1, t, rho).phi - ma_jet(pair, t, rho).phi;
                Vec rho0 = inverse_moment(pair.endpoint0(), vec1(x));
                double d0 =
                    bergman_jet(pair, q0, q1, 0.0, rho0).phi - ma_jet(pair, 0.0, rho0).phi;
                CHECK(d == doctest::Approx(d0).epsilon(1e-9));
            }
    }
}

TEST_CASE("error fields invariant under adding a constant to u0") {
    auto P = interval_ptr();
    GeodesicPair pair = standard_pair();
    Monomial shift;
    shift.exponents = VecI::Constant(1, 0);
    shift.coef = 0.7;
    GeodesicPair shifted(SymplecticPotential(P, {shift}),
                         SymplecticPotential(P, interval_bump(0.5)));
    std::int64_t k = 16;
    EvalGrid grid = build_grid(pair, 5, 17, 0.05);
    NormingTable a0 = build_norming_table(pair.endpoint0(), "u0", k, {}, 2);
    NormingTable a1 = build_norming_table(pair.endpoint1(), "u1", k, {}, 2);
    NormingTable b0 = build_norming_table(shifted.endpoint0(), "u0", k, {}, 2);
    NormingTable b1 = build_norming_table(shifted.endpoint1(), "u1", k, {}, 2);
    ErrorRow ra = error_fields(pair, a0, a1, grid, 2);
    ErrorRow rb = error_fields(shifted, b0, b1, grid, 2);
    for (std::size_t f = 0; f < kErrorFieldNames.size(); ++f)
        CHECK(ra.fields[f].value == doctest::Approx(rb.fields[f].value).epsilon(1e-7));
}

TEST_CASE("facet relabeling leaves error fields unchanged") {
    // same interval with facets declared in the opposite order
    std::vector<Facet> rev(2);
    rev[0].normal = VecI::Constant(1, -1);
    rev[0].offset = -1;
    rev[1].normal = VecI::Constant(1, 1);
    rev[1].offset = 0;
    auto Prev = std::make_shared<const DelzantPolytope>(DelzantPolytope(1, rev));
    GeodesicPair a = standard_pair();
    GeodesicPair b(SymplecticPotential(Prev, {}), SymplecticPotential(Prev, interval_bump(0.5)));
    std::int64_t k = 16;
    EvalGrid grid = build_grid(a, 5, 9, 0.05);
    ErrorRow ra = error_fields(a, build_norming_table(a.endpoint0(), "u0", k, {}, 2),
                               build_norming_table(a.endpoint1(), "u1", k, {}, 2), grid, 2);
    ErrorRow rb = error_fields(b, build_norming_table(b.endpoint0(), "u0", k, {}, 2),
                               build_norming_table(b.endpoint1(), "u1", k, {}, 2), grid, 2);
    for (std::size_t f = 0; f < 6; ++f)
        CHECK(ra.fields[f].value == doctest::Approx(rb.fields[f].value).epsilon(1e-8));
}
