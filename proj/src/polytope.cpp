#include "toge/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace toge {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotDelzant: return "NotDelzant";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::EmptyInterior: return "EmptyInterior";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::OutsidePolytope: return "OutsidePolytope";
        case ErrorCode::TooCloseToBoundary: return "TooCloseToBoundary";
        case ErrorCode::NonConvexAt: return "NonConvexAt";
        case ErrorCode::NewtonDivergence: return "NewtonDivergence";
        case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorCode::OutsideLattice: return "OutsideLattice";
        case ErrorCode::BoundaryLatticePoint: return "BoundaryLatticePoint";
        case ErrorCode::MissingNormingTable: return "MissingNormingTable";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::DegenerateFit: return "DegenerateFit";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Error";
}

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// exact determinant of an m x m int64 matrix, m <= 3
std::int64_t int_det(const std::vector<std::vector<std::int64_t>>& M) {
    const std::size_t m = M.size();
    if (m == 1) return M[0][0];
    if (m == 2) return M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (m == 3)
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
               M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    fail(ErrorCode::DimensionMismatch, "determinant only supported for m <= 3");
}

} // namespace

DelzantPolytope::DelzantPolytope(int dim, std::vector<Facet> facets)
    : dim_(dim), facets_(std::move(facets)) {
    if (dim_ < 1 || dim_ > 3) fail(ErrorCode::DimensionMismatch, "dim must be 1, 2 or 3");
    if (facets_.size() < static_cast<std::size_t>(dim_ + 1))
        fail(ErrorCode::Unbounded, "fewer than m+1 facets");
    for (std::size_t r = 0; r < facets_.size(); ++r) {
        const Facet& f = facets_[r];
        if (f.normal.size() != dim_)
            fail(ErrorCode::DimensionMismatch, "facet normal has wrong dimension");
        std::int64_t g = 0;
        for (int j = 0; j < dim_; ++j) g = gcd64(g, f.normal[j]);
        if (g != 1)
            fail(ErrorCode::NotDelzant,
                 "facet " + std::to_string(r) + " normal is not primitive");
    }
    enumerate_vertices();
    validate();
    compute_volume();
    compute_analytic_center();
}

DelzantPolytope DelzantPolytope::interval() {
    std::vector<Facet> f(2);
    f[0].normal = VecI::Constant(1, 1);
    f[0].offset = 0;
    f[1].normal = VecI::Constant(1, -1);
    f[1].offset = -1;
    return DelzantPolytope(1, std::move(f));
}

DelzantPolytope DelzantPolytope::simplex(int m) {
    std::vector<Facet> f;
    for (int j = 0; j < m; ++j) {
        Facet fj;
        fj.normal = VecI::Zero(m);
        fj.normal[j] = 1;
        fj.offset = 0;
        f.push_back(fj);
    }
    Facet last;
    last.normal = VecI::Constant(m, -1);
    last.offset = -1;
    f.push_back(last);
    return DelzantPolytope(m, std::move(f));
}

DelzantPolytope DelzantPolytope::cube(int m) {
    std::vector<Facet> f;
    for (int j = 0; j < m; ++j) {
        Facet lo, hi;
        lo.normal = VecI::Zero(m);
        lo.normal[j] = 1;
        lo.offset = 0;
        hi.normal = VecI::Zero(m);
        hi.normal[j] = -1;
        hi.offset = -1;
        f.push_back(lo);
        f.push_back(hi);
    }
    return DelzantPolytope(m, std::move(f));
}

DelzantPolytope DelzantPolytope::hirzebruch(int a) {
    if (a < 0) fail(ErrorCode::SchemaError, "hirzebruch parameter must be >= 0");
    std::vector<Facet> f(4);
    f[0].normal = VecI(2);
    f[0].normal << 1, 0;
    f[0].offset = 0;
    f[1].normal = VecI(2);
    f[1].normal << 0, 1;
    f[1].offset = 0;
    f[2].normal = VecI(2);
    f[2].normal << 0, -1;
    f[2].offset = -1;
    f[3].normal = VecI(2);
    f[3].normal << -1, -a;
    f[3].offset = -(1 + a);
    return DelzantPolytope(2, std::move(f));
}

Vec DelzantPolytope::facet_values(const Vec& x) const {
    if (x.size() != dim_) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
    Vec out(facet_count());
    for (int r = 0; r < facet_count(); ++r) {
        double s = -static_cast<double>(facets_[r].offset);
        for (int j = 0; j < dim_; ++j) s += x[j] * facets_[r].normal[j];
        out[r] = s;
    }
    return out;
}

double DelzantPolytope::min_facet_value(const Vec& x) const {
    return facet_values(x).minCoeff();
}

bool DelzantPolytope::contains(const Vec& x, double tol) const {
    return min_facet_value(x) >= -tol;
}

std::int64_t DelzantPolytope::scaled_facet_value(const VecI& alpha, std::int64_t k,
                                                 int r) const {
    std::int64_t s = -k * facets_[r].offset;
    for (int j = 0; j < dim_; ++j)
        s += static_cast<std::int64_t>(alpha[j]) * facets_[r].normal[j];
    return s;
}

std::int64_t DelzantPolytope::normal_determinant(const std::vector<int>& rows) const {
    std::vector<std::vector<std::int64_t>> M(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        M[i].resize(dim_);
        for (int j = 0; j < dim_; ++j) M[i][j] = facets_[rows[i]].normal[j];
    }
    return std::llabs(int_det(M));
}

void DelzantPolytope::enumerate_vertices() {
    const int d = facet_count();
    std::vector<int> subset(dim_);
    std::vector<Vec> verts;
    std::vector<std::vector<int>> incidences;

    // iterate over all m-subsets of facets
    std::vector<int> idx(dim_);
    std::iota(idx.begin(), idx.end(), 0);
    auto advance = [&]() -> bool {
        int i = dim_ - 1;
        while (i >= 0 && idx[i] == d - dim_ + i) --i;
        if (i < 0) return false;
        ++idx[i];
        for (int j = i + 1; j < dim_; ++j) idx[j] = idx[j - 1] + 1;
        return true;
    };

    do {
        Mat A(dim_, dim_);
        Vec b(dim_);
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j < dim_; ++j) A(i, j) = facets_[idx[i]].normal[j];
            b[i] = static_cast<double>(facets_[idx[i]].offset);
        }
        Eigen::FullPivLU<Mat> lu(A);
        if (!lu.isInvertible()) continue;
        Vec x = lu.solve(b);
        if (!contains(x, 1e-9)) continue;
        bool dup = false;
        for (const Vec& v : verts)
            if ((v - x).lpNorm<Eigen::Infinity>() < 1e-7) {
                dup = true;
                break;
            }
        if (dup) continue;
        verts.push_back(x);
    } while (advance());

    if (verts.empty()) fail(ErrorCode::Unbounded, "no vertices (infeasible or unbounded)");

    // active facet sets, recomputed per vertex so degenerate intersections are caught
    for (const Vec& v : verts) {
        Vec lv = facet_values(v);
        std::vector<int> act;
        for (int r = 0; r < d; ++r)
            if (std::abs(lv[r]) < 1e-9) act.push_back(r);
        incidences.push_back(act);
    }

    // deterministic order: lexicographic by coordinates
    std::vector<std::size_t> order(verts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (int j = 0; j < dim_; ++j) {
            if (verts[a][j] < verts[b][j] - 1e-12) return true;
            if (verts[a][j] > verts[b][j] + 1e-12) return false;
        }
        return false;
    });
    for (std::size_t i : order) {
        vertices_.push_back(verts[i]);
        vertex_facets_.push_back(incidences[i]);
    }
}

void DelzantPolytope::validate() {
    // boundedness: the recession cone {y : <y, v_r> >= 0 for all r} must be {0}.
    // If the normals do not span, the cone contains a line; otherwise the cone
    // is pointed and any nonzero ray includes an extreme ray active on m-1
    // independent constraints, so checking the finite candidate set below is
    // exhaustive for m <= 3.
    {
        Mat N(facet_count(), dim_);
        for (int r = 0; r < facet_count(); ++r)
            for (int j = 0; j < dim_; ++j) N(r, j) = facets_[r].normal[j];
        Eigen::FullPivLU<Mat> lu(N);
        if (lu.rank() < dim_) fail(ErrorCode::Unbounded, "facet normals do not span");

        std::vector<std::vector<std::int64_t>> candidates;
        if (dim_ == 1) {
            candidates = {{1}, {-1}};
        } else if (dim_ == 2) {
            for (const Facet& f : facets_) {
                candidates.push_back({f.normal[1], -f.normal[0]});
                candidates.push_back({-f.normal[1], f.normal[0]});
            }
        } else {
            for (int r = 0; r < facet_count(); ++r)
                for (int s = r + 1; s < facet_count(); ++s) {
                    const VecI& u = facets_[r].normal;
                    const VecI& v = facets_[s].normal;
                    std::vector<std::int64_t> c = {
                        static_cast<std::int64_t>(u[1]) * v[2] - static_cast<std::int64_t>(u[2]) * v[1],
                        static_cast<std::int64_t>(u[2]) * v[0] - static_cast<std::int64_t>(u[0]) * v[2],
                        static_cast<std::int64_t>(u[0]) * v[1] - static_cast<std::int64_t>(u[1]) * v[0]};
                    candidates.push_back(c);
                    candidates.push_back({-c[0], -c[1], -c[2]});
                }
        }
        for (const auto& c : candidates) {
            bool zero = true, feasible = true;
            for (std::size_t j = 0; j < c.size(); ++j)
                if (c[j] != 0) zero = false;
            if (zero) continue;
            for (const Facet& f : facets_) {
                std::int64_t s = 0;
                for (int j = 0; j < dim_; ++j) s += f.normal[j] * c[j];
                if (s < 0) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) fail(ErrorCode::Unbounded, "recession cone is nontrivial");
        }
    }

    // full-dimensionality: the vertex centroid is interior iff int(P) != {}
    {
        Vec c = Vec::Zero(dim_);
        for (const Vec& v : vertices_) c += v;
        c /= static_cast<double>(vertices_.size());
        if (min_facet_value(c) <= 1e-12) fail(ErrorCode::EmptyInterior, "interior is empty");
    }

    // Delzant condition at every vertex; vertices must be lattice points
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const std::vector<int>& act = vertex_facets_[i];
        if (static_cast<int>(act.size()) != dim_)
            fail(ErrorCode::NotDelzant, "vertex " + std::to_string(i) + " meets " +
                                            std::to_string(act.size()) + " facets, expected " +
                                            std::to_string(dim_));
        if (normal_determinant(act) != 1)
            fail(ErrorCode::NotDelzant,
                 "normals at vertex " + std::to_string(i) + " are not a lattice basis");
        for (int j = 0; j < dim_; ++j) {
            double r = std::round(vertices_[i][j]);
            if (std::abs(vertices_[i][j] - r) > 1e-7)
                fail(ErrorCode::NotDelzant,
                     "vertex " + std::to_string(i) + " is not a lattice point");
            vertices_[i][j] = r; // snap
        }
    }
}

void DelzantPolytope::compute_volume() {
    if (dim_ == 1) {
        double lo = vertices_.front()[0], hi = vertices_.back()[0];
        volume_ = hi - lo;
        return;
    }
    Vec c = Vec::Zero(dim_);
    for (const Vec& v : vertices_) c += v;
    c /= static_cast<double>(vertices_.size());

    if (dim_ == 2) {
        // shoelace over angularly ordered vertices
        std::vector<Vec> vs = vertices_;
        std::sort(vs.begin(), vs.end(), [&](const Vec& a, const Vec& b) {
            return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
        });
        double s = 0;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const Vec& a = vs[i];
            const Vec& b = vs[(i + 1) % vs.size()];
            s += a[0] * b[1] - b[0] * a[1];
        }
        volume_ = std::abs(s) / 2.0;
        return;
    }

    // m == 3: cone each facet polygon over the centroid
    double vol = 0;
    for (int r = 0; r < facet_count(); ++r) {
        std::vector<Vec> fv;
        for (const Vec& v : vertices_)
            if (std::abs(facet_values(v)[r]) < 1e-9) fv.push_back(v);
        if (fv.size() < 3) continue;
        Eigen::Vector3d n3(facets_[r].normal[0], facets_[r].normal[1], facets_[r].normal[2]);
        double nn = n3.norm();
        Eigen::Vector3d b1 = n3.unitOrthogonal();
        Eigen::Vector3d b2 = n3.normalized().cross(b1);
        Vec fc = Vec::Zero(3);
        for (const Vec& v : fv) fc += v;
        fc /= static_cast<double>(fv.size());
        std::sort(fv.begin(), fv.end(), [&](const Vec& a, const Vec& b) {
            Eigen::Vector3d da(a[0] - fc[0], a[1] - fc[1], a[2] - fc[2]);
            Eigen::Vector3d db(b[0] - fc[0], b[1] - fc[1], b[2] - fc[2]);
            return std::atan2(da.dot(b2), da.dot(b1)) < std::atan2(db.dot(b2), db.dot(b1));
        });
        double area2 = 0;
        for (std::size_t i = 0; i < fv.size(); ++i) {
            const Vec& a = fv[i];
            const Vec& b = fv[(i + 1) % fv.size()];
            Eigen::Vector3d da(a[0] - fc[0], a[1] - fc[1], a[2] - fc[2]);
            Eigen::Vector3d db(b[0] - fc[0], b[1] - fc[1], b[2] - fc[2]);
            area2 += da.dot(b1) * db.dot(b2) - db.dot(b1) * da.dot(b2);
        }
        double area = std::abs(area2) / 2.0;
        double height = facet_values(c)[r] / nn; // distance centroid -> facet plane
        vol += area * height / 3.0;
    }
    volume_ = vol;
}

void DelzantPolytope::compute_analytic_center() {
    // Newton on the log barrier, seeded at the vertex centroid
    Vec x = Vec::Zero(dim_);
    for (const Vec& v : vertices_) x += v;
    x /= static_cast<double>(vertices_.size());
    for (int it = 0; it < 100; ++it) {
        Vec l = facet_values(x);
        Vec g = Vec::Zero(dim_);
        Mat H = Mat::Zero(dim_, dim_);
        for (int r = 0; r < facet_count(); ++r) {
            Vec vr(dim_);
            for (int j = 0; j < dim_; ++j) vr[j] = facets_[r].normal[j];
            g -= vr / l[r];
            H += vr * vr.transpose() / (l[r] * l[r]);
        }
        Vec dx = H.ldlt().solve(-g);
        // keep every l_r above half its current value
        double step = 1.0;
        for (int r = 0; r < facet_count(); ++r) {
            double dl = 0;
            for (int j = 0; j < dim_; ++j) dl += dx[j] * facets_[r].normal[j];
            if (dl < 0) step = std::min(step, -0.5 * l[r] / dl);
        }
        x += step * dx;
        if (g.norm() < 1e-12) break;
    }
    analytic_center_ = x;
}

LatticeSet DelzantPolytope::lattice_points(std::int64_t k, std::size_t cap) const {
    if (k < 1) fail(ErrorCode::SchemaError, "dilation k must be >= 1");
    LatticeSet out;
    out.k = k;
    std::vector<std::int64_t> lo(dim_), hi(dim_);
    for (int j = 0; j < dim_; ++j) {
        double l = vertices_.front()[j], h = l;
        for (const Vec& v : vertices_) {
            l = std::min(l, v[j]);
            h = std::max(h, v[j]);
        }
        lo[j] = static_cast<std::int64_t>(std::llround(l)) * k;
        hi[j] = static_cast<std::int64_t>(std::llround(h)) * k;
    }
    VecI alpha(dim_);
    std::vector<std::int64_t> cur(lo);
    while (true) {
        for (int j = 0; j < dim_; ++j) alpha[j] = static_cast<int>(cur[j]);
        bool inside = true;
        for (int r = 0; r < facet_count() && inside; ++r)
            if (scaled_facet_value(alpha, k, r) < 0) inside = false;
        if (inside) {
            if (out.points.size() >= cap)
                fail(ErrorCode::Overflow, "lattice point count exceeds cap");
            out.points.push_back(alpha);
        }
        int j = dim_ - 1;
        while (j >= 0 && cur[j] == hi[j]) {
            cur[j] = lo[j];
            --j;
        }
        if (j < 0) break;
        ++cur[j];
    }
    return out; // odometer order == lexicographic
}

FacetProximity DelzantPolytope::near_facets(const Vec& x, double delta) const {
    Vec l = facet_values(x);
    if (l.minCoeff() < 0) fail(ErrorCode::OutsidePolytope, "near_facets: x not in P");
    FacetProximity out;
    out.distances = l;
    for (int r = 0; r < facet_count(); ++r)
        if (l[r] < delta) out.near_set.push_back(r);
    out.near_count = static_cast<int>(out.near_set.size());
    return out;
}

} // namespace toge
