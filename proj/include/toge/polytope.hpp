#ifndef TOGE_POLYTOPE_HPP
#define TOGE_POLYTOPE_HPP

#include "toge/types.hpp"

#include <cstdint>
#include <vector>

namespace toge {

/// One linear inequality l_r(x) = <x, normal> - offset >= 0.  Normals are
/// primitive integer vectors, offsets integers (lattice polytopes only), so
/// lattice membership of points alpha/k reduces to exact int64 arithmetic.
struct Facet {
    VecI normal;
    std::int64_t offset;
};

/// Lattice points of the k-th dilate, alpha in kP, lexicographically sorted.
struct LatticeSet {
    std::int64_t k = 0;
    std::vector<VecI> points;
    std::size_t count() const { return points.size(); }
};

/// Facets within delta of x, per Def. of delta-close facets.
struct FacetProximity {
    std::vector<int> near_set; // facet indices r with l_r(x) < delta
    int near_count = 0;
    Vec distances; // all l_r(x)
};

/// A Delzant polytope given by facet data.  Validation enumerates vertices by
/// intersecting m-subsets of facet hyperplanes and checks, at every vertex,
/// that exactly m facets meet and that their normals form a Z^m basis
/// (determinant +-1).  Facet order is the declaration order and is part of
/// the public contract: facet indices appear in reports.
class DelzantPolytope {
  public:
    DelzantPolytope(int dim, std::vector<Facet> facets);

    static DelzantPolytope interval();          // [0,1]
    static DelzantPolytope simplex(int m);      // standard unit simplex
    static DelzantPolytope cube(int m);         // [0,1]^m
    static DelzantPolytope hirzebruch(int a);   // x>=0, y>=0, 1-y>=0, (1+a)-x-a*y>=0

    int dim() const { return dim_; }
    int facet_count() const { return static_cast<int>(facets_.size()); }
    const std::vector<Facet>& facets() const { return facets_; }
    const std::vector<Vec>& vertices() const { return vertices_; }
    /// Facet indices active at vertex i (exactly m of them).
    const std::vector<std::vector<int>>& vertex_facets() const { return vertex_facets_; }
    double euclidean_volume() const { return volume_; }

    /// (l_1(x), ..., l_d(x)); membership test is min >= 0.
    Vec facet_values(const Vec& x) const;
    double min_facet_value(const Vec& x) const;
    bool contains(const Vec& x, double tol = 0.0) const;

    /// Exact k * l_r(alpha/k) = <alpha, v_r> - k * lambda_r.
    std::int64_t scaled_facet_value(const VecI& alpha, std::int64_t k, int r) const;

    LatticeSet lattice_points(std::int64_t k, std::size_t cap = 10'000'000) const;

    FacetProximity near_facets(const Vec& x, double delta) const;

    /// Minimizer of the log barrier -sum_r log l_r; strictly interior, used
    /// to seed Newton solves.
    const Vec& analytic_center() const { return analytic_center_; }

    /// abs(det) of the normals of facets `rows` (m of them), exact in int64.
    std::int64_t normal_determinant(const std::vector<int>& rows) const;

  private:
    void enumerate_vertices();
    void validate();
    void compute_volume();
    void compute_analytic_center();

    int dim_;
    std::vector<Facet> facets_;
    std::vector<Vec> vertices_;
    std::vector<std::vector<int>> vertex_facets_;
    double volume_ = 0.0;
    Vec analytic_center_;
};

} // namespace toge

#endif
