#pragma once

// Exact geometry of lattice Delzant polytopes in dimension <= 3: facet
// presentation {x : <x, normal_i> + offset_i >= 0}, derived vertices,
// level-k lattice points, triangulations, and lattice boundary measure.
//
// Boundary convention: on a facet with primitive integer normal nu, the
// measure d_sigma gives a fundamental cell of the induced sublattice
// measure 1; this equals (Euclidean (n-1)-volume)/|nu|_2.

#include <string>
#include <vector>

#include "destab/rational.hpp"

namespace destab {

struct Facet {
    std::vector<long long> normal;  // primitive integer vector
    Rational offset;
};

// An n-simplex (n+1 vertices) or lower-dimensional simplex (fewer vertices).
using Simplex = std::vector<VecQ>;

struct DelzantPolytope {
    int dim = 0;
    std::vector<Facet> facets;
    std::vector<VecQ> vertices;                    // lex-sorted
    std::vector<std::vector<int>> facet_vertices;  // vertex indices per facet

    Rational facet_value(int f, const VecQ& x) const;  // <x,nu_f> + c_f
    bool contains(const VecQ& x) const;
};

struct DelzantCertificate {
    bool ok = false;
    std::vector<std::string> failures;  // one entry per offending vertex
};

struct LatticeLevel {
    int k = 0;
    std::vector<VecQ> points;  // lex-sorted, exact rationals in P cap (1/k)Z^n
    int count() const { return static_cast<int>(points.size()); }
    // index of a point, -1 if absent
    int find(const VecQ& p) const;
};

// Throws std::invalid_argument on non-primitive normals, unbounded, empty or
// lower-dimensional input.
DelzantPolytope make_polytope(int dim, const std::vector<std::vector<long long>>& normals,
                              const VecQ& offsets);

DelzantCertificate validate_delzant(const DelzantPolytope& P);

LatticeLevel lattice_points(const DelzantPolytope& P, int k);

// Fan triangulation of P from its lex-min vertex.
std::vector<Simplex> triangulate(const DelzantPolytope& P);

Rational volume(const DelzantPolytope& P);

// Lattice measure of an (n-1)-simplex lying in the hyperplane of facet f.
Rational face_lattice_measure(const DelzantPolytope& P, int f, const Simplex& face);

// Per-facet decomposition of the boundary into (n-1)-simplices.
std::vector<std::vector<Simplex>> boundary_faces(const DelzantPolytope& P);

Rational boundary_measure(const DelzantPolytope& P);

Rational simplex_volume(const Simplex& s);  // full-dimensional n-simplex

}  // namespace destab
