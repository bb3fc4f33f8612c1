#pragma once

// Piecewise-linear functions on a polytope: a simplicial subdivision with
// vertex values. All integration is exact rational; degree-2 integrands use
// the closed-form simplex quadrature.

#include <optional>
#include <vector>

#include "destab/polytope.hpp"

namespace destab {

struct PLFunction {
    int dim = 0;
    std::vector<Simplex> cells;   // n+1 vertices each, disjoint interiors
    std::vector<VecQ> values;     // per cell: value at each vertex
    bool concave = false;

    std::size_t cell_count() const { return cells.size(); }
};

struct AffinePiece {
    VecQ gradient;
    Rational constant;
    Rational at(const VecQ& x) const {
        Rational s = constant;
        for (std::size_t i = 0; i < x.size(); ++i) s += gradient[i] * x[i];
        return s;
    }
};

PLFunction make_constant(const DelzantPolytope& P, const Rational& c);
PLFunction make_affine(const DelzantPolytope& P, const VecQ& gradient, const Rational& constant);

AffinePiece affine_piece(const PLFunction& f, std::size_t cell);

// Exact barycentric point location; throws if x lies outside every cell.
Rational evaluate(const PLFunction& f, const VecQ& x);
std::optional<Rational> try_evaluate(const PLFunction& f, const VecQ& x);

// Shared vertices must carry equal values.
bool is_continuous(const PLFunction& f);

// Throws if the subdivision does not cover P exactly (volume mismatch).
Rational integrate(const DelzantPolytope& P, const PLFunction& f);
Rational integrate_squared(const DelzantPolytope& P, const PLFunction& f);
Rational mean(const DelzantPolytope& P, const PLFunction& f);

Rational integrate_boundary(const DelzantPolytope& P, const PLFunction& f);
Rational boundary_mean(const DelzantPolytope& P, const PLFunction& f);

// Exact integral of (f - g)^2 over P by overlaying the two subdivisions
// (dims 1 and 2).
Rational integrate_squared_difference(const DelzantPolytope& P, const PLFunction& f,
                                      const PLFunction& g);

// Max of |f - g| over the overlay vertices (exact at subdivision vertices and
// pairwise cell intersections, which is where a PL difference peaks).
Rational sup_difference(const DelzantPolytope& P, const PLFunction& f, const PLFunction& g);

// Midpoint concavity spot-check on sample pairs (exact arithmetic).
bool midpoint_concave_on_samples(const PLFunction& f, const std::vector<std::pair<VecQ, VecQ>>& pairs);

}  // namespace destab
