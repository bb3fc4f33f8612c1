#pragma once

// Least concave majorant of values on a finite point set, together with the
// regular subdivision it induces (projected upper-hull facets of the lifted
// points). Ties between candidate facets are broken by an infinitesimal
// lexicographic perturbation of the lift values, indexed by point order; the
// perturbation changes only the subdivision, never the envelope values.

#include <vector>

#include "destab/plfunction.hpp"

namespace destab {

struct Envelope {
    PLFunction fn;               // simplicial cells covering conv(points)
    VecQ env_values;             // envelope value at each input point
    std::vector<char> active;    // env_values[i] == values[i]
    VecQ masses;                 // per point: sum over incident cells of vol/(n+1)
    Rational total_volume = 0;   // sum of cell volumes
};

// Points must be distinct; dimension 1 or 2.
Envelope concave_envelope(const std::vector<VecQ>& points, const VecQ& values);

}  // namespace destab
