#pragma once

// The symmetric space of Hermitian norms on C^N: connecting geodesics via the
// positive-definite pencil, Finsler d_p distances, relative volumes, and the
// limit NA norm of a geodesic ray. Large-time ray separation is evaluated in
// log-domain long double arithmetic so slopes at t ~ 1e3 stay finite.

#include <Eigen/Dense>

#include "destab/naspace.hpp"

namespace destab {

struct HermNorm {
    Eigen::MatrixXcd gram;  // Hermitian positive definite
    int dim() const { return static_cast<int>(gram.rows()); }
};

// Ray value: H_t(x, y) = H_0(exp(orientation * t * A) x, y) with A
// self-adjoint for H_0. orientation +1 is the connecting-geodesic
// convention; the limit NA norm uses -1.
struct HermGeodesicRay {
    HermNorm start;
    Eigen::MatrixXcd generator;
    int orientation = +1;
};

struct NaLimit {
    NaNorm norm;
    Eigen::MatrixXcd basis;  // H_0-orthonormal eigenbasis, columns
};

HermNorm make_herm(const Eigen::MatrixXcd& gram, double herm_tol = 1e-12);

// log-eigenvalues of the pencil (H1, H0), descending
Eigen::VectorXd pencil_log_eigenvalues(const HermNorm& h0, const HermNorm& h1);

HermGeodesicRay connecting_geodesic(const HermNorm& h0, const HermNorm& h1);

HermNorm ray_value(const HermGeodesicRay& ray, double t);

double dp_distance(const HermNorm& h0, const HermNorm& h1, double p);

double relative_volume(const HermNorm& h1, const HermNorm& h0);

NaLimit na_limit(const HermGeodesicRay& ray, double selfadj_tol = 1e-9);

// (d_2(H_T, G_T) - d_2(H_0, G_0)) / T, stable for large T
double asymptotic_slope(const HermGeodesicRay& ray1, const HermGeodesicRay& ray2, double T);

}  // namespace destab
