#pragma once

// Non-Archimedean norms on a finite-dimensional complex vector space with the
// trivially-valued ground field, in diagonal form: a reference basis plus one
// real weight per basis vector. A general filtration enters as a FlagNorm and
// is diagonalized before use.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace destab {

struct NaNorm {
    int dim = 0;
    std::string basis_id = "std";
    std::vector<double> weights;
};

NaNorm trivial_norm(int dim, const std::string& basis_id = "std");

// Strictly nested subspace chain with strictly decreasing jump values. If the
// last subspace is proper, the chain is completed by the full space with
// jump 0 (all listed jumps must then be positive).
struct FlagNorm {
    int dim = 0;
    std::vector<Eigen::MatrixXcd> flag;  // columns span each subspace, ranks increasing
    std::vector<double> jumps;
};

struct CommonDiagonalization {
    Eigen::MatrixXcd basis;  // columns diagonalize both norms
    std::string basis_id;
    NaNorm first;
    NaNorm second;
};

// value of the norm on a coefficient vector over the diagonalizing basis:
// min weight over the support
double evaluate(const NaNorm& chi, const Eigen::VectorXcd& coeffs, double support_tol = 1e-11);

std::vector<double> jumping_numbers(const NaNorm& chi);

CommonDiagonalization common_diagonalization(const FlagNorm& a, const FlagNorm& b);

// sorted (descending) componentwise weight differences; requires a shared basis
std::vector<double> relative_spectra(const NaNorm& chi, const NaNorm& chi2);

double dp_distance(const NaNorm& chi, const NaNorm& chi2, double p);
double p_norm(const NaNorm& chi, double p);

double volume(const NaNorm& chi);
double volume(const NaNorm& chi, const NaNorm& chi2);

NaNorm geodesic(const NaNorm& chi0, const NaNorm& chi1, double s);

NaNorm cap(const NaNorm& chi, double c);
NaNorm affine_transform(const NaNorm& chi, double a, double b);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace destab
