#include "destab/hermspace.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace destab {

namespace {

using CLD = std::complex<long double>;
using MatLD = std::vector<std::vector<CLD>>;

void check_square(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("matrix must be square");
}

// Cholesky-reduced Hermitian pencil (H1, H0): eigenvalues mu with
// H1 v = e^mu H0 v, plus H0-orthonormal eigenvectors.
struct PencilEigen {
    Eigen::VectorXd log_eigs;  // ascending
    Eigen::MatrixXcd vectors;  // columns, V^H G0 V = I
};

PencilEigen pencil_eigen(const Eigen::MatrixXcd& g0, const Eigen::MatrixXcd& g1) {
    Eigen::LLT<Eigen::MatrixXcd> llt(g0);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("norm is not positive definite");
    Eigen::MatrixXcd l = llt.matrixL();
    Eigen::MatrixXcd w = l.triangularView<Eigen::Lower>().solve(g1);
    w = l.triangularView<Eigen::Lower>().solve(w.adjoint()).adjoint();  // L^{-1} G1 L^{-H}
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w);
    if (es.info() != Eigen::Success) throw std::runtime_error("pencil eigensolver failed");
    PencilEigen out;
    out.log_eigs.resize(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double ev = es.eigenvalues()[i];
        if (ev <= 0) throw std::invalid_argument("norm is not positive definite");
        out.log_eigs[i] = std::log(ev);
    }
    out.vectors = l.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    return out;
}

// One-sided Jacobi singular values of a long double complex matrix whose
// entries may span hundreds of orders of magnitude.
std::vector<long double> jacobi_singular_values(MatLD a) {
    const std::size_t n = a.size();
    auto col_dot = [&](std::size_t p, std::size_t q) {
        CLD s = 0;
        for (std::size_t r = 0; r < n; ++r) s += std::conj(a[r][p]) * a[r][q];
        return s;
    };
    for (int sweep = 0; sweep < 60; ++sweep) {
        long double off = 0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                CLD apq = col_dot(p, q);
                long double app = std::real(col_dot(p, p));
                long double aqq = std::real(col_dot(q, q));
                long double mag = std::abs(apq);
                if (mag == 0.0L || app == 0.0L || aqq == 0.0L) continue;
                off = std::max(off, mag / std::sqrt(app * aqq));
                if (mag <= 1e-24L * std::sqrt(app * aqq)) continue;
                // complex Jacobi rotation zeroing the (p,q) Gram entry
                CLD phase = apq / mag;
                long double tau = (aqq - app) / (2.0L * mag);
                long double t = (tau >= 0 ? 1.0L : -1.0L) /
                                (std::abs(tau) + std::sqrt(1.0L + tau * tau));
                long double c = 1.0L / std::sqrt(1.0L + t * t);
                long double s = c * t;
                for (std::size_t r = 0; r < n; ++r) {
                    CLD xp = a[r][p], xq = a[r][q];
                    a[r][p] = c * xp - s * std::conj(phase) * xq;
                    a[r][q] = s * phase * xp + c * xq;
                }
            }
        }
        if (off <= 1e-24L) break;
    }
    std::vector<long double> sv(n);
    for (std::size_t p = 0; p < n; ++p) sv[p] = std::sqrt(std::real(col_dot(p, p)));
    return sv;
}

}  // namespace

HermNorm make_herm(const Eigen::MatrixXcd& gram, double herm_tol) {
    check_square(gram);
    double scale = std::max(1.0, gram.norm());
    if ((gram - gram.adjoint()).norm() > herm_tol * scale)
        throw std::invalid_argument("gram matrix is not Hermitian");
    HermNorm h{(gram + gram.adjoint()) / 2.0};
    Eigen::LLT<Eigen::MatrixXcd> llt(h.gram);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("gram matrix is not positive definite");
    return h;
}

Eigen::VectorXd pencil_log_eigenvalues(const HermNorm& h0, const HermNorm& h1) {
    if (h0.dim() != h1.dim()) throw std::invalid_argument("norm dimension mismatch");
    auto pe = pencil_eigen(h0.gram, h1.gram);
    Eigen::VectorXd mu = pe.log_eigs;
    std::sort(mu.data(), mu.data() + mu.size(), std::greater<double>());
    return mu;
}

HermGeodesicRay connecting_geodesic(const HermNorm& h0, const HermNorm& h1) {
    if (h0.dim() != h1.dim()) throw std::invalid_argument("norm dimension mismatch");
    auto pe = pencil_eigen(h0.gram, h1.gram);
    // A = V diag(mu) V^{-1}, V^{-1} = V^H G0
    Eigen::MatrixXcd vinv = pe.vectors.adjoint() * h0.gram;
    HermGeodesicRay ray;
    ray.start = h0;
    ray.generator = pe.vectors * pe.log_eigs.asDiagonal() * vinv;
    ray.orientation = +1;
    return ray;
}

HermNorm ray_value(const HermGeodesicRay& ray, double t) {
    const Eigen::MatrixXcd& g0 = ray.start.gram;
    Eigen::MatrixXcd b = g0 * ray.generator;  // Hermitian when A is H0-self-adjoint
    auto pe = pencil_eigen(g0, g0 + Eigen::MatrixXcd::Identity(g0.rows(), g0.cols()));
    (void)pe;  // structure reused below via direct eigensolve of the pair (B, G0)
    // solve B v = mu G0 v
    Eigen::LLT<Eigen::MatrixXcd> llt(g0);
    Eigen::MatrixXcd l = llt.matrixL();
    Eigen::MatrixXcd w = l.triangularView<Eigen::Lower>().solve(b);
    w = l.triangularView<Eigen::Lower>().solve(w.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((w + w.adjoint()) / 2.0);
    Eigen::MatrixXcd v = l.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    Eigen::VectorXd mu = es.eigenvalues();
    Eigen::VectorXcd expd(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i)
        expd[i] = std::exp(ray.orientation * t * mu[i]);
    // G_t = G0 V diag V^H G0
    Eigen::MatrixXcd gt = g0 * v * expd.asDiagonal() * v.adjoint() * g0;
    return make_herm((gt + gt.adjoint()) / 2.0, 1e-9);
}

double dp_distance(const HermNorm& h0, const HermNorm& h1, double p) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    Eigen::VectorXd mu = pencil_log_eigenvalues(h0, h1);
    if (std::isinf(p)) return mu.size() ? std::max(std::abs(mu[0]), std::abs(mu[mu.size() - 1])) : 0.0;
    double acc = 0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) acc += std::pow(std::abs(mu[i]), p);
    return std::pow(acc / mu.size(), 1.0 / p);
}

double relative_volume(const HermNorm& h1, const HermNorm& h0) {
    if (h0.dim() != h1.dim()) throw std::invalid_argument("norm dimension mismatch");
    Eigen::VectorXd mu = pencil_log_eigenvalues(h0, h1);
    return -mu.sum() / h0.dim();
}

NaLimit na_limit(const HermGeodesicRay& ray, double selfadj_tol) {
    const Eigen::MatrixXcd& g0 = ray.start.gram;
    Eigen::MatrixXcd b = g0 * ray.generator;
    double scale = std::max(1.0, b.norm());
    if ((b - b.adjoint()).norm() > selfadj_tol * scale)
        throw std::invalid_argument("ray generator is not self-adjoint for the start norm");
    // effective convention H_t = H0(e^{-t A_eff} ., .)
    double sgn = ray.orientation == -1 ? 1.0 : -1.0;
    Eigen::LLT<Eigen::MatrixXcd> llt(g0);
    Eigen::MatrixXcd l = llt.matrixL();
    Eigen::MatrixXcd w = l.triangularView<Eigen::Lower>().solve(b);
    w = l.triangularView<Eigen::Lower>().solve(w.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((w + w.adjoint()) / 2.0);
    Eigen::MatrixXcd v = l.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());

    static std::atomic<unsigned long> counter{0};
    NaLimit out;
    out.basis = v;
    out.norm.dim = static_cast<int>(g0.rows());
    out.norm.basis_id = "herm-eig-" + std::to_string(counter.fetch_add(1));
    out.norm.weights.resize(g0.rows());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        out.norm.weights[i] = sgn * es.eigenvalues()[i];
    return out;
}

double asymptotic_slope(const HermGeodesicRay& ray1, const HermGeodesicRay& ray2, double T) {
    const int n = ray1.start.dim();
    if (n != ray2.start.dim()) throw std::invalid_argument("ray dimension mismatch");
    if (T <= 0) throw std::invalid_argument("T must be positive");

    // whiten against ray1's start: Lambda_T^i = U_i exp(T s_i M_i) U_i^H with
    // U_1 unitary; for ray2 the conjugating factor is merely invertible.
    Eigen::LLT<Eigen::MatrixXcd> llt(ray1.start.gram);
    Eigen::MatrixXcd l1 = llt.matrixL();

    auto eigen_of = [&](const HermGeodesicRay& r) {
        Eigen::MatrixXcd b = r.start.gram * r.generator;
        Eigen::LLT<Eigen::MatrixXcd> lr(r.start.gram);
        Eigen::MatrixXcd lm = lr.matrixL();
        Eigen::MatrixXcd w = lm.triangularView<Eigen::Lower>().solve(b);
        w = lm.triangularView<Eigen::Lower>().solve(w.adjoint()).adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((w + w.adjoint()) / 2.0);
        Eigen::MatrixXcd v = lm.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());
        return std::make_pair(es.eigenvalues(), v);
    };
    auto [m1, v1] = eigen_of(ray1);
    auto [m2, v2] = eigen_of(ray2);

    // Lambda^i_T = (L1^{-1} G0_i V_i) exp(T s_i M_i) (.)^H; singular values of
    // K = exp(-T s1 M1 / 2) Z exp(T s2 M2 / 2), Z = (L1^H V1)^H (L1^{-1} G0_2 V2)
    Eigen::MatrixXcd x1 = l1.adjoint() * v1;  // unitary
    Eigen::MatrixXcd x2 = l1.triangularView<Eigen::Lower>().solve(ray2.start.gram * v2);
    Eigen::MatrixXcd z = x1.adjoint() * x2;

    MatLD k(n, std::vector<CLD>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            long double e = -0.5L * T * ray1.orientation * static_cast<long double>(m1[i]) +
                            0.5L * T * ray2.orientation * static_cast<long double>(m2[j]);
            long double mag = std::exp(e);
            k[i][j] = CLD(static_cast<long double>(z(i, j).real()) * mag,
                          static_cast<long double>(z(i, j).imag()) * mag);
        }
    }
    auto sv = jacobi_singular_values(std::move(k));
    long double acc = 0;
    for (long double s : sv) {
        long double mu = 2.0L * std::log(s);
        acc += mu * mu;
    }
    double d_T = static_cast<double>(std::sqrt(acc / n));
    double d_0 = dp_distance(ray1.start, ray2.start, 2.0);
    return (d_T - d_0) / T;
}

}  // namespace destab
