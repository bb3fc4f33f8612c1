#include "destab/naspace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace destab {

namespace {

std::string fresh_basis_id() {
    static std::atomic<unsigned long> counter{0};
    return "diag-" + std::to_string(counter.fetch_add(1));
}

constexpr double kRankTol = 1e-9;

// orthonormal basis of the column space
Eigen::MatrixXcd orth(const Eigen::MatrixXcd& m) {
    if (m.cols() == 0) return Eigen::MatrixXcd(m.rows(), 0);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
    qr.setThreshold(kRankTol);
    Eigen::Index r = qr.rank();
    Eigen::MatrixXcd q = qr.householderQ();
    return q.leftCols(r);
}

// orthonormal basis of span(a) cap span(b); columns of a, b orthonormal
Eigen::MatrixXcd intersect(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.cols() == 0 || b.cols() == 0) return Eigen::MatrixXcd(a.rows(), 0);
    Eigen::MatrixXcd m(a.rows(), a.cols() + b.cols());
    m << a, -b;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    Eigen::Index nullity = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] <= kRankTol) ++nullity;
    nullity += m.cols() - svd.singularValues().size();
    if (nullity == 0) return Eigen::MatrixXcd(a.rows(), 0);
    Eigen::MatrixXcd v = svd.matrixV().rightCols(nullity);
    Eigen::MatrixXcd inter = a * v.topRows(a.cols());
    return orth(inter);
}

void validate_flag(const FlagNorm& f) {
    if (f.flag.size() != f.jumps.size() || f.flag.empty())
        throw std::invalid_argument("flag/jumps size mismatch");
    Eigen::Index prev = 0;
    for (std::size_t i = 0; i < f.flag.size(); ++i) {
        if (f.flag[i].rows() != f.dim) throw std::invalid_argument("flag matrix has wrong row count");
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(f.flag[i]);
        qr.setThreshold(kRankTol);
        Eigen::Index r = qr.rank();
        if (r != f.flag[i].cols())
            throw std::invalid_argument("flag matrix columns are not independent");
        if (r <= prev) throw std::invalid_argument("flag ranks must strictly increase");
        prev = r;
        if (i > 0 && !(f.jumps[i] < f.jumps[i - 1]))
            throw std::invalid_argument("flag jumps must strictly decrease");
        // nesting: previous subspace contained in this one
        if (i > 0) {
            Eigen::MatrixXcd big = orth(f.flag[i]);
            Eigen::MatrixXcd res = f.flag[i - 1] - big * (big.adjoint() * f.flag[i - 1]);
            if (res.norm() > kRankTol * (1.0 + f.flag[i - 1].norm()))
                throw std::invalid_argument("flag subspaces are not nested");
        }
    }
    if (prev < f.dim && f.jumps.back() <= 0)
        throw std::invalid_argument("incomplete flag needs positive jumps (implicit tail weight 0)");
}

// complete to full space with jump 0 if needed
FlagNorm completed(FlagNorm f) {
    if (f.flag.back().cols() < f.dim) {
        f.flag.push_back(Eigen::MatrixXcd::Identity(f.dim, f.dim));
        f.jumps.push_back(0.0);
    }
    return f;
}

}  // namespace

NaNorm trivial_norm(int dim, const std::string& basis_id) {
    return NaNorm{dim, basis_id, std::vector<double>(dim, 0.0)};
}

double evaluate(const NaNorm& chi, const Eigen::VectorXcd& coeffs, double support_tol) {
    if (coeffs.size() != chi.dim) throw std::invalid_argument("coefficient vector has wrong size");
    double v = kInfinity;
    for (int i = 0; i < chi.dim; ++i)
        if (std::abs(coeffs[i]) > support_tol) v = std::min(v, chi.weights[i]);
    return v;
}

std::vector<double> jumping_numbers(const NaNorm& chi) {
    std::vector<double> w = chi.weights;
    std::sort(w.begin(), w.end(), std::greater<double>());
    return w;
}

CommonDiagonalization common_diagonalization(const FlagNorm& a_in, const FlagNorm& b_in) {
    if (a_in.dim != b_in.dim) throw std::invalid_argument("flag dimension mismatch");
    validate_flag(a_in);
    validate_flag(b_in);
    FlagNorm A = completed(a_in), B = completed(b_in);
    const int n = A.dim;
    const std::size_t ra = A.flag.size(), rb = B.flag.size();

    std::vector<Eigen::MatrixXcd> fa, fb;
    for (auto& m : A.flag) fa.push_back(orth(m));
    for (auto& m : B.flag) fb.push_back(orth(m));

    Eigen::MatrixXcd basis(n, 0);
    std::vector<double> wa, wb;

    for (std::size_t i = 0; i < ra; ++i) {
        for (std::size_t j = 0; j < rb; ++j) {
            Eigen::MatrixXcd u = intersect(fa[i], fb[j]);
            // w = (F_{i-1} cap G_j) + (F_i cap G_{j-1})
            Eigen::MatrixXcd w1 = i == 0 ? Eigen::MatrixXcd(n, 0) : intersect(fa[i - 1], fb[j]);
            Eigen::MatrixXcd w2 = j == 0 ? Eigen::MatrixXcd(n, 0) : intersect(fa[i], fb[j - 1]);
            Eigen::MatrixXcd w(n, w1.cols() + w2.cols());
            w << w1, w2;
            Eigen::MatrixXcd obs = orth(w);  // grows with picks made in this cell
            for (Eigen::Index c = 0; c < u.cols(); ++c) {
                Eigen::VectorXcd cand = u.col(c);
                Eigen::VectorXcd res = cand - obs * (obs.adjoint() * cand);
                if (res.norm() <= kRankTol) continue;
                basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
                basis.col(basis.cols() - 1) = cand;
                wa.push_back(A.jumps[i]);
                wb.push_back(B.jumps[j]);
                Eigen::MatrixXcd grow(n, obs.cols() + 1);
                grow << obs, cand;
                obs = orth(grow);
            }
        }
    }
    if (basis.cols() != n) throw std::runtime_error("common diagonalization failed to span");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(basis);
    qr.setThreshold(kRankTol);
    if (qr.rank() != n) throw std::runtime_error("common diagonalization produced a dependent basis");

    CommonDiagonalization out;
    out.basis = basis;
    out.basis_id = fresh_basis_id();
    out.first = NaNorm{n, out.basis_id, wa};
    out.second = NaNorm{n, out.basis_id, wb};
    return out;
}

std::vector<double> relative_spectra(const NaNorm& chi, const NaNorm& chi2) {
    if (chi.dim != chi2.dim) throw std::invalid_argument("norm dimension mismatch");
    if (chi.basis_id != chi2.basis_id)
        throw std::invalid_argument("norms are not in a common basis; diagonalize first");
    std::vector<double> d(chi.dim);
    for (int i = 0; i < chi.dim; ++i) d[i] = chi.weights[i] - chi2.weights[i];
    std::sort(d.begin(), d.end(), std::greater<double>());
    return d;
}

double dp_distance(const NaNorm& chi, const NaNorm& chi2, double p) {
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    auto spec = relative_spectra(chi, chi2);
    if (std::isinf(p)) {
        double m = 0;
        for (double s : spec) m = std::max(m, std::abs(s));
        return m;
    }
    double acc = 0;
    for (double s : spec) acc += std::pow(std::abs(s), p);
    return std::pow(acc / chi.dim, 1.0 / p);
}

double p_norm(const NaNorm& chi, double p) { return dp_distance(chi, trivial_norm(chi.dim, chi.basis_id), p); }

double volume(const NaNorm& chi) {
    double s = 0;
    for (double w : chi.weights) s += w;
    return s / chi.dim;
}

double volume(const NaNorm& chi, const NaNorm& chi2) {
    auto spec = relative_spectra(chi, chi2);
    double s = 0;
    for (double v : spec) s += v;
    return s / chi.dim;
}

NaNorm geodesic(const NaNorm& chi0, const NaNorm& chi1, double s) {
    if (s < 0 || s > 1) throw std::invalid_argument("geodesic parameter must lie in [0,1]");
    if (chi0.basis_id != chi1.basis_id || chi0.dim != chi1.dim)
        throw std::invalid_argument("geodesic endpoints need a common basis");
    NaNorm out{chi0.dim, chi0.basis_id, {}};
    out.weights.resize(chi0.dim);
    for (int i = 0; i < chi0.dim; ++i)
        out.weights[i] = (1 - s) * chi0.weights[i] + s * chi1.weights[i];
    return out;
}

NaNorm cap(const NaNorm& chi, double c) {
    NaNorm out = chi;
    for (double& w : out.weights) w = std::min(w, c);
    return out;
}

NaNorm affine_transform(const NaNorm& chi, double a, double b) {
    if (a <= 0) throw std::invalid_argument("affine scale must be positive");
    NaNorm out = chi;
    for (double& w : out.weights) w = a * w + b;
    return out;
}

}  // namespace destab
