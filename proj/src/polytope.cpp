#include "destab/polytope.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "destab/exactlin.hpp"

namespace destab {

namespace {

long long gcd_ll(long long a, long long b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool lex_less(const VecQ& a, const VecQ& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

// Enumerate size-r subsets of {0..m-1}.
void for_subsets(int m, int r, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(r);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == r) {
            fn(idx);
            return;
        }
        for (int i = start; i <= m - (r - depth); ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

// Kernel direction of n-1 independent integer normals in dimension n.
std::vector<VecQ> ray_candidates(const DelzantPolytope& P) {
    const int n = P.dim;
    const int m = static_cast<int>(P.facets.size());
    std::vector<VecQ> rays;
    auto push_both = [&](VecQ d) {
        bool zero = true;
        for (auto& x : d)
            if (x != 0) zero = false;
        if (zero) return;
        rays.push_back(d);
        VecQ neg(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) neg[i] = -d[i];
        rays.push_back(neg);
    };
    if (n == 1) {
        push_both({Rational(1)});
    } else if (n == 2) {
        for (const auto& f : P.facets) push_both({Rational(-f.normal[1]), Rational(f.normal[0])});
    } else {
        for_subsets(m, 2, [&](const std::vector<int>& s) {
            const auto& a = P.facets[s[0]].normal;
            const auto& b = P.facets[s[1]].normal;
            push_both({Rational(a[1] * b[2] - a[2] * b[1]), Rational(a[2] * b[0] - a[0] * b[2]),
                       Rational(a[0] * b[1] - a[1] * b[0])});
        });
    }
    return rays;
}

// Cyclic vertex order of a planar convex polygon given by its vertex set,
// via a monotone chain on an axis-aligned projection.
std::vector<int> polygon_cycle(const std::vector<VecQ>& pts, const std::vector<long long>& normal) {
    int skip = 0;
    long long best = 0;
    for (int j = 0; j < 3; ++j) {
        long long a = normal[j] < 0 ? -normal[j] : normal[j];
        if (a > best) {
            best = a;
            skip = j;
        }
    }
    int u = (skip + 1) % 3, v = (skip + 2) % 3;
    std::vector<int> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (pts[a][u] != pts[b][u]) return pts[a][u] < pts[b][u];
        return pts[a][v] < pts[b][v];
    });
    auto cross = [&](int o, int a, int b) {
        return (pts[a][u] - pts[o][u]) * (pts[b][v] - pts[o][v]) -
               (pts[a][v] - pts[o][v]) * (pts[b][u] - pts[o][u]);
    };
    std::vector<int> hull;
    for (int id : order) {  // lower chain
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), id) <= 0)
            hull.pop_back();
        hull.push_back(id);
    }
    std::size_t lower = hull.size() + 1;
    for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {  // upper chain
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();
    return hull;
}

}  // namespace

Rational DelzantPolytope::facet_value(int f, const VecQ& x) const {
    Rational s = facets[f].offset;
    for (int i = 0; i < dim; ++i) s += Rational(facets[f].normal[i]) * x[i];
    return s;
}

bool DelzantPolytope::contains(const VecQ& x) const {
    for (std::size_t f = 0; f < facets.size(); ++f)
        if (facet_value(static_cast<int>(f), x) < 0) return false;
    return true;
}

int LatticeLevel::find(const VecQ& p) const {
    auto it = std::lower_bound(points.begin(), points.end(), p, lex_less);
    if (it != points.end() && *it == p) return static_cast<int>(it - points.begin());
    return -1;
}

DelzantPolytope make_polytope(int dim, const std::vector<std::vector<long long>>& normals,
                              const VecQ& offsets) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("polytope dimension must be 1, 2 or 3");
    if (normals.size() != offsets.size() || normals.size() < static_cast<std::size_t>(dim) + 1)
        throw std::invalid_argument("facet list too short or mismatched with offsets");
    DelzantPolytope P;
    P.dim = dim;
    for (std::size_t i = 0; i < normals.size(); ++i) {
        if (static_cast<int>(normals[i].size()) != dim)
            throw std::invalid_argument("facet normal has wrong dimension");
        long long g = 0;
        for (long long c : normals[i]) g = gcd_ll(g, c);
        if (g != 1) throw std::invalid_argument("facet normal must be primitive (gcd of entries 1)");
        P.facets.push_back({normals[i], offsets[i]});
    }

    const int m = static_cast<int>(P.facets.size());
    // rank of the normal matrix; deficiency means a line in the recession cone
    MatQ nm;
    for (const auto& f : P.facets) {
        VecQ row(dim);
        for (int j = 0; j < dim; ++j) row[j] = Rational(f.normal[j]);
        nm.push_back(row);
    }
    if (rank_q(nm) < static_cast<std::size_t>(dim))
        throw std::invalid_argument("polytope is unbounded (normals do not span)");
    for (const auto& d : ray_candidates(P)) {
        bool recession = true;
        for (const auto& f : P.facets) {
            Rational s = 0;
            for (int j = 0; j < dim; ++j) s += Rational(f.normal[j]) * d[j];
            if (s < 0) {
                recession = false;
                break;
            }
        }
        if (recession) throw std::invalid_argument("polytope is unbounded");
    }

    // vertices: all dim-fold facet intersections inside P
    std::vector<VecQ> verts;
    for_subsets(m, dim, [&](const std::vector<int>& s) {
        MatQ a;
        VecQ b;
        for (int i : s) {
            VecQ row(dim);
            for (int j = 0; j < dim; ++j) row[j] = Rational(P.facets[i].normal[j]);
            a.push_back(row);
            b.push_back(-P.facets[i].offset);
        }
        auto x = solve_q(a, b);
        if (!x || !P.contains(*x)) return;
        for (const auto& v : verts)
            if (v == *x) return;
        verts.push_back(*x);
    });
    if (verts.empty()) throw std::invalid_argument("polytope is empty");
    std::sort(verts.begin(), verts.end(), lex_less);
    P.vertices = verts;

    P.facet_vertices.resize(m);
    for (int f = 0; f < m; ++f)
        for (std::size_t v = 0; v < verts.size(); ++v)
            if (P.facet_value(f, verts[v]) == 0) P.facet_vertices[f].push_back(static_cast<int>(v));

    if (volume(P) == 0) throw std::invalid_argument("polytope is not full-dimensional");
    return P;
}

DelzantCertificate validate_delzant(const DelzantPolytope& P) {
    DelzantCertificate cert;
    cert.ok = true;
    const int n = P.dim;
    for (std::size_t v = 0; v < P.vertices.size(); ++v) {
        std::vector<int> active;
        for (std::size_t f = 0; f < P.facets.size(); ++f)
            if (P.facet_value(static_cast<int>(f), P.vertices[v]) == 0)
                active.push_back(static_cast<int>(f));
        std::string tag;
        if (static_cast<int>(active.size()) != n) {
            tag = "vertex " + std::to_string(v) + ": " + std::to_string(active.size()) +
                  " active facets (expected " + std::to_string(n) + ")";
        } else {
            MatQ m;
            for (int f : active) {
                VecQ row(n);
                for (int j = 0; j < n; ++j) row[j] = Rational(P.facets[f].normal[j]);
                m.push_back(row);
            }
            Rational d = det_q(m);
            if (d != 1 && d != -1)
                tag = "vertex " + std::to_string(v) + ": normal determinant " + to_string(d);
        }
        if (!tag.empty()) {
            cert.ok = false;
            cert.failures.push_back(tag);
        }
    }
    return cert;
}

LatticeLevel lattice_points(const DelzantPolytope& P, int k) {
    if (k <= 0) throw std::invalid_argument("lattice level k must be positive");
    const int n = P.dim;
    // integer bounding box of k*P
    std::vector<long long> lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
        Rational mn = P.vertices[0][j], mx = P.vertices[0][j];
        for (const auto& v : P.vertices) {
            mn = std::min(mn, v[j]);
            mx = std::max(mx, v[j]);
        }
        Rational a = mn * k, b = mx * k;
        lo[j] = static_cast<long long>(numerator(a) / denominator(a)) - 2;
        hi[j] = static_cast<long long>(numerator(b) / denominator(b)) + 2;
    }
    LatticeLevel L;
    L.k = k;
    std::vector<long long> c(n, 0);
    std::function<void(int)> scan = [&](int j) {
        if (j == n) {
            VecQ x(n);
            for (int i = 0; i < n; ++i) x[i] = Rational(c[i], k);
            if (P.contains(x)) L.points.push_back(x);
            return;
        }
        for (c[j] = lo[j]; c[j] <= hi[j]; ++c[j]) scan(j + 1);
    };
    scan(0);
    std::sort(L.points.begin(), L.points.end(), lex_less);
    return L;
}

Rational simplex_volume(const Simplex& s) {
    const std::size_t n = s.size() - 1;
    MatQ m;
    for (std::size_t i = 1; i <= n; ++i) {
        VecQ row(n);
        for (std::size_t j = 0; j < n; ++j) row[j] = s[i][j] - s[0][j];
        m.push_back(row);
    }
    Rational d = abs_q(det_q(m));
    Rational fact = 1;
    for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<int>(i);
    return d / fact;
}

std::vector<std::vector<Simplex>> boundary_faces(const DelzantPolytope& P) {
    const int n = P.dim;
    std::vector<std::vector<Simplex>> out(P.facets.size());
    for (std::size_t f = 0; f < P.facets.size(); ++f) {
        const auto& ids = P.facet_vertices[f];
        if (n == 1) {
            out[f].push_back({P.vertices[ids.at(0)]});
        } else if (n == 2) {
            if (ids.size() != 2) throw std::logic_error("2d facet without exactly 2 vertices");
            out[f].push_back({P.vertices[ids[0]], P.vertices[ids[1]]});
        } else {
            std::vector<VecQ> pts;
            for (int id : ids) pts.push_back(P.vertices[id]);
            auto cyc = polygon_cycle(pts, P.facets[f].normal);
            for (std::size_t i = 1; i + 1 < cyc.size(); ++i)
                out[f].push_back({pts[cyc[0]], pts[cyc[i]], pts[cyc[i + 1]]});
        }
    }
    return out;
}

std::vector<Simplex> triangulate(const DelzantPolytope& P) {
    const int n = P.dim;
    std::vector<Simplex> out;
    const VecQ& apex = P.vertices[0];
    auto faces = boundary_faces(P);
    for (std::size_t f = 0; f < P.facets.size(); ++f) {
        if (P.facet_value(static_cast<int>(f), apex) == 0) continue;  // apex on facet
        for (const auto& face : faces[f]) {
            Simplex s = face;
            s.insert(s.begin(), apex);
            if (n >= 2 && simplex_volume(s) == 0) continue;
            out.push_back(s);
        }
    }
    if (n == 1) {
        // interval: single 1-simplex between the two vertices
        out.clear();
        out.push_back({P.vertices.front(), P.vertices.back()});
    }
    return out;
}

Rational volume(const DelzantPolytope& P) {
    Rational v = 0;
    for (const auto& s : triangulate(P)) v += simplex_volume(s);
    return v;
}

Rational face_lattice_measure(const DelzantPolytope& P, int f, const Simplex& face) {
    const int n = P.dim;
    if (n == 1) return Rational(1);
    if (n == 2) {
        // segment a-b: factor over the primitive integer direction
        VecQ w(2);
        for (int j = 0; j < 2; ++j) w[j] = face[1][j] - face[0][j];
        BigInt den = lcm(denominator(w[0]), denominator(w[1]));
        BigInt z0 = numerator(w[0]) * (den / denominator(w[0]));
        BigInt z1 = numerator(w[1]) * (den / denominator(w[1]));
        BigInt g = gcd(abs(z0), abs(z1));
        if (g == 0) return Rational(0);
        return Rational(g, den);
    }
    // triangle with primitive facet normal nu: lattice area = |proj area| / |nu_j|
    const auto& nu = P.facets[f].normal;
    int skip = 0;
    long long best = 0;
    for (int j = 0; j < 3; ++j) {
        long long a = nu[j] < 0 ? -nu[j] : nu[j];
        if (a > best) {
            best = a;
            skip = j;
        }
    }
    int u = (skip + 1) % 3, v = (skip + 2) % 3;
    Rational area2 = (face[1][u] - face[0][u]) * (face[2][v] - face[0][v]) -
                     (face[1][v] - face[0][v]) * (face[2][u] - face[0][u]);
    return abs_q(area2) / (2 * Rational(best));
}

Rational boundary_measure(const DelzantPolytope& P) {
    Rational total = 0;
    auto faces = boundary_faces(P);
    for (std::size_t f = 0; f < P.facets.size(); ++f)
        for (const auto& face : faces[f]) total += face_lattice_measure(P, static_cast<int>(f), face);
    return total;
}

}  // namespace destab
