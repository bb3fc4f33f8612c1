#include "destab/plfunction.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "destab/exactlin.hpp"

namespace destab {

namespace {

// barycentric coordinates of x in simplex s, or nullopt if degenerate
std::optional<VecQ> barycentric(const Simplex& s, const VecQ& x) {
    const std::size_t n = x.size();
    MatQ a(n + 1, VecQ(n + 1));
    VecQ b(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        for (std::size_t i = 0; i < n; ++i) a[i][j] = s[j][i];
        a[n][j] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) b[i] = x[i];
    b[n] = 1;
    return solve_q(a, b);
}

bool inside(const VecQ& th) {
    for (const auto& t : th)
        if (t < 0) return false;
    return true;
}

// integral over a simplex of the product of two affine functions given by
// vertex values: vol/((n+1)(n+2)) * (sum_i f_i g_i + (sum f_i)(sum g_i))
Rational simplex_product_integral(const Simplex& s, const VecQ& fv, const VecQ& gv) {
    const std::size_t n = s.size() - 1;
    Rational vol = simplex_volume(s);
    Rational dotsum = 0, fs = 0, gs = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        dotsum += fv[i] * gv[i];
        fs += fv[i];
        gs += gv[i];
    }
    return vol * (dotsum + fs * gs) / Rational((n + 1) * (n + 2));
}

Rational simplex_mean_integral(const Simplex& s, const VecQ& fv) {
    Rational m = 0;
    for (const auto& v : fv) m += v;
    return simplex_volume(s) * m / static_cast<int>(fv.size());
}

// clip convex polygon (ccw or cw, 2d) against halfplane <x,nrm> + off >= 0
std::vector<VecQ> clip_halfplane(const std::vector<VecQ>& poly, const VecQ& nrm,
                                 const Rational& off) {
    std::vector<VecQ> out;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const VecQ& a = poly[i];
        const VecQ& b = poly[(i + 1) % m];
        Rational fa = nrm[0] * a[0] + nrm[1] * a[1] + off;
        Rational fb = nrm[0] * b[0] + nrm[1] * b[1] + off;
        if (fa >= 0) out.push_back(a);
        if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
            Rational t = fa / (fa - fb);
            out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        }
    }
    // dedupe consecutive equal points
    std::vector<VecQ> ded;
    for (const auto& p : out)
        if (ded.empty() || !(ded.back() == p)) ded.push_back(p);
    if (ded.size() > 1 && ded.front() == ded.back()) ded.pop_back();
    return ded;
}

std::vector<VecQ> simplex_intersection_2d(const Simplex& a, const Simplex& b) {
    std::vector<VecQ> poly(a.begin(), a.end());
    for (int e = 0; e < 3; ++e) {
        const VecQ& p = b[e];
        const VecQ& q = b[(e + 1) % 3];
        const VecQ& r = b[(e + 2) % 3];
        VecQ nrm{q[1] - p[1], p[0] - q[0]};  // line pq, oriented so r is inside
        Rational off = -(nrm[0] * p[0] + nrm[1] * p[1]);
        if (nrm[0] * r[0] + nrm[1] * r[1] + off < 0) {
            nrm[0] = -nrm[0];
            nrm[1] = -nrm[1];
            off = -off;
        }
        poly = clip_halfplane(poly, nrm, off);
        if (poly.size() < 3) return {};
    }
    return poly;
}

struct BBox {
    VecQ lo, hi;
};

BBox bbox_of(const Simplex& s) {
    BBox b{s[0], s[0]};
    for (const auto& v : s)
        for (std::size_t i = 0; i < v.size(); ++i) {
            b.lo[i] = std::min(b.lo[i], v[i]);
            b.hi[i] = std::max(b.hi[i], v[i]);
        }
    return b;
}

bool bbox_overlap(const BBox& a, const BBox& b) {
    for (std::size_t i = 0; i < a.lo.size(); ++i)
        if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
    return true;
}

template <typename Fn>
void for_overlay_pieces(const PLFunction& f, const PLFunction& g, Fn&& fn) {
    std::vector<BBox> fb, gb;
    for (const auto& c : f.cells) fb.push_back(bbox_of(c));
    for (const auto& c : g.cells) gb.push_back(bbox_of(c));
    for (std::size_t i = 0; i < f.cells.size(); ++i) {
        AffinePiece pf = affine_piece(f, i);
        for (std::size_t j = 0; j < g.cells.size(); ++j) {
            if (!bbox_overlap(fb[i], gb[j])) continue;
            AffinePiece pg = affine_piece(g, j);
            if (f.dim == 1) {
                Rational lo = std::max(fb[i].lo[0], gb[j].lo[0]);
                Rational hi = std::min(fb[i].hi[0], gb[j].hi[0]);
                if (lo >= hi) continue;
                fn(Simplex{{lo}, {hi}}, pf, pg);
            } else {
                auto poly = simplex_intersection_2d(f.cells[i], g.cells[j]);
                if (poly.size() < 3) continue;
                for (std::size_t t = 1; t + 1 < poly.size(); ++t) {
                    Simplex piece{poly[0], poly[t], poly[t + 1]};
                    if (simplex_volume(piece) == 0) continue;
                    fn(piece, pf, pg);
                }
            }
        }
    }
}

}  // namespace

PLFunction make_constant(const DelzantPolytope& P, const Rational& c) {
    PLFunction f;
    f.dim = P.dim;
    f.concave = true;
    for (const auto& s : triangulate(P)) {
        f.cells.push_back(s);
        f.values.push_back(VecQ(s.size(), c));
    }
    return f;
}

PLFunction make_affine(const DelzantPolytope& P, const VecQ& gradient, const Rational& constant) {
    PLFunction f;
    f.dim = P.dim;
    f.concave = true;
    AffinePiece a{gradient, constant};
    for (const auto& s : triangulate(P)) {
        f.cells.push_back(s);
        VecQ vals;
        for (const auto& v : s) vals.push_back(a.at(v));
        f.values.push_back(vals);
    }
    return f;
}

AffinePiece affine_piece(const PLFunction& f, std::size_t cell) {
    const auto& s = f.cells[cell];
    const std::size_t n = s[0].size();
    MatQ a(n + 1, VecQ(n + 1));
    VecQ b(n + 1);
    for (std::size_t r = 0; r <= n; ++r) {
        for (std::size_t i = 0; i < n; ++i) a[r][i] = s[r][i];
        a[r][n] = 1;
        b[r] = f.values[cell][r];
    }
    auto x = solve_q(a, b);
    if (!x) throw std::logic_error("degenerate cell in PL function");
    AffinePiece p;
    p.gradient.assign(x->begin(), x->end() - 1);
    p.constant = x->back();
    return p;
}

std::optional<Rational> try_evaluate(const PLFunction& f, const VecQ& x) {
    for (std::size_t c = 0; c < f.cells.size(); ++c) {
        auto th = barycentric(f.cells[c], x);
        if (!th || !inside(*th)) continue;
        Rational v = 0;
        for (std::size_t i = 0; i < th->size(); ++i) v += (*th)[i] * f.values[c][i];
        return v;
    }
    return std::nullopt;
}

Rational evaluate(const PLFunction& f, const VecQ& x) {
    auto v = try_evaluate(f, x);
    if (!v) throw std::invalid_argument("point lies outside the PL function domain");
    return *v;
}

bool is_continuous(const PLFunction& f) {
    std::map<VecQ, Rational> seen;
    for (std::size_t c = 0; c < f.cells.size(); ++c) {
        for (std::size_t i = 0; i < f.cells[c].size(); ++i) {
            auto it = seen.find(f.cells[c][i]);
            if (it == seen.end())
                seen.emplace(f.cells[c][i], f.values[c][i]);
            else if (it->second != f.values[c][i])
                return false;
        }
    }
    return true;
}

static void check_cover(const DelzantPolytope& P, const PLFunction& f) {
    Rational tot = 0;
    for (const auto& c : f.cells) tot += simplex_volume(c);
    if (tot != volume(P))
        throw std::invalid_argument("subdivision gap/overlap: cell volumes do not sum to vol(P)");
}

Rational integrate(const DelzantPolytope& P, const PLFunction& f) {
    check_cover(P, f);
    Rational s = 0;
    for (std::size_t c = 0; c < f.cells.size(); ++c) s += simplex_mean_integral(f.cells[c], f.values[c]);
    return s;
}

Rational integrate_squared(const DelzantPolytope& P, const PLFunction& f) {
    check_cover(P, f);
    Rational s = 0;
    for (std::size_t c = 0; c < f.cells.size(); ++c)
        s += simplex_product_integral(f.cells[c], f.values[c], f.values[c]);
    return s;
}

Rational mean(const DelzantPolytope& P, const PLFunction& f) { return integrate(P, f) / volume(P); }

Rational integrate_boundary(const DelzantPolytope& P, const PLFunction& f) {
    const int n = P.dim;
    Rational total = 0;
    for (std::size_t c = 0; c < f.cells.size(); ++c) {
        const auto& s = f.cells[c];
        // each (n-1)-face of the cell lying in a facet hyperplane of P
        for (std::size_t drop = 0; drop < s.size(); ++drop) {
            Simplex face;
            VecQ vals;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (i == drop) continue;
                face.push_back(s[i]);
                vals.push_back(f.values[c][i]);
            }
            for (std::size_t fi = 0; fi < P.facets.size(); ++fi) {
                bool on = true;
                for (const auto& v : face)
                    if (P.facet_value(static_cast<int>(fi), v) != 0) on = false;
                if (!on) continue;
                Rational meas = face_lattice_measure(P, static_cast<int>(fi), face);
                Rational m = 0;
                for (const auto& v : vals) m += v;
                total += meas * m / static_cast<int>(n == 1 ? 1 : vals.size());
                break;
            }
        }
    }
    return total;
}

Rational boundary_mean(const DelzantPolytope& P, const PLFunction& f) {
    return integrate_boundary(P, f) / boundary_measure(P);
}

Rational integrate_squared_difference(const DelzantPolytope& P, const PLFunction& f,
                                      const PLFunction& g) {
    if (P.dim > 2) throw std::invalid_argument("overlay integration supports dims 1 and 2");
    Rational total = 0;
    for_overlay_pieces(f, g, [&](const Simplex& piece, const AffinePiece& pf, const AffinePiece& pg) {
        VecQ dv;
        for (const auto& v : piece) dv.push_back(pf.at(v) - pg.at(v));
        total += simplex_product_integral(piece, dv, dv);
    });
    return total;
}

Rational sup_difference(const DelzantPolytope& P, const PLFunction& f, const PLFunction& g) {
    if (P.dim > 2) throw std::invalid_argument("overlay sup supports dims 1 and 2");
    Rational best = 0;
    for_overlay_pieces(f, g, [&](const Simplex& piece, const AffinePiece& pf, const AffinePiece& pg) {
        for (const auto& v : piece) best = std::max(best, abs_q(pf.at(v) - pg.at(v)));
    });
    return best;
}

bool midpoint_concave_on_samples(const PLFunction& f,
                                 const std::vector<std::pair<VecQ, VecQ>>& pairs) {
    for (const auto& [a, b] : pairs) {
        auto fa = try_evaluate(f, a);
        auto fb = try_evaluate(f, b);
        VecQ mid(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) mid[i] = (a[i] + b[i]) / 2;
        auto fm = try_evaluate(f, mid);
        if (!fa || !fb || !fm) continue;
        if (2 * (*fm) < *fa + *fb) return false;
    }
    return true;
}

}  // namespace destab
