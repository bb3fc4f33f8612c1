#include "destab/envelope.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "destab/exactlin.hpp"

namespace destab {

namespace {

// ---------------------------------------------------------------------------
// perturbed predicates
//
// Lift of point i is values[i] + eps_i with eps_0 >> eps_1 >> ... > 0
// infinitesimal. Determinants are linear in each lift (single column), so a
// perturbed determinant is D0 + sum_i cof_i * eps_i and its sign is decided
// by D0, then by the cofactors in increasing point index.
// ---------------------------------------------------------------------------

struct PointSet {
    const std::vector<VecQ>* pts;
    const VecQ* vals;
};

int sign_q(const Rational& q) { return q == 0 ? 0 : (q < 0 ? -1 : 1); }

// 2x2 orientation of projections (exact, no perturbation needed)
Rational orient2d(const VecQ& a, const VecQ& b, const VecQ& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Perturbed sign of det of rows (x_i, y_i, lift_i, 1) over the given point
// ids. Positive result means the last point is *below* the plane of the
// first three when those are counterclockwise in projection.
int sos_det_sign(const PointSet& ps, const std::vector<int>& ids) {
    const std::size_t m = ids.size();  // 3 (1d) or 4 (2d)
    const std::size_t n = m - 2;       // projection dimension
    auto row = [&](std::size_t r, bool unit_lift) {
        VecQ out(m);
        const VecQ& p = (*ps.pts)[ids[r]];
        for (std::size_t j = 0; j < n; ++j) out[j] = unit_lift ? Rational(0) : p[j];
        out[n] = unit_lift ? Rational(1) : (*ps.vals)[ids[r]];
        out[n + 1] = unit_lift ? Rational(0) : Rational(1);
        return out;
    };
    MatQ base;
    for (std::size_t r = 0; r < m; ++r) base.push_back(row(r, false));
    int s = sign_q(det_q(base));
    if (s != 0) return s;
    // cofactors in increasing point index
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    for (std::size_t r : order) {
        MatQ mcof = base;
        mcof[r] = row(r, true);
        int cs = sign_q(det_q(mcof));
        if (cs != 0) return cs;
    }
    return 0;  // projections affinely dependent; callers never allow this
}

// ---------------------------------------------------------------------------
// dimension 1
// ---------------------------------------------------------------------------

Envelope envelope_1d(const std::vector<VecQ>& pts, const VecQ& vals) {
    const int n = static_cast<int>(pts.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return pts[a][0] < pts[b][0]; });
    PointSet ps{&pts, &vals};

    // upper hull, left to right; pop while the middle point is not strictly
    // above the chord (perturbed)
    std::vector<int> hull;
    for (int id : order) {
        while (hull.size() >= 2) {
            int a = hull[hull.size() - 2], b = hull.back();
            // b strictly above chord a-id  <=>  det(a,b,id) < 0 for x_a < x_b < x_id
            if (sos_det_sign(ps, {a, b, id}) < 0) break;
            hull.pop_back();
        }
        hull.push_back(id);
    }

    Envelope env;
    env.fn.dim = 1;
    env.fn.concave = true;
    env.masses.assign(n, Rational(0));
    env.env_values.assign(n, Rational(0));
    env.active.assign(n, 0);
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        int a = hull[i], b = hull[i + 1];
        env.fn.cells.push_back({pts[a], pts[b]});
        env.fn.values.push_back({vals[a], vals[b]});
        Rational len = pts[b][0] - pts[a][0];
        env.masses[a] += len / 2;
        env.masses[b] += len / 2;
        env.total_volume += len;
    }
    if (hull.size() == 1) {  // single point: degenerate but harmless
        env.fn.cells.push_back({pts[hull[0]], pts[hull[0]]});
        env.fn.values.push_back({vals[hull[0]], vals[hull[0]]});
    }
    // envelope values by interpolation
    std::size_t seg = 0;
    for (int id : order) {
        while (seg + 2 < hull.size() && pts[hull[seg + 1]][0] < pts[id][0]) ++seg;
        int a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
        if (a == b || pts[id][0] == pts[a][0]) {
            env.env_values[id] = pts[id][0] == pts[a][0] ? vals[a] : vals[b];
        } else {
            Rational t = (pts[id][0] - pts[a][0]) / (pts[b][0] - pts[a][0]);
            env.env_values[id] = vals[a] + t * (vals[b] - vals[a]);
        }
        env.active[id] = env.env_values[id] == vals[id] ? 1 : 0;
    }
    return env;
}

// ---------------------------------------------------------------------------
// dimension 2: incremental lifted upper hull (Bowyer-Watson style cavities)
// ---------------------------------------------------------------------------

struct Tri {
    int v[3];   // ccw in projection
    int nb[3];  // neighbor across edge opposite v[i], -1 on domain boundary
    bool alive = true;
};

class UpperHull2 {
  public:
    UpperHull2(const std::vector<VecQ>& pts, const VecQ& vals) : pts_(pts), vals_(vals), ps_{&pts, &vals} {}

    void build() {
        corners_ = strict_hull_2d();
        if (corners_.size() < 3) throw std::invalid_argument("envelope points are not full-dimensional");
        initial_corner_hull();
        std::vector<char> is_corner(pts_.size(), 0);
        for (int c : corners_) is_corner[c] = 1;
        for (int p = 0; p < static_cast<int>(pts_.size()); ++p) {
            if (!is_corner[p]) insert_point(p);
        }
    }

    Envelope finish() {
        Envelope env;
        env.fn.dim = 2;
        env.fn.concave = true;
        const int n = static_cast<int>(pts_.size());
        env.masses.assign(n, Rational(0));
        env.env_values.assign(n, Rational(0));
        env.active.assign(n, 0);
        std::vector<char> is_vertex(n, 0);
        for (const auto& t : tris_) {
            if (!t.alive) continue;
            env.fn.cells.push_back({pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]]});
            env.fn.values.push_back({vals_[t.v[0]], vals_[t.v[1]], vals_[t.v[2]]});
            Rational vol = orient2d(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]]) / 2;
            if (vol <= 0) throw std::logic_error("envelope produced a degenerate cell");
            env.total_volume += vol;
            for (int i = 0; i < 3; ++i) {
                env.masses[t.v[i]] += vol / 3;
                is_vertex[t.v[i]] = 1;
            }
        }
        for (int i = 0; i < n; ++i) {
            if (is_vertex[i]) {
                env.env_values[i] = vals_[i];
            } else {
                int t = locate(pts_[i], last_tri_);
                env.env_values[i] = plane_value(t, pts_[i]);
            }
            env.active[i] = env.env_values[i] == vals_[i] ? 1 : 0;
        }
        certify(env);
        return env;
    }

  private:
    const std::vector<VecQ>& pts_;
    const VecQ& vals_;
    PointSet ps_;
    std::vector<int> corners_;
    std::vector<Tri> tris_;
    int last_tri_ = 0;

    // strict convex hull of projections, ccw, corners only
    std::vector<int> strict_hull_2d() const {
        std::vector<int> order(pts_.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (pts_[a][0] != pts_[b][0]) return pts_[a][0] < pts_[b][0];
            return pts_[a][1] < pts_[b][1];
        });
        auto chain = [&](bool lower) {
            std::vector<int> h;
            for (std::size_t ii = 0; ii < order.size(); ++ii) {
                int id = order[lower ? ii : order.size() - 1 - ii];
                while (h.size() >= 2 &&
                       orient2d(pts_[h[h.size() - 2]], pts_[h.back()], pts_[id]) <= 0)
                    h.pop_back();
                h.push_back(id);
            }
            return h;
        };
        auto lo = chain(true), hi = chain(false);
        lo.pop_back();
        hi.pop_back();
        lo.insert(lo.end(), hi.begin(), hi.end());
        return lo;  // ccw
    }

    // q strictly above the plane of ccw triangle (a,b,c), perturbed
    bool above(int a, int b, int c, int q) const {
        return sos_det_sign(ps_, {a, b, c, q}) < 0;
    }

    Rational plane_value(int t, const VecQ& x) const {
        const Tri& T = tris_[t];
        MatQ m(3, VecQ(3));
        VecQ b(3);
        for (int r = 0; r < 3; ++r) {
            m[r][0] = pts_[T.v[r]][0];
            m[r][1] = pts_[T.v[r]][1];
            m[r][2] = 1;
            b[r] = vals_[T.v[r]];
        }
        auto sol = solve_q(m, b);
        return (*sol)[0] * x[0] + (*sol)[1] * x[1] + (*sol)[2];
    }

    void initial_corner_hull() {
        const int m = static_cast<int>(corners_.size());
        std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;  // directed edge -> (tri, slot)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = j + 1; k < m; ++k) {
                    if (i == j || i == k) continue;
                    int a = corners_[i], b = corners_[j], c = corners_[k];
                    if (orient2d(pts_[a], pts_[b], pts_[c]) <= 0) continue;  // want ccw, each tri once
                    bool facet = true;
                    for (int q : corners_) {
                        if (q == a || q == b || q == c) continue;
                        if (above(a, b, c, q)) {
                            facet = false;
                            break;
                        }
                    }
                    if (!facet) continue;
                    Tri t;
                    t.v[0] = a;
                    t.v[1] = b;
                    t.v[2] = c;
                    t.nb[0] = t.nb[1] = t.nb[2] = -1;
                    int id = static_cast<int>(tris_.size());
                    tris_.push_back(t);
                    for (int s = 0; s < 3; ++s)
                        edge_owner[{t.v[(s + 1) % 3], t.v[(s + 2) % 3]}] = {id, s};
                }
        // duplicate ccw triples (i over all, j<k) would add each facet 3 times; dedupe
        dedupe_tris();
        // wire adjacency
        edge_owner.clear();
        for (int id = 0; id < static_cast<int>(tris_.size()); ++id)
            for (int s = 0; s < 3; ++s)
                edge_owner[{tris_[id].v[(s + 1) % 3], tris_[id].v[(s + 2) % 3]}] = {id, s};
        for (auto& [e, own] : edge_owner) {
            auto rev = edge_owner.find({e.second, e.first});
            tris_[own.first].nb[own.second] = rev == edge_owner.end() ? -1 : rev->second.first;
        }
        last_tri_ = 0;
    }

    void dedupe_tris() {
        std::set<std::array<int, 3>> seen;
        std::vector<Tri> keep;
        for (auto& t : tris_) {
            std::array<int, 3> key{t.v[0], t.v[1], t.v[2]};
            std::sort(key.begin(), key.end());
            if (seen.insert(key).second) keep.push_back(t);
        }
        tris_ = keep;
    }

    // exact containment walk; falls back to a scan
    int locate(const VecQ& x, int start) const {
        int cur = start;
        if (cur < 0 || cur >= static_cast<int>(tris_.size()) || !tris_[cur].alive) cur = -1;
        if (cur >= 0) {
            for (int steps = 0; steps < static_cast<int>(tris_.size()) + 8; ++steps) {
                const Tri& t = tris_[cur];
                int next = -1;
                for (int s = 0; s < 3; ++s) {
                    if (orient2d(pts_[t.v[(s + 1) % 3]], pts_[t.v[(s + 2) % 3]], x) < 0) {
                        next = t.nb[s];
                        break;
                    }
                }
                if (next == -1) {
                    bool insidep = true;
                    for (int s = 0; s < 3 && insidep; ++s)
                        if (orient2d(pts_[t.v[(s + 1) % 3]], pts_[t.v[(s + 2) % 3]], x) < 0)
                            insidep = false;
                    if (insidep) return cur;
                    break;  // hit boundary without containment
                }
                cur = next;
            }
        }
        for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
            if (!tris_[id].alive) continue;
            const Tri& t = tris_[id];
            bool ok = true;
            for (int s = 0; s < 3 && ok; ++s)
                if (orient2d(pts_[t.v[(s + 1) % 3]], pts_[t.v[(s + 2) % 3]], x) < 0) ok = false;
            if (ok) return id;
        }
        throw std::logic_error("point location failed");
    }

    void insert_point(int p) {
        int t0 = locate(pts_[p], last_tri_);
        if (!above(tris_[t0].v[0], tris_[t0].v[1], tris_[t0].v[2], p)) return;  // below surface

        // conflict region by BFS
        std::vector<int> cavity{t0};
        std::set<int> in_cavity{t0};
        for (std::size_t head = 0; head < cavity.size(); ++head) {
            const Tri& t = tris_[cavity[head]];
            for (int s = 0; s < 3; ++s) {
                int nbh = t.nb[s];
                if (nbh < 0 || in_cavity.count(nbh)) continue;
                const Tri& u = tris_[nbh];
                if (above(u.v[0], u.v[1], u.v[2], p)) {
                    cavity.push_back(nbh);
                    in_cavity.insert(nbh);
                }
            }
        }

        // boundary edges of the cavity, each with its outer neighbor
        struct BEdge {
            int a, b, outer;
        };
        std::vector<BEdge> bedges;
        for (int id : cavity) {
            const Tri& t = tris_[id];
            for (int s = 0; s < 3; ++s) {
                int nbh = t.nb[s];
                if (nbh >= 0 && in_cavity.count(nbh)) continue;
                bedges.push_back({t.v[(s + 1) % 3], t.v[(s + 2) % 3], nbh});
            }
        }
        for (int id : cavity) tris_[id].alive = false;

        // fan from p; skip edges collinear with p (p subdivides them)
        std::map<std::pair<int, int>, std::pair<int, int>> open_edge;  // directed (x,y) -> (tri,slot)
        std::vector<int> fresh;
        for (const auto& e : bedges) {
            Rational orr = orient2d(pts_[p], pts_[e.a], pts_[e.b]);
            if (orr == 0) continue;
            if (orr < 0) throw std::logic_error("cavity boundary orientation broken");
            Tri t;
            t.v[0] = p;
            t.v[1] = e.a;
            t.v[2] = e.b;
            t.nb[0] = e.outer;
            t.nb[1] = t.nb[2] = -1;
            int id = static_cast<int>(tris_.size());
            tris_.push_back(t);
            fresh.push_back(id);
            if (e.outer >= 0) {
                Tri& out = tris_[e.outer];
                for (int s = 0; s < 3; ++s)
                    if (out.v[(s + 1) % 3] == e.b && out.v[(s + 2) % 3] == e.a) out.nb[s] = id;
            }
            open_edge[{e.b, p}] = {id, 1};  // edge opposite slot 1 is (v2, v0) = (e.b, p)
            open_edge[{p, e.a}] = {id, 2};  // edge opposite slot 2 is (v0, v1) = (p, e.a)
        }
        for (auto& [e, own] : open_edge) {
            auto rev = open_edge.find({e.second, e.first});
            if (rev != open_edge.end()) tris_[own.first].nb[own.second] = rev->second.first;
        }
        if (!fresh.empty()) last_tri_ = fresh.back();
    }

    void certify(const Envelope& env) const {
        // surface must be locally concave across interior edges and must
        // majorize every input value
        for (int id = 0; id < static_cast<int>(tris_.size()); ++id) {
            const Tri& t = tris_[id];
            if (!t.alive) continue;
            for (int s = 0; s < 3; ++s) {
                int nbh = t.nb[s];
                if (nbh < 0 || !tris_[nbh].alive) continue;
                const Tri& u = tris_[nbh];
                for (int r = 0; r < 3; ++r) {
                    int q = u.v[r];
                    if (q != t.v[0] && q != t.v[1] && q != t.v[2]) {
                        if (plane_value(id, pts_[q]) < vals_[q])
                            throw std::logic_error("envelope certificate failed: non-concave edge");
                    }
                }
            }
        }
        for (std::size_t i = 0; i < pts_.size(); ++i)
            if (env.env_values[i] < vals_[i])
                throw std::logic_error("envelope certificate failed: value below input");
    }
};

}  // namespace

Envelope concave_envelope(const std::vector<VecQ>& points, const VecQ& values) {
    if (points.size() != values.size() || points.empty())
        throw std::invalid_argument("envelope: points/values length mismatch");
    const std::size_t dim = points[0].size();
    if (dim == 1) return envelope_1d(points, values);
    if (dim == 2) {
        UpperHull2 h(points, values);
        h.build();
        return h.finish();
    }
    throw std::invalid_argument("concave_envelope: dimension 3 subdivisions are not implemented");
}

}  // namespace destab
