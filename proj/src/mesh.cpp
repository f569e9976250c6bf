#include "scherk/mesh.hpp"
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace scherk {

const char* node_tag_name(NodeTag t) {
    switch (t) {
        case NodeTag::A1: return "A1";
        case NodeTag::B1: return "B1";
        case NodeTag::A2: return "A2";
        case NodeTag::B2: return "B2";
        case NodeTag::Gamma1: return "GAMMA1";
        case NodeTag::Gamma2: return "GAMMA2";
        case NodeTag::Trunc: return "TRUNC";
        default: return "";
    }
}

NodeTag node_tag_from_name(const std::string& s) {
    if (s == "A1") return NodeTag::A1;
    if (s == "B1") return NodeTag::B1;
    if (s == "A2") return NodeTag::A2;
    if (s == "B2") return NodeTag::B2;
    if (s == "GAMMA1") return NodeTag::Gamma1;
    if (s == "GAMMA2") return NodeTag::Gamma2;
    if (s == "TRUNC") return NodeTag::Trunc;
    return NodeTag::None;
}

void RefinementConfig::validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("RefinementConfig: h must be positive");
    if (!(grading > 0.0 && grading <= 1.0))
        throw std::invalid_argument("RefinementConfig: grading must lie in (0,1]");
    if (!(truncation_delta > 0.0 && truncation_delta < 0.5))
        throw std::invalid_argument("RefinementConfig: truncation_delta must lie in (0,0.5)");
}

namespace {

double wrap_pi(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

Vec2 rotq(Vec2 v, int q) {
    for (int i = 0; i < (q & 3); ++i) v = rot90(v);
    return v;
}

// Boundary curve of one quadrant: [chord][circular arc][chord], parametrized
// by normalized arclength.  Chords are empty for finite vertices and for
// truncation sectors; for ideal edges they bridge the cusp between the
// trimmed geodesic arc and the corner on the truncation circle.
struct QuadrantCurve {
    Vec2 c0{}, c1{};       // corner points, reproduced exactly at s = 0, 1
    Vec2 center{};
    double radius = 0.0;
    double psi0 = 0.0;     // arc start angle (after trimming)
    double dpsi = 0.0;     // signed sweep to the arc end
    Vec2 arc0{}, arc1{};   // trimmed arc endpoints
    double len_chord = 0.0;
    double len_arc = 0.0;
    double length = 0.0;

    Vec2 arc_point(double f) const {  // f in [0,1] along the arc piece
        const double psi = psi0 + f * dpsi;
        return {center.x + radius * std::cos(psi), center.y + radius * std::sin(psi)};
    }

    Vec2 eval(double s) const {
        if (s <= 0.0) return c0;
        if (s >= 1.0) return c1;
        double d = s * length;
        if (d < len_chord) {
            const double f = d / len_chord;
            return {(1 - f) * c0.x + f * arc0.x, (1 - f) * c0.y + f * arc0.y};
        }
        d -= len_chord;
        if (d <= len_arc) return arc_point(len_arc > 0 ? d / len_arc : 0.0);
        const double f = (d - len_arc) / len_chord;
        return {(1 - f) * arc1.x + f * c1.x, (1 - f) * arc1.y + f * c1.y};
    }

    double mean_radius() const {
        double s = 0.0;
        const int n = 64;
        for (int i = 0; i <= n; ++i) s += norm(eval(i / double(n)));
        return s / (n + 1);
    }
};

QuadrantCurve curve_from_arc(const GeodesicArc& arc, Vec2 corner0, Vec2 corner1) {
    if (arc.is_diameter)
        throw std::invalid_argument("triangulate: edge passes through the origin (degenerate domain)");
    QuadrantCurve c;
    c.c0 = corner0;
    c.c1 = corner1;
    c.center = arc.center;
    c.radius = arc.radius;
    c.psi0 = arc.t0;
    c.dpsi = wrap_pi(arc.t1 - arc.t0);
    c.arc0 = corner0;
    c.arc1 = corner1;
    c.len_chord = 0.0;
    c.len_arc = c.radius * std::abs(c.dpsi);
    c.length = c.len_arc;
    return c;
}

// Trim an ideal edge at both ends: the arc is cut where the chord to the
// corner point on the truncation circle reaches `target`, or at the
// truncation circle itself if that cut lies deeper.  The cusp between the
// geodesic and the truncation circle is thinner than any usable mesh size,
// so each cut is bridged with a single chord edge.
QuadrantCurve trim_ideal_curve(const GeodesicArc& arc, Vec2 corner0, Vec2 corner1,
                               double trunc_radius, double target) {
    QuadrantCurve c = curve_from_arc(arc, corner0, corner1);

    auto bisect = [](auto fn, double lo, double hi) {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (fn(mid) < 0.0) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    if (norm(c.arc_point(0.25) - corner0) < target)
        throw std::invalid_argument("triangulate: infeasible quality constraints (h too coarse for the edge)");

    double f0 = bisect([&](double f) { return norm(c.arc_point(f) - corner0) - target; }, 0.0, 0.25);
    double f1 = 1.0 - bisect([&](double f) { return norm(c.arc_point(1.0 - f) - corner1) - target; }, 0.0, 0.25);
    if (norm(c.arc_point(f0)) > trunc_radius)
        f0 = bisect([&](double f) { return trunc_radius - norm(c.arc_point(f)); }, f0, 0.5);
    if (norm(c.arc_point(f1)) > trunc_radius)
        f1 = 1.0 - bisect([&](double f) { return trunc_radius - norm(c.arc_point(1.0 - f)); }, 1.0 - f1, 0.5);

    QuadrantCurve t = c;
    t.psi0 = c.psi0 + f0 * c.dpsi;
    t.dpsi = (f1 - f0) * c.dpsi;
    t.arc0 = c.arc_point(f0);
    t.arc1 = c.arc_point(f1);
    t.len_arc = t.radius * std::abs(t.dpsi);
    t.len_chord = 0.5 * (norm(t.arc0 - corner0) + norm(t.arc1 - corner1));
    t.length = t.len_arc + 2.0 * t.len_chord;
    return t;
}

QuadrantCurve sector_curve(double radius) {
    const double s = std::sqrt(0.5);
    QuadrantCurve c;
    c.c0 = {radius * s, -radius * s};
    c.c1 = {radius * s, radius * s};
    c.center = {0.0, 0.0};
    c.radius = radius;
    c.psi0 = -kPi / 4.0;
    c.dpsi = kPi / 2.0;
    c.arc0 = c.c0;
    c.arc1 = c.c1;
    c.len_arc = radius * kPi / 2.0;
    c.length = c.len_arc;
    return c;
}

struct QuadrantPlan {
    QuadrantCurve curve;
    int n_half = 0;                      // boundary intervals / 2
    std::vector<double> boundary_sigma;  // ring-M parameters, size 2*n_half+1
    std::vector<double> angle_fraction;  // normalized polar angle at sampled s

    // Curve parameter for interior rings.  Small rings distribute nodes
    // uniformly in polar angle, which keeps the radial spokes evenly spread
    // even where the boundary arclength bunches up (ideal-edge cusps); the
    // rim blends back into the boundary node distribution.
    double param(double u, double beta) const {
        const int n = int(angle_fraction.size()) - 1;
        int lo = 0, hi = n;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (angle_fraction[mid] <= u ? lo : hi) = mid;
        }
        const double a0 = angle_fraction[lo], a1 = angle_fraction[hi];
        const double f = a1 > a0 ? (u - a0) / (a1 - a0) : 0.0;
        const double s_ang = (lo + f) / n;

        const int nb = int(boundary_sigma.size()) - 1;
        const double x = u * nb;
        const int ib = std::clamp(int(x), 0, nb - 1);
        const double s_bnd = boundary_sigma[ib] + (x - ib) * (boundary_sigma[ib + 1] - boundary_sigma[ib]);
        return (1.0 - beta) * s_ang + beta * s_bnd;
    }

    // normalized polar-angle fraction of the curve point at parameter s
    double angle_at(double s) const {
        const int n = int(angle_fraction.size()) - 1;
        const double x = std::clamp(s, 0.0, 1.0) * n;
        const int i = std::clamp(int(x), 0, n - 1);
        return angle_fraction[i] + (x - i) * (angle_fraction[i + 1] - angle_fraction[i]);
    }
};

QuadrantPlan plan_quadrant(const QuadrantCurve& curve, double h_boundary) {
    QuadrantPlan p;
    p.curve = curve;
    if (curve.len_chord > 0.0) {
        const int n_arc = 2 * std::max<int>(2, std::llround(curve.len_arc / (2.0 * h_boundary)));
        const int n = n_arc + 2;
        p.n_half = n / 2;
        p.boundary_sigma.resize(n + 1);
        p.boundary_sigma[0] = 0.0;
        p.boundary_sigma[n] = 1.0;
        const double s_j0 = curve.len_chord / curve.length;
        const double s_j1 = (curve.len_chord + curve.len_arc) / curve.length;
        for (int i = 1; i < n; ++i)
            p.boundary_sigma[i] = s_j0 + (s_j1 - s_j0) * (i - 1) / double(n_arc);
    } else {
        const int n = 2 * std::max<int>(1, std::llround(curve.length / (2.0 * h_boundary)));
        p.n_half = n / 2;
        p.boundary_sigma.resize(n + 1);
        for (int i = 0; i <= n; ++i) p.boundary_sigma[i] = i / double(n);
    }

    const int samples = 512;
    p.angle_fraction.resize(samples + 1);
    const Vec2 c0 = curve.eval(0.0);
    const double a0 = std::atan2(c0.y, c0.x);
    double prev = 0.0;
    for (int j = 0; j <= samples; ++j) {
        const Vec2 z = curve.eval(j / double(samples));
        double a = std::atan2(z.y, z.x) - a0;
        while (a < prev - 1e-12) a += 2.0 * kPi;
        p.angle_fraction[j] = a;
        prev = a;
    }
    const double total = p.angle_fraction[samples];
    for (auto& a : p.angle_fraction) a /= total;
    p.angle_fraction[samples] = 1.0;
    return p;
}

double radial_profile(double t, double g) {
    return (2.0 * t - (1.0 - g) * t * t) / (1.0 + g);
}

double radial_weight(double t, double g) {  // relative local spacing, 1 -> g
    return 1.0 - (1.0 - g) * t;
}

struct RingRef {
    int ring;
    int idx;
};

// Zip two concentric rows over a shared parameter range, advancing whichever
// next parameter comes first.  Emits index-space triangles (counterclockwise
// for rows ordered counterclockwise with B outside A).
template <typename Emit>
void zip_rows(int ringA, const std::vector<double>& sA,
              int ringB, const std::vector<double>& sB, Emit&& tri) {
    std::size_t a = 0, b = 0;
    const std::size_t mA = sA.size() - 1, mB = sB.size() - 1;
    while (a < mA || b < mB) {
        bool take_b;
        if (b == mB) take_b = false;
        else if (a == mA) take_b = true;
        else take_b = sB[b + 1] <= sA[a + 1];
        if (take_b) {
            tri(RingRef{ringA, int(a)}, RingRef{ringB, int(b)}, RingRef{ringB, int(b + 1)});
            ++b;
        } else {
            tri(RingRef{ringA, int(a)}, RingRef{ringB, int(b)}, RingRef{ringA, int(a + 1)});
            ++a;
        }
    }
}

struct GeneratorSpec {
    TriMesh::Kind kind = TriMesh::Kind::Quadrilateral;
    bool full = true;       // all four quadrants
    bool symmetric = true;  // quadrant-0 template rotated into place
    std::array<QuadrantPlan, 4> plan;
    std::array<NodeTag, 4> edge_tag{};    // ring-M nodes strictly inside a quadrant
    std::array<NodeTag, 4> corner_tag{};  // spine-end boundary node of quadrant q
};

// Delaunay edge flips.  The ring construction shears cells wherever the
// boundary runs nearly radially (close to corners); flipping to the locally
// Delaunay diagonal re-pairs the nodes there.  Flips are applied in
// symmetry-closed orbits so that the triangulation stays exactly invariant
// under the dihedral node permutations; edges on the diagonal mesh lines are
// never flipped.
void delaunay_flip_pass(TriMesh& mesh, const std::vector<std::vector<int>>& perms) {
    const int nt = mesh.triangle_count();
    auto on_same_diagonal = [&](int a, int b) {
        const Vec2 pa = mesh.nodes[a], pb = mesh.nodes[b];
        return (pa.x == pa.y && pb.x == pb.y) || (pa.x == -pa.y && pb.x == -pb.y);
    };

    for (int round = 0; round < 64; ++round) {
        // edge -> adjacent triangles, with the opposite vertex per side
        std::map<std::pair<int, int>, std::array<std::pair<int, int>, 2>> edges;
        for (int t = 0; t < nt; ++t)
            for (int j = 0; j < 3; ++j) {
                const int a = mesh.triangles[t][j], b = mesh.triangles[t][(j + 1) % 3];
                const int opp = mesh.triangles[t][(j + 2) % 3];
                auto key = std::minmax(a, b);
                auto it = edges.find({key.first, key.second});
                if (it == edges.end())
                    edges[{key.first, key.second}] = {{{t, opp}, {-1, -1}}};
                else
                    it->second[1] = {t, opp};
            }

        auto angle_at = [&](int apex, int a, int b) {
            const Vec2 u = mesh.nodes[a] - mesh.nodes[apex];
            const Vec2 v = mesh.nodes[b] - mesh.nodes[apex];
            return std::atan2(std::abs(cross(u, v)), dot(u, v));
        };
        auto flippable = [&](const std::pair<int, int>& e,
                             const std::array<std::pair<int, int>, 2>& adj) {
            if (adj[1].first < 0) return false;
            if (on_same_diagonal(e.first, e.second)) return false;
            // opposite angles sum > pi  <=>  not locally Delaunay
            if (angle_at(adj[0].second, e.first, e.second) +
                    angle_at(adj[1].second, e.first, e.second) <= kPi + 1e-12)
                return false;
            // the flipped pair must stay positively oriented
            const Vec2 p = mesh.nodes[adj[0].second], q = mesh.nodes[adj[1].second];
            const Vec2 a = mesh.nodes[e.first], b = mesh.nodes[e.second];
            return cross(a - p, q - p) > 0 != cross(b - p, q - p) > 0;
        };

        std::vector<char> used(nt, 0);
        std::vector<std::pair<int, int>> selected;
        for (const auto& [e, adj] : edges) {
            if (!flippable(e, adj)) continue;
            // collect the symmetry orbit of the edge (closure under perms)
            std::vector<std::pair<int, int>> orbit{e};
            for (bool grew = true; grew;) {
                grew = false;
                for (const auto& perm : perms) {
                    std::vector<std::pair<int, int>> next = orbit;
                    for (const auto& oe : orbit) {
                        auto key = std::minmax(perm[oe.first], perm[oe.second]);
                        next.push_back({key.first, key.second});
                    }
                    std::sort(next.begin(), next.end());
                    next.erase(std::unique(next.begin(), next.end()), next.end());
                    if (next.size() > orbit.size()) grew = true;
                    orbit = std::move(next);
                }
            }
            bool ok = true;
            for (const auto& oe : orbit) {
                auto it = edges.find(oe);
                if (it == edges.end() || !flippable(oe, it->second) ||
                    used[it->second[0].first] || used[it->second[1].first]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            for (const auto& oe : orbit) {
                const auto& adj = edges[oe];
                used[adj[0].first] = used[adj[1].first] = 1;
                selected.push_back(oe);
            }
        }
        if (selected.empty()) break;

        for (const auto& e : selected) {
            const auto& adj = edges[e];
            const int p = adj[0].second, q = adj[1].second;
            // orientations: replace (a,b,p),(b,a,q) by (a,q,p),(b,p,q)
            int a = e.first, b = e.second;
            if (cross(mesh.nodes[b] - mesh.nodes[a], mesh.nodes[p] - mesh.nodes[a]) < 0)
                std::swap(a, b);
            mesh.triangles[adj[0].first] = {a, q, p};
            mesh.triangles[adj[1].first] = {b, p, q};
        }
    }
    mesh.finalize();
}

TriMesh generate(const GeneratorSpec& spec, const RefinementConfig& cfg) {
    TriMesh mesh;
    mesh.kind = spec.kind;
    mesh.h = cfg.h;
    mesh.grading = cfg.grading;
    mesh.full_domain = spec.full;
    mesh.dihedral = spec.symmetric && spec.full;

    const int nq = spec.full ? 4 : 1;
    double rbar = 0.0;
    for (int q = 0; q < nq; ++q)
        rbar = std::max(rbar, spec.plan[spec.symmetric ? 0 : q].curve.mean_radius());
    const int M = std::max<int>(2, int(std::ceil(2.0 * rbar / ((1.0 + cfg.grading) * cfg.h))));
    mesh.rings = M;

    // Interior rings are sampled uniformly in polar angle, which keeps the
    // spokes evenly spread; the outermost layers ramp into the boundary's
    // arclength distribution.  The ramp must span several layers: a one-step
    // switch folds the strip inside ideal-edge cusps, while a slow ramp
    // smears the mismatch as shear across the bulk.
    auto blend = [&](int k) { return std::max(0.0, 1.0 - (M - k) / 5.0); };

    // per-ring half-interval counts from the ring's own length, with the
    // same relative grading as the radial spacing, monotone toward the rim
    mesh.half_intervals.assign(M + 1, {0, 0, 0, 0});
    for (int q = 0; q < nq; ++q) {
        const auto& plan = spec.plan[spec.symmetric ? 0 : q];
        int prev = 1;
        for (int k = 1; k < M; ++k) {
            const double t = k / double(M);
            const double scale = radial_profile(t, cfg.grading);
            const double beta = blend(k);
            double len = 0.0;
            Vec2 last = plan.curve.eval(plan.param(0.0, beta));
            const int samples = 128;
            for (int j = 1; j <= samples; ++j) {
                const Vec2 z = plan.curve.eval(plan.param(j / double(samples), beta));
                len += norm(z - last);
                last = z;
            }
            len *= scale;
            int m = std::max<int>(1, std::llround(len / (2.0 * cfg.h * radial_weight(t, cfg.grading))));
            m = std::clamp(m, prev, plan.n_half);
            mesh.half_intervals[k][q] = m;
            prev = m;
        }
        mesh.half_intervals[M][q] = plan.n_half;
    }
    if (spec.symmetric)
        for (int k = 1; k <= M; ++k)
            for (int q = 1; q < 4; ++q) mesh.half_intervals[k][q] = mesh.half_intervals[k][0];

    mesh.ring_ids.assign(M + 1, {});
    mesh.nodes.push_back({0.0, 0.0});
    mesh.node_tag.push_back(NodeTag::None);
    mesh.center_node = 0;

    auto sigma_of = [&](int q, int k, int i) -> double {  // zip key: index fraction
        (void)q;
        return i / double(2 * mesh.half_intervals[k][q]);
    };

    auto position = [&](int q, int k, int i) -> Vec2 {
        const auto& plan = spec.plan[spec.symmetric ? 0 : q];
        const int m = mesh.half_intervals[k][q];
        const double scale = radial_profile(k / double(M), cfg.grading);
        auto eval = [&](int idx) {
            if (k == M) return plan.curve.eval(plan.boundary_sigma[idx]);  // scale = 1
            const Vec2 z = plan.curve.eval(plan.param(idx / double(2 * m), blend(k)));
            return Vec2{scale * z.x, scale * z.y};
        };
        Vec2 p;
        if (spec.symmetric && i > m) {  // mirror partner across the bisector
            p = eval(2 * m - i);
            p.y = -p.y;
        } else {
            p = eval(i);
            if (spec.symmetric && i == m) p.y = 0.0;  // exact bisector
        }
        return spec.symmetric ? rotq(p, q) : p;
    };

    for (int k = 1; k <= M; ++k) {
        for (int q = 0; q < nq; ++q) {
            const int m = mesh.half_intervals[k][q];
            auto& ids = mesh.ring_ids[k][q];
            ids.assign(2 * m + 1, -1);
            const int last_own = spec.full ? 2 * m - 1 : 2 * m;
            for (int i = 0; i <= last_own; ++i) {
                ids[i] = mesh.node_count();
                mesh.nodes.push_back(position(q, k, i));
                mesh.node_tag.push_back(NodeTag::None);
            }
        }
        if (spec.full)
            for (int q = 0; q < 4; ++q)
                mesh.ring_ids[k][q][2 * mesh.half_intervals[k][q]] = mesh.ring_ids[k][(q + 1) % 4][0];
    }

    // tags
    for (int q = 0; q < nq; ++q) {
        const int nh = mesh.half_intervals[M][q];
        for (int i = 1; i < 2 * nh; ++i)
            mesh.node_tag[mesh.ring_ids[M][q][i]] = spec.edge_tag[q];
        mesh.node_tag[mesh.ring_ids[M][q][0]] = spec.corner_tag[q];
        if (!spec.full) mesh.node_tag[mesh.ring_ids[M][q][2 * nh]] = spec.corner_tag[q];
    }
    if (spec.kind == TriMesh::Kind::Quadrant) {
        for (int k = 1; k <= M; ++k) {
            mesh.node_tag[mesh.ring_ids[k][0][0]] = NodeTag::Gamma2;
            mesh.node_tag[mesh.ring_ids[k][0][2 * mesh.half_intervals[k][0]]] = NodeTag::Gamma1;
        }
        mesh.node_tag[mesh.center_node] = NodeTag::Gamma1;
    }

    // diagonal mesh lines
    mesh.gamma1_nodes.push_back(mesh.center_node);
    mesh.gamma2_nodes.push_back(mesh.center_node);
    for (int k = 1; k <= M; ++k) {
        if (spec.full) {
            for (int q : {1, 3}) mesh.gamma1_nodes.push_back(mesh.ring_ids[k][q][0]);
            for (int q : {0, 2}) mesh.gamma2_nodes.push_back(mesh.ring_ids[k][q][0]);
        } else {
            mesh.gamma2_nodes.push_back(mesh.ring_ids[k][0][0]);
            mesh.gamma1_nodes.push_back(mesh.ring_ids[k][0][2 * mesh.half_intervals[k][0]]);
        }
    }

    // triangles, strip by strip
    for (int q = 0; q < nq; ++q) {
        auto id_of = [&](RingRef r) {
            return r.ring == 0 ? mesh.center_node : mesh.ring_ids[r.ring][q][r.idx];
        };
        for (int k = 1; k <= M; ++k) {
            const int mB = mesh.half_intervals[k][q];
            const int mA = (k == 1) ? 0 : mesh.half_intervals[k - 1][q];
            if (spec.symmetric) {
                std::vector<double> sA(mA + 1), sB(mB + 1);
                for (int i = 0; i <= mA; ++i) sA[i] = (k == 1) ? 0.5 : sigma_of(q, k - 1, i);
                for (int i = 0; i <= mB; ++i) sB[i] = sigma_of(q, k, i);
                std::vector<std::array<RingRef, 3>> half;
                zip_rows(k - 1, sA, k, sB, [&](RingRef a, RingRef b, RingRef c) {
                    half.push_back({a, b, c});
                });
                auto mirror = [&](RingRef r) -> RingRef {
                    if (r.ring == 0) return r;
                    return {r.ring, 2 * mesh.half_intervals[r.ring][q] - r.idx};
                };
                for (const auto& t : half)
                    mesh.triangles.push_back({id_of(t[0]), id_of(t[1]), id_of(t[2])});
                for (const auto& t : half)
                    mesh.triangles.push_back({id_of(mirror(t[0])), id_of(mirror(t[2])), id_of(mirror(t[1]))});
            } else {
                std::vector<double> sA(2 * mA + 1), sB(2 * mB + 1);
                for (int i = 0; i <= 2 * mA; ++i) sA[i] = (k == 1) ? 0.5 : sigma_of(q, k - 1, i);
                for (int i = 0; i <= 2 * mB; ++i) sB[i] = sigma_of(q, k, i);
                if (k == 1) sA = {0.5};
                zip_rows(k - 1, sA, k, sB, [&](RingRef a, RingRef b, RingRef c) {
                    mesh.triangles.push_back({id_of(a), id_of(b), id_of(c)});
                });
            }
        }
    }

    mesh.finalize();

    std::vector<std::vector<int>> perms;
    if (mesh.dihedral) {
        perms.push_back(mesh.symmetry_permutation(TriMesh::Symmetry::Rot90));
        perms.push_back(mesh.symmetry_permutation(TriMesh::Symmetry::MirrorDiagonal));
    } else if (!spec.full && spec.symmetric) {
        // quadrant mesh: mirror across its bisector {x2 = 0}
        std::vector<int> perm(mesh.nodes.size());
        perm[mesh.center_node] = mesh.center_node;
        for (int k = 1; k <= M; ++k) {
            const int m = mesh.half_intervals[k][0];
            for (int i = 0; i <= 2 * m; ++i)
                perm[mesh.ring_ids[k][0][i]] = mesh.ring_ids[k][0][2 * m - i];
        }
        perms.push_back(std::move(perm));
    }
    delaunay_flip_pass(mesh, perms);
    return mesh;
}

}  // namespace

TriMesh triangulate(const ScherkQuadrilateral& domain, const RefinementConfig& cfg) {
    cfg.validate();
    const bool ideal = domain.ideal();

    GeneratorSpec spec;
    spec.kind = TriMesh::Kind::Quadrilateral;
    spec.full = true;
    spec.edge_tag = {NodeTag::A1, NodeTag::B1, NodeTag::A2, NodeTag::B2};

    bool symmetric = true;
    if (ideal) {
        for (int k = 0; k < 4; ++k) {
            if (!is_ideal(domain.vertices[k])) { symmetric = false; break; }
            const double want = kPi / 4.0 + k * kPi / 2.0;
            if (std::abs(std::get<IdealVertex>(domain.vertices[k]).angle - want) > 1e-12)
                symmetric = false;
        }
        if (!symmetric)
            throw std::invalid_argument("triangulate: only the symmetric ideal family is supported");
    } else {
        for (int k = 0; k < 4; ++k)
            if (is_ideal(domain.vertices[k])) symmetric = false;
        if (symmetric) {
            const auto& v0 = std::get<ModelPoint>(domain.vertices[0]);
            if (v0.c1 != v0.c2 || !(v0.c1 > 0.0)) symmetric = false;
            for (int k = 1; k < 4 && symmetric; ++k) {
                const auto& v = std::get<ModelPoint>(domain.vertices[k]);
                const Vec2 want = rotq({v0.c1, v0.c2}, k);
                if (v.c1 != want.x || v.c2 != want.y) symmetric = false;
            }
        }
    }
    spec.symmetric = symmetric;

    const double h_b = cfg.grading * cfg.h;
    const double trunc_radius = 1.0 - cfg.truncation_delta;

    if (ideal) {
        const double s = trunc_radius * std::sqrt(0.5);
        spec.plan[0] = plan_quadrant(
            trim_ideal_curve(domain.edges[0], {s, -s}, {s, s}, trunc_radius, h_b), h_b);
        spec.corner_tag = {NodeTag::Trunc, NodeTag::Trunc, NodeTag::Trunc, NodeTag::Trunc};
    } else if (symmetric) {
        const auto& v0 = std::get<ModelPoint>(domain.vertices[0]);
        const Vec2 c1{v0.c1, v0.c2};
        const Vec2 c0{c1.x, -c1.y};  // vertex shared with B2, mirror of v0
        spec.plan[0] = plan_quadrant(curve_from_arc(domain.edges[0], c0, c1), h_b);
        spec.corner_tag = {NodeTag::Gamma2, NodeTag::Gamma1, NodeTag::Gamma2, NodeTag::Gamma1};
    } else {
        for (int q = 0; q < 4; ++q) {
            const auto& a = std::get<ModelPoint>(domain.vertices[(q + 3) % 4]);
            const auto& b = std::get<ModelPoint>(domain.vertices[q]);
            if (norm({a.c1, a.c2}) < 0.05 || norm({b.c1, b.c2}) < 0.05 ||
                cross({a.c1, a.c2}, {b.c1, b.c2}) <= 0.0)
                throw std::invalid_argument("triangulate: degenerate domain (not star-shaped about the origin)");
            spec.plan[q] = plan_quadrant(
                curve_from_arc(domain.edges[q], {a.c1, a.c2}, {b.c1, b.c2}), h_b);
            const bool on_diag = std::abs(std::abs(a.c1) - std::abs(a.c2)) < 1e-14;
            spec.corner_tag[q] = !on_diag       ? spec.edge_tag[q]
                                 : (q % 2 == 0) ? NodeTag::Gamma2
                                                : NodeTag::Gamma1;
        }
    }

    if (symmetric)
        for (int q = 1; q < 4; ++q) spec.plan[q] = spec.plan[0];

    TriMesh mesh = generate(spec, cfg);
    for (const auto& e : domain.edges) mesh.boundary_geodesics.push_back(e);
    if (ideal) mesh.trunc_radius = trunc_radius;
    return mesh;
}

TriMesh triangulate_quadrant(const RefinementConfig& cfg) {
    cfg.validate();
    GeneratorSpec spec;
    spec.kind = TriMesh::Kind::Quadrant;
    spec.full = false;
    spec.symmetric = true;
    spec.plan[0] = plan_quadrant(sector_curve(1.0 - cfg.truncation_delta), cfg.grading * cfg.h);
    spec.edge_tag = {NodeTag::Trunc, NodeTag::Trunc, NodeTag::Trunc, NodeTag::Trunc};
    spec.corner_tag = {NodeTag::Gamma2, NodeTag::Gamma2, NodeTag::Gamma2, NodeTag::Gamma2};
    TriMesh mesh = generate(spec, cfg);
    mesh.trunc_radius = 1.0 - cfg.truncation_delta;
    const double s = std::sqrt(0.5);
    mesh.boundary_geodesics.push_back(
        geodesic_between(IdealVertex::at(kPi / 4.0), IdealVertex::at(5.0 * kPi / 4.0)));
    mesh.boundary_geodesics.push_back(
        geodesic_between(IdealVertex::at(-kPi / 4.0), IdealVertex::at(3.0 * kPi / 4.0)));
    (void)s;
    return mesh;
}

TriMesh triangulate_disk(const RefinementConfig& cfg) {
    cfg.validate();
    GeneratorSpec spec;
    spec.kind = TriMesh::Kind::Disk;
    spec.full = true;
    spec.symmetric = true;
    spec.plan[0] = plan_quadrant(sector_curve(1.0 - cfg.truncation_delta), cfg.grading * cfg.h);
    for (int q = 1; q < 4; ++q) spec.plan[q] = spec.plan[0];
    spec.edge_tag = {NodeTag::Trunc, NodeTag::Trunc, NodeTag::Trunc, NodeTag::Trunc};
    spec.corner_tag = {NodeTag::Trunc, NodeTag::Trunc, NodeTag::Trunc, NodeTag::Trunc};
    TriMesh mesh = generate(spec, cfg);
    mesh.trunc_radius = 1.0 - cfg.truncation_delta;
    return mesh;
}

TriMesh extract_quadrant(const TriMesh& full, std::vector<int>* node_map) {
    if (!full.full_domain)
        throw std::logic_error("extract_quadrant: mesh already covers a single quadrant");

    TriMesh sub;
    sub.kind = TriMesh::Kind::Quadrant;
    sub.h = full.h;
    sub.grading = full.grading;
    sub.full_domain = false;
    sub.dihedral = false;
    sub.rings = full.rings;
    sub.trunc_radius = full.trunc_radius;
    sub.boundary_geodesics.push_back(
        geodesic_between(IdealVertex::at(kPi / 4.0), IdealVertex::at(5.0 * kPi / 4.0)));
    sub.boundary_geodesics.push_back(
        geodesic_between(IdealVertex::at(-kPi / 4.0), IdealVertex::at(3.0 * kPi / 4.0)));

    std::vector<int> to_sub(full.nodes.size(), -1);
    auto add = [&](int full_id, NodeTag tag) {
        if (to_sub[full_id] >= 0) return to_sub[full_id];
        to_sub[full_id] = sub.node_count();
        sub.nodes.push_back(full.nodes[full_id]);
        sub.node_tag.push_back(tag);
        if (node_map) node_map->push_back(full_id);
        return to_sub[full_id];
    };

    if (node_map) node_map->clear();
    sub.center_node = add(full.center_node, NodeTag::Gamma1);
    sub.half_intervals.assign(full.rings + 1, {0, 0, 0, 0});
    sub.ring_ids.assign(full.rings + 1, {});
    sub.gamma1_nodes.push_back(sub.center_node);
    sub.gamma2_nodes.push_back(sub.center_node);
    for (int k = 1; k <= full.rings; ++k) {
        const int m = full.half_intervals[k][0];
        sub.half_intervals[k][0] = m;
        sub.ring_ids[k][0].resize(2 * m + 1);
        for (int i = 0; i <= 2 * m; ++i) {
            const int fid = full.ring_ids[k][0][i];
            NodeTag tag = full.node_tag[fid];
            if (i == 0) tag = NodeTag::Gamma2;
            else if (i == 2 * m) tag = NodeTag::Gamma1;
            sub.ring_ids[k][0][i] = add(fid, tag);
        }
        sub.gamma2_nodes.push_back(sub.ring_ids[k][0][0]);
        sub.gamma1_nodes.push_back(sub.ring_ids[k][0][2 * m]);
    }
    for (const auto& tr : full.triangles) {
        if (to_sub[tr[0]] < 0 || to_sub[tr[1]] < 0 || to_sub[tr[2]] < 0) continue;
        sub.triangles.push_back({to_sub[tr[0]], to_sub[tr[1]], to_sub[tr[2]]});
    }
    sub.finalize();
    return sub;
}

// ---------------------------------------------------------------------------
// TriMesh methods
// ---------------------------------------------------------------------------

double TriMesh::triangle_area(int t) const {
    const auto& tr = triangles[t];
    return 0.5 * cross(nodes[tr[1]] - nodes[tr[0]], nodes[tr[2]] - nodes[tr[0]]);
}

Vec2 TriMesh::centroid(int t) const {
    const auto& tr = triangles[t];
    return (1.0 / 3.0) * (nodes[tr[0]] + nodes[tr[1]] + nodes[tr[2]]);
}

void TriMesh::finalize() {
    node_triangles.assign(nodes.size(), {});
    for (int t = 0; t < triangle_count(); ++t) {
        if (!(triangle_area(t) > 0.0)) {
            const auto& tr = triangles[t];
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "TriMesh: nonpositive triangle orientation at (%.6f,%.6f)(%.6f,%.6f)(%.6f,%.6f)",
                          nodes[tr[0]].x, nodes[tr[0]].y, nodes[tr[1]].x, nodes[tr[1]].y,
                          nodes[tr[2]].x, nodes[tr[2]].y);
            throw std::runtime_error(buf);
        }
        for (int j = 0; j < 3; ++j) node_triangles[triangles[t][j]].push_back(t);
    }
    node_neighbors.assign(nodes.size(), {});
    for (const auto& tr : triangles)
        for (int j = 0; j < 3; ++j) {
            node_neighbors[tr[j]].push_back(tr[(j + 1) % 3]);
            node_neighbors[tr[(j + 1) % 3]].push_back(tr[j]);
        }
    for (auto& nb : node_neighbors) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    grid_.clear();
}

void TriMesh::build_grid() const {
    grid_n_ = std::max(8, int(1.0 / std::max(h, 5e-4)));
    grid_x0_ = -1.0;
    grid_y0_ = -1.0;
    grid_cell_ = 2.0 / grid_n_;
    grid_.assign(std::size_t(grid_n_) * grid_n_, {});
    for (int t = 0; t < triangle_count(); ++t) {
        const auto& tr = triangles[t];
        double xmin = 2, xmax = -2, ymin = 2, ymax = -2;
        for (int j = 0; j < 3; ++j) {
            xmin = std::min(xmin, nodes[tr[j]].x);
            xmax = std::max(xmax, nodes[tr[j]].x);
            ymin = std::min(ymin, nodes[tr[j]].y);
            ymax = std::max(ymax, nodes[tr[j]].y);
        }
        const int i0 = std::clamp(int((xmin - grid_x0_) / grid_cell_), 0, grid_n_ - 1);
        const int i1 = std::clamp(int((xmax - grid_x0_) / grid_cell_), 0, grid_n_ - 1);
        const int j0 = std::clamp(int((ymin - grid_y0_) / grid_cell_), 0, grid_n_ - 1);
        const int j1 = std::clamp(int((ymax - grid_y0_) / grid_cell_), 0, grid_n_ - 1);
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                grid_[std::size_t(j) * grid_n_ + i].push_back(t);
    }
}

bool TriMesh::try_locate(Vec2 p, Located& out) const {
    if (grid_.empty()) build_grid();
    auto test = [&](int t) {
        const auto& tr = triangles[t];
        const Vec2 a = nodes[tr[0]], b = nodes[tr[1]], c = nodes[tr[2]];
        const double det = cross(b - a, c - a);
        const double l1 = cross(p - a, c - a) / det;
        const double l2 = cross(b - a, p - a) / det;
        const double l0 = 1.0 - l1 - l2;
        const double tol = -1e-12;
        if (l0 < tol || l1 < tol || l2 < tol) return false;
        out.triangle = t;
        out.bary = {l0, l1, l2};
        return true;
    };
    const int i = std::clamp(int((p.x - grid_x0_) / grid_cell_), 0, grid_n_ - 1);
    const int j = std::clamp(int((p.y - grid_y0_) / grid_cell_), 0, grid_n_ - 1);
    for (int t : grid_[std::size_t(j) * grid_n_ + i])
        if (test(t)) return true;
    return false;
}

Located TriMesh::locate(Vec2 p) const {
    Located out;
    if (!try_locate(p, out))
        throw std::invalid_argument("TriMesh::locate: point outside the mesh");
    return out;
}

std::vector<int> TriMesh::symmetry_permutation(Symmetry op) const {
    if (!dihedral)
        throw std::logic_error("symmetry_permutation: mesh has no exact dihedral structure");
    std::vector<int> perm(nodes.size(), -1);
    perm[center_node] = center_node;
    for (int k = 1; k <= rings; ++k)
        for (int q = 0; q < 4; ++q) {
            const int m = half_intervals[k][q];
            for (int i = 0; i <= 2 * m; ++i) {
                int qq = q, ii = i;
                switch (op) {
                    case Symmetry::Rot90: qq = (q + 1) % 4; break;
                    case Symmetry::MirrorDiagonal:   // (x1,x2) -> (x2,x1)
                        qq = ((1 - q) % 4 + 4) % 4;
                        ii = 2 * m - i;
                        break;
                    case Symmetry::MirrorHorizontal:  // (x1,x2) -> (x1,-x2)
                        qq = (4 - q) % 4;
                        ii = 2 * m - i;
                        break;
                }
                perm[ring_ids[k][q][i]] = ring_ids[k][qq][ii];
            }
        }
    return perm;
}

double TriMesh::boundary_distance(Vec2 p) const {
    double d = std::numeric_limits<double>::infinity();
    const ModelPoint mp = ModelPoint::disk(p.x, p.y);
    for (const auto& arc : boundary_geodesics)
        d = std::min(d, distance_to_geodesic(arc, mp));
    if (trunc_radius > 0.0)
        d = std::min(d, std::abs(2.0 * std::atanh(norm(p)) - 2.0 * std::atanh(trunc_radius)));
    return d;
}

TriMesh::Quality TriMesh::quality() const {
    Quality qy;
    for (int t = 0; t < triangle_count(); ++t) {
        const auto& tr = triangles[t];
        const bool margin = boundary_distance(centroid(t)) < 0.3;
        double& slot = margin ? qy.min_margin_angle_deg : qy.min_angle_deg;
        for (int j = 0; j < 3; ++j) {
            const Vec2 a = nodes[tr[j]], b = nodes[tr[(j + 1) % 3]], c = nodes[tr[(j + 2) % 3]];
            const double ang = std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a)) * 180.0 / kPi;
            slot = std::min(slot, ang);
            qy.max_angle_deg = std::max(qy.max_angle_deg, ang);
        }
    }
    return qy;
}

double TriMesh::boundary_polygon_area() const {
    std::map<std::pair<int, int>, int> count;
    for (const auto& tr : triangles)
        for (int j = 0; j < 3; ++j) {
            const int a = tr[j], b = tr[(j + 1) % 3];
            count[{std::min(a, b), std::max(a, b)}]++;
        }
    double area = 0.0;
    for (const auto& tr : triangles)
        for (int j = 0; j < 3; ++j) {
            const int a = tr[j], b = tr[(j + 1) % 3];
            if (count[{std::min(a, b), std::max(a, b)}] == 1)
                area += 0.5 * cross(nodes[a], nodes[b]);
        }
    return area;
}

}  // namespace scherk
