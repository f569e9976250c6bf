#include "scherk/hyperbolic.hpp"

#include <algorithm>

namespace scherk {

using cplx = std::complex<double>;

ModelPoint ModelPoint::disk(double x1, double x2) {
    if (x1 * x1 + x2 * x2 >= 1.0)
        throw std::invalid_argument("ModelPoint::disk: point not strictly inside the unit disk");
    return {Chart::Disk, x1, x2};
}

ModelPoint ModelPoint::half_plane(double x, double y) {
    if (!(y > 0.0))
        throw std::invalid_argument("ModelPoint::half_plane: requires y > 0");
    return {Chart::HalfPlane, x, y};
}

IdealVertex IdealVertex::at(double angle) {
    double a = std::fmod(angle, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return {a};
}

// ---------------------------------------------------------------------------
// Chart transition
// ---------------------------------------------------------------------------

ModelPoint to_half_plane(const ModelPoint& p) {
    if (p.chart == Chart::HalfPlane) return p;
    const double a = p.c1, b = p.c2;
    const double rr = a * a + b * b;
    if (rr >= 1.0)
        throw std::invalid_argument("to_half_plane: |p| >= 1");
    const double den = (1.0 + a) * (1.0 + a) + b * b;
    return ModelPoint::half_plane(2.0 * b / den, (1.0 - rr) / den);
}

ModelPoint to_disk(const ModelPoint& p) {
    if (p.chart == Chart::Disk) return p;
    const double x = p.c1, y = p.c2;
    const double den = x * x + (1.0 + y) * (1.0 + y);
    return ModelPoint::disk((1.0 - x * x - y * y) / den, 2.0 * x / den);
}

std::complex<double> cayley_derivative(Vec2 w) {
    // z(w) = i (1 - w)/(1 + w), dz/dw = -2i/(1+w)^2
    const cplx one_plus_w(1.0 + w.x, w.y);
    return cplx(0.0, -2.0) / (one_plus_w * one_plus_w);
}

std::pair<double, bool> ideal_to_half_plane(const IdealVertex& v) {
    // e^{i phi} -> tan(phi/2); phi = pi is the point at infinity.
    const cplx w = std::polar(1.0, v.angle);
    if (std::abs(1.0 + w) < 1e-12) return {0.0, true};
    return {std::tan(v.angle / 2.0), false};
}

double hyperbolic_distance(const ModelPoint& p, const ModelPoint& q) {
    if (p.chart != q.chart)
        return hyperbolic_distance(to_disk(p), to_disk(q));
    const double dx = p.c1 - q.c1, dy = p.c2 - q.c2;
    const double chord2 = dx * dx + dy * dy;
    if (p.chart == Chart::Disk) {
        const double sp = 1.0 - p.c1 * p.c1 - p.c2 * p.c2;
        const double sq = 1.0 - q.c1 * q.c1 - q.c2 * q.c2;
        return 2.0 * std::asinh(std::sqrt(chord2 / (sp * sq)));
    }
    return 2.0 * std::asinh(0.5 * std::sqrt(chord2 / (p.c2 * q.c2)));
}

// ---------------------------------------------------------------------------
// Isometries
// ---------------------------------------------------------------------------

namespace {

void normalize_det(MobiusIsometry& g) {
    const double det = g.a * g.d - g.b * g.c;
    if (!(det > 0.0))
        throw std::invalid_argument("MobiusIsometry: coefficient matrix must have positive determinant");
    const double s = 1.0 / std::sqrt(det);
    g.a *= s; g.b *= s; g.c *= s; g.d *= s;
}

}  // namespace

MobiusIsometry MobiusIsometry::taking_to_center(const ModelPoint& p) {
    const ModelPoint h = to_half_plane(p);
    const double sy = std::sqrt(h.c2);
    return {1.0 / sy, -h.c1 / sy, 0.0, sy, false};
}

MobiusIsometry MobiusIsometry::rotation_about_center(double phi) {
    // Elliptic element fixing (0,1); rotates its tangent plane by phi,
    // matching the rotation by phi about the disk origin.
    const double c = std::cos(phi / 2.0), s = std::sin(phi / 2.0);
    return {c, s, -s, c, false};
}

MobiusIsometry MobiusIsometry::reflection_across_axis() {
    return {1.0, 0.0, 0.0, 1.0, true};
}

std::complex<double> MobiusIsometry::act(cplx z) const {
    if (reflection) z = -std::conj(z);
    return (a * z + b) / (c * z + d);
}

std::complex<double> MobiusIsometry::derivative(cplx z) const {
    if (reflection) z = -std::conj(z);
    const cplx den = c * z + d;
    return 1.0 / (den * den);
}

std::complex<double> MobiusIsometry::second_derivative(cplx z) const {
    if (reflection) z = -std::conj(z);
    const cplx den = c * z + d;
    return -2.0 * c / (den * den * den);
}

MobiusIsometry compose(const MobiusIsometry& g1, const MobiusIsometry& g2) {
    // g1 o g2.  When g1 carries a reflection, conjugate g2 by diag(1,-1).
    double a2 = g2.a, b2 = g2.b, c2 = g2.c, d2 = g2.d;
    if (g1.reflection) { b2 = -b2; c2 = -c2; }
    MobiusIsometry r{g1.a * a2 + g1.b * c2, g1.a * b2 + g1.b * d2,
                     g1.c * a2 + g1.d * c2, g1.c * b2 + g1.d * d2,
                     g1.reflection != g2.reflection};
    normalize_det(r);
    return r;
}

MobiusIsometry inverse(const MobiusIsometry& g) {
    if (!g.reflection) return {g.d, -g.b, -g.c, g.a, false};
    return {g.d, g.b, g.c, g.a, true};
}

ModelPoint apply_isometry(const MobiusIsometry& g, const ModelPoint& p) {
    const ModelPoint h = to_half_plane(p);
    const cplx z = g.act(cplx(h.c1, h.c2));
    if (!(z.imag() > 0.0))
        throw std::invalid_argument("apply_isometry: degenerate image");
    const ModelPoint out = ModelPoint::half_plane(z.real(), z.imag());
    return p.chart == Chart::Disk ? to_disk(out) : out;
}

MobiusIsometry isometry_taking(const ModelPoint& p) {
    return MobiusIsometry::taking_to_center(p);
}

// ---------------------------------------------------------------------------
// Geodesics
// ---------------------------------------------------------------------------

namespace {

Vec2 endpoint_coords(const BoundaryPoint& p) {
    if (const auto* m = std::get_if<ModelPoint>(&p)) {
        if (m->chart != Chart::Disk) {
            const ModelPoint d = to_disk(*m);
            return {d.c1, d.c2};
        }
        return {m->c1, m->c2};
    }
    return std::get<IdealVertex>(p).circle_point();
}

double wrap_pi(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

}  // namespace

Vec2 GeodesicArc::point_at(double s) const {
    if (s == 0.0) return endpoint_coords(p);
    if (s == 1.0) return endpoint_coords(q);
    if (is_diameter) {
        const double t = (1.0 - s) * t0 + s * t1;
        return {t * direction.x, t * direction.y};
    }
    const double psi = t0 + s * wrap_pi(t1 - t0);
    return {center.x + radius * std::cos(psi), center.y + radius * std::sin(psi)};
}

double GeodesicArc::euclidean_length() const {
    if (is_diameter) return std::abs(t1 - t0);
    return radius * std::abs(wrap_pi(t1 - t0));
}

GeodesicArc geodesic_between(const BoundaryPoint& p, const BoundaryPoint& q) {
    const Vec2 zp = endpoint_coords(p), zq = endpoint_coords(q);
    if (norm(zp - zq) < 1e-14)
        throw std::invalid_argument("geodesic_between: coincident endpoints");

    GeodesicArc arc;
    arc.p = p;
    arc.q = q;

    // Circle through both points orthogonal to the unit circle:
    //   2 <c, z_i> = 1 + |z_i|^2.  Degenerate iff 0, z_p, z_q are collinear.
    const double rp = dot(zp, zp), rq = dot(zq, zq);
    const double det = 4.0 * cross(zp, zq);
    const double scale = std::max({1.0, std::abs(rp), std::abs(rq)});
    if (std::abs(det) < 1e-13 * scale) {
        arc.is_diameter = true;
        Vec2 dir = zq - zp;
        const double n = norm(dir);
        arc.direction = {dir.x / n, dir.y / n};
        arc.t0 = dot(zp, arc.direction);
        arc.t1 = dot(zq, arc.direction);
        return arc;
    }

    const double bp = 1.0 + rp, bq = 1.0 + rq;
    arc.center = {(bp * 2.0 * zq.y - bq * 2.0 * zp.y) / det,
                  (bq * 2.0 * zp.x - bp * 2.0 * zq.x) / det};
    arc.radius = std::sqrt(dot(arc.center, arc.center) - 1.0);
    arc.t0 = std::atan2(zp.y - arc.center.y, zp.x - arc.center.x);
    arc.t1 = std::atan2(zq.y - arc.center.y, zq.x - arc.center.x);
    return arc;
}

EdgeLength edge_length(const GeodesicArc& arc) {
    if (is_ideal(arc.p) || is_ideal(arc.q)) return EdgeLength::infinite();
    return EdgeLength::of(hyperbolic_distance(std::get<ModelPoint>(arc.p),
                                              std::get<ModelPoint>(arc.q)));
}

double distance_to_geodesic(const GeodesicArc& arc, const ModelPoint& p) {
    const ModelPoint d = to_disk(p);
    const Vec2 z{d.c1, d.c2};
    const double conf = 1.0 - dot(z, z);
    double s;
    if (arc.is_diameter) {
        s = 2.0 * std::abs(cross(arc.direction, z)) / conf;
    } else {
        const Vec2 w = z - arc.center;
        s = std::abs(dot(w, w) - arc.radius * arc.radius) / (arc.radius * conf);
    }
    return std::asinh(s);
}

// ---------------------------------------------------------------------------
// Scherk quadrilaterals
// ---------------------------------------------------------------------------

bool ScherkQuadrilateral::ideal() const {
    for (const auto& v : vertices)
        if (is_ideal(v)) return true;
    return false;
}

ScherkQuadrilateral quadrilateral_from_vertices(const std::array<BoundaryPoint, 4>& vs) {
    ScherkQuadrilateral q;
    q.vertices = vs;
    // Edge k runs from vertices[(k+3)%4] to vertices[k]: A1 = v3 -> v0, ...
    for (int k = 0; k < 4; ++k)
        q.edges[k] = geodesic_between(vs[(k + 3) % 4], vs[k]);
    return q;
}

ScherkQuadrilateral build_symmetric_domain(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("build_symmetric_domain: lambda must be positive");

    std::array<BoundaryPoint, 4> vs;
    if (std::isinf(lambda)) {
        vs = {IdealVertex::at(kPi / 4.0), IdealVertex::at(3.0 * kPi / 4.0),
              IdealVertex::at(5.0 * kPi / 4.0), IdealVertex::at(7.0 * kPi / 4.0)};
    } else {
        const double rho = std::tanh(lambda / 2.0);
        const double s = rho * std::sqrt(0.5);  // identical coordinates put the
                                                // vertices exactly on {x1=+-x2}
        vs = {ModelPoint::disk(s, s), ModelPoint::disk(-s, s),
              ModelPoint::disk(-s, -s), ModelPoint::disk(s, -s)};
    }
    ScherkQuadrilateral q = quadrilateral_from_vertices(vs);
    q.lambda = lambda;
    return q;
}

EquilibriumReport check_equilibrium(const ScherkQuadrilateral& q) {
    std::array<EdgeLength, 4> len;
    for (int k = 0; k < 4; ++k) {
        len[k] = edge_length(q.edges[k]);
        if (!len[k].finite)
            return {EquilibriumReport::Status::NotCheckableByLengths, 0.0};
    }
    const double residual = std::abs(len[0].value + len[2].value -
                                     len[1].value - len[3].value);
    return {residual < 1e-9 ? EquilibriumReport::Status::Balanced
                            : EquilibriumReport::Status::Unbalanced,
            residual};
}

}  // namespace scherk
