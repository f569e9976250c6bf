#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace scherk {

constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

enum class Chart { Disk, HalfPlane };

/// A point of the hyperbolic plane in one of the two conformal charts.
/// Disk chart: c1^2 + c2^2 < 1.  Half-plane chart: c2 > 0.  Both strict.
struct ModelPoint {
    Chart chart = Chart::Disk;
    double c1 = 0.0;
    double c2 = 0.0;

    static ModelPoint disk(double x1, double x2);
    static ModelPoint half_plane(double x, double y);
    Vec2 coords() const { return {c1, c2}; }
};

/// A point of the ideal boundary, stored as the angle of the unit-circle
/// point in the disk chart.  Kept separate from ModelPoint on purpose:
/// boundary points have no chart coordinates.
struct IdealVertex {
    double angle = 0.0;  // radians in [0, 2pi)

    static IdealVertex at(double angle);
    Vec2 circle_point() const { return {std::cos(angle), std::sin(angle)}; }
};

using BoundaryPoint = std::variant<ModelPoint, IdealVertex>;

inline bool is_ideal(const BoundaryPoint& p) {
    return std::holds_alternative<IdealVertex>(p);
}

// ---------------------------------------------------------------------------
// Chart transition.  The Cayley map used throughout the build is
//   z = i (1 - w) / (1 + w),   w = x1 + i x2 in the disk, z = x + i y,
// which sends the disk origin to (0,1).  Its inverse is w = (i - z)/(i + z).
// ---------------------------------------------------------------------------

ModelPoint to_half_plane(const ModelPoint& p);
ModelPoint to_disk(const ModelPoint& p);

/// Complex derivative dz/dw of the disk->half-plane map at a disk point.
std::complex<double> cayley_derivative(Vec2 disk_point);

/// Image of an ideal vertex on the boundary of the half-plane chart.
/// Returns the real-axis coordinate; the vertex at angle pi maps to infinity
/// (flagged by the bool).
std::pair<double, bool> ideal_to_half_plane(const IdealVertex& v);

/// Hyperbolic distance.  Mixed charts are converted internally.
double hyperbolic_distance(const ModelPoint& p, const ModelPoint& q);

// ---------------------------------------------------------------------------
// Isometries, represented in the half-plane chart as real fractional-linear
// maps z -> (a z + b)/(c z + d) with a d - b c = 1.  A reflection flag r
// makes the action z -> M(-conj(z)) instead.
// ---------------------------------------------------------------------------

struct MobiusIsometry {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    bool reflection = false;

    static MobiusIsometry identity() { return {}; }
    /// The isometry taking p to the half-plane point (0,1).
    static MobiusIsometry taking_to_center(const ModelPoint& p);
    /// Rotation by phi about the disk origin (elliptic about (0,1)).
    static MobiusIsometry rotation_about_center(double phi);
    /// Reflection across the half-plane geodesic {x = 0}.
    static MobiusIsometry reflection_across_axis();

    std::complex<double> act(std::complex<double> z) const;
    /// Complex derivative of the action at z (reflections: derivative of the
    /// holomorphic part, taken at -conj(z)).
    std::complex<double> derivative(std::complex<double> z) const;
    std::complex<double> second_derivative(std::complex<double> z) const;
};

MobiusIsometry compose(const MobiusIsometry& g1, const MobiusIsometry& g2);
MobiusIsometry inverse(const MobiusIsometry& g);
ModelPoint apply_isometry(const MobiusIsometry& g, const ModelPoint& p);
MobiusIsometry isometry_taking(const ModelPoint& p);

// ---------------------------------------------------------------------------
// Geodesics in the disk chart: diameters, or circular arcs meeting the unit
// circle at right angles.
// ---------------------------------------------------------------------------

/// Length with an explicit finite/infinite tag; no sentinel floats.
struct EdgeLength {
    bool finite = true;
    double value = 0.0;

    static EdgeLength of(double v) { return {true, v}; }
    static EdgeLength infinite() { return {false, 0.0}; }
};

struct GeodesicArc {
    BoundaryPoint p;
    BoundaryPoint q;

    // Cached carrier in the disk chart.
    bool is_diameter = false;
    Vec2 center{};       // circle case
    double radius = 0.0;
    Vec2 direction{};    // diameter case: unit direction of the chord

    // Endpoint parameters on the carrier: circle angles (circle case) or
    // signed offsets along `direction` (diameter case).
    double t0 = 0.0;
    double t1 = 0.0;

    /// Point on the arc, s in [0,1]; endpoints are reproduced exactly.
    Vec2 point_at(double s) const;
    /// Euclidean length of the arc in the disk chart.
    double euclidean_length() const;
};

GeodesicArc geodesic_between(const BoundaryPoint& p, const BoundaryPoint& q);
EdgeLength edge_length(const GeodesicArc& arc);

/// Distance from a point to the complete geodesic carrying the arc.
double distance_to_geodesic(const GeodesicArc& arc, const ModelPoint& p);

// ---------------------------------------------------------------------------
// Scherk quadrilaterals
// ---------------------------------------------------------------------------

enum class EdgeLabel { A1 = 0, B1 = 1, A2 = 2, B2 = 3 };

/// Geodesic quadrilateral with edges ordered [A1, B1, A2, B2]
/// counterclockwise; vertices[0] = A1 n B1, and edge k runs from
/// vertices[(k+3)%4] to vertices[k].
struct ScherkQuadrilateral {
    std::array<GeodesicArc, 4> edges;
    std::array<BoundaryPoint, 4> vertices;
    std::optional<double> lambda;  // half-diagonal of the symmetric family

    bool ideal() const;
};

/// The symmetric family D_lambda: vertices on {x1 = +-x2} at hyperbolic
/// distance lambda from the origin.  lambda = +infinity gives the ideal
/// quadrilateral with vertices at the diagonal boundary angles.
ScherkQuadrilateral build_symmetric_domain(double lambda);

/// Quadrilateral through four given vertices (counterclockwise, first
/// vertex = A1 n B1).
ScherkQuadrilateral quadrilateral_from_vertices(const std::array<BoundaryPoint, 4>& vs);

struct EquilibriumReport {
    enum class Status { Balanced, Unbalanced, NotCheckableByLengths };
    Status status = Status::Unbalanced;
    double residual = 0.0;

    bool balanced() const { return status == Status::Balanced; }
};

/// |len A1 + len A2 - len B1 - len B2| < 1e-9, or NotCheckableByLengths when
/// an edge is ideal.
EquilibriumReport check_equilibrium(const ScherkQuadrilateral& q);

}  // namespace scherk
