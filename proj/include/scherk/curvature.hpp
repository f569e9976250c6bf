#pragma once

#include <array>
#include <vector>

#include "scherk/hyperbolic.hpp"
#include "scherk/mesh.hpp"
#include "scherk/solver.hpp"

namespace scherk {

/// Second-order Taylor data of a graph function at a half-plane point.
struct Jet2 {
    double x = 0.0, y = 1.0;  // base point, y > 0
    double u = 0.0;
    double ux = 0.0, uy = 0.0;
    double uxx = 0.0, uxy = 0.0, uyy = 0.0;

    double W() const { return std::sqrt(1.0 + y * y * (ux * ux + uy * uy)); }
};

/// Left-hand side of the expanded minimal-graph equation in the half-plane
/// chart; zero for exact solutions.
double minimal_equation_residual(const Jet2& j);

/// Weighted least-squares quadratic fit of a nodal field over a two-ring
/// patch around p (disk chart), returned as a half-plane jet.  Exact for
/// fields that are quadratic in the half-plane coordinates.
Jet2 fit_jet(const TriMesh& mesh, const std::vector<double>& values, Vec2 p);

/// Fit at a mesh node using its own two-ring neighborhood.
Jet2 fit_jet_at_node(const TriMesh& mesh, const std::vector<double>& values, int node);

struct FundamentalForm {
    double raw_xx = 0.0, raw_xy = 0.0, raw_yy = 0.0;  // the (1/yW)(...) brackets
    double l = 0.0, m = 0.0, n = 0.0;  // coefficients in the {X, Y} basis
    std::array<double, 3> normal{};    // upward unit normal (chart components)
};

FundamentalForm second_fundamental_form(const Jet2& j);

/// det of the shape operator from the closed-form bracket expression.
double extrinsic_curvature(const Jet2& j);

/// Jet of the moved graph u o g^{-1} at the image of the base point
/// (orientation-preserving isometries only).
Jet2 transport_jet(const Jet2& j, const MobiusIsometry& g);

struct NormalizedJet {
    Jet2 jet;                 // base (0,1), uy = 0, ux >= 0
    MobiusIsometry forward;   // the isometry that was applied
};

/// Transport to the normalization point: base to (0,1), then a rotation about
/// the vertical axis making uy = 0 and ux >= 0.
NormalizedJet normalize_jet(const Jet2& j);

struct NormalizedCurvature {
    double kext = 0.0;
    double k1 = 0.0;
    double Tu = 0.0;            // u_xy + u_x at the normalization point
    double lemma_defect = 0.0;  // |u_xx + W^2 u_yy| there
};

/// Curvature from the normalized-point closed form; requires a jet already
/// at (0,1) with uy = 0 that satisfies the minimal equation to 1e-6.
NormalizedCurvature normalized_curvature_at_p(const Jet2& j);

/// Everything the verification layer needs about one point of a graph.
struct ShapeData {
    Jet2 jet;           // original input jet
    double W = 1.0;
    double nu = 1.0;    // 1/W
    double kext = 0.0;
    double k1 = 0.0;
    double Tu = 0.0;    // normalized-point quantities
    double uyy_n = 0.0;
    std::array<double, 2> dir1{}, dir2{};  // {X,Y} basis at the normalized point
    double theta = 0.0;        // oriented angle from V2 to pi(d_t), canonical sign
    double chart_angle = 0.0;  // chart direction of V1's horizontal part at the base
    bool frame_valid = false;  // false at umbilic points
    bool theta_valid = false;  // false when the tangent plane is horizontal
};

ShapeData analyze_jet(const Jet2& j);

struct PrincipalFrame {
    double k1 = 0.0;
    std::array<double, 2> dir1{}, dir2{};
};

/// Principal frame from the 2x2 eigen system at the normalization point;
/// throws at umbilic points.
PrincipalFrame principal_frame(const Jet2& j);

/// Per-solution geometry fields: nodal jets, nu, K_ext, and a continuous
/// principal frame propagated breadth-first from the nu-maximum, anchored so
/// that the first principal direction at the anchor points along +x1 in the
/// disk chart.
class SurfaceGeometry {
  public:
    static SurfaceGeometry build(const ScalarField& u);

    const TriMesh& mesh() const { return *mesh_; }
    const std::vector<double>& nu() const { return nu_; }
    const std::vector<double>& kext() const { return kext_; }
    const std::vector<double>& k1() const { return k1_; }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<char>& node_valid() const { return valid_; }
    int anchor_node() const { return anchor_; }

    /// Anchored oriented theta at an arbitrary interior point.
    double theta_at(Vec2 p) const;
    /// Shape data at an arbitrary interior point with the anchored sign.
    ShapeData shape_at(Vec2 p) const;

  private:
    const TriMesh* mesh_ = nullptr;
    const std::vector<double>* values_ = nullptr;
    std::vector<double> nu_, kext_, k1_, theta_, chart_angle_;
    std::vector<char> valid_, flipped_, theta_ok_;
    int anchor_ = -1;

    double aligned_theta(const ShapeData& s, Vec2 p) const;
};

}  // namespace scherk
