#include "scherk/curvature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace scherk {

double minimal_equation_residual(const Jet2& j) {
    const double y2 = j.y * j.y;
    return (1.0 + y2 * j.ux * j.ux) * j.uyy + (1.0 + y2 * j.uy * j.uy) * j.uxx -
           2.0 * y2 * j.ux * j.uy * j.uxy - j.y * j.uy * (j.ux * j.ux + j.uy * j.uy);
}

// ---------------------------------------------------------------------------
// Jet fitting
// ---------------------------------------------------------------------------

namespace {

Jet2 fit_jet_on_patch(const TriMesh& mesh, const std::vector<double>& values,
                      const std::vector<int>& patch, Vec2 p) {
    if (patch.size() < 6)
        throw std::invalid_argument("fit_jet: fewer than 6 nodes in the patch");

    const ModelPoint hp = to_half_plane(ModelPoint::disk(p.x, p.y));

    std::vector<double> xs(patch.size()), ys(patch.size());
    double radius = 0.0;
    for (std::size_t i = 0; i < patch.size(); ++i) {
        const Vec2 q = mesh.nodes[patch[i]];
        const ModelPoint hq = to_half_plane(ModelPoint::disk(q.x, q.y));
        xs[i] = hq.c1 - hp.c1;
        ys[i] = hq.c2 - hp.c2;
        radius = std::max(radius, std::hypot(xs[i], ys[i]));
    }
    if (radius == 0.0) throw std::invalid_argument("fit_jet: degenerate patch");

    Eigen::MatrixXd A(patch.size(), 6);
    Eigen::VectorXd rhs(patch.size());
    for (std::size_t i = 0; i < patch.size(); ++i) {
        const double xi = xs[i] / radius, eta = ys[i] / radius;
        const double w = 1.0 / (std::hypot(xi, eta) + 0.25);
        A.row(i) << w, w * xi, w * eta, w * 0.5 * xi * xi, w * xi * eta, w * 0.5 * eta * eta;
        rhs[i] = w * values[patch[i]];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < 6) throw std::invalid_argument("fit_jet: rank-deficient patch");
    const Eigen::VectorXd c = qr.solve(rhs);

    Jet2 j;
    j.x = hp.c1;
    j.y = hp.c2;
    j.u = c[0];
    j.ux = c[1] / radius;
    j.uy = c[2] / radius;
    j.uxx = c[3] / (radius * radius);
    j.uxy = c[4] / (radius * radius);
    j.uyy = c[5] / (radius * radius);
    return j;
}

std::vector<int> two_ring(const TriMesh& mesh, const std::vector<int>& seeds) {
    std::set<int> acc(seeds.begin(), seeds.end());
    for (int pass = 0; pass < 2; ++pass) {
        std::set<int> next = acc;
        for (int n : acc)
            for (int nb : mesh.node_neighbors[n]) next.insert(nb);
        acc.swap(next);
    }
    return {acc.begin(), acc.end()};
}

}  // namespace

Jet2 fit_jet(const TriMesh& mesh, const std::vector<double>& values, Vec2 p) {
    const Located l = mesh.locate(p);
    const auto& tr = mesh.triangles[l.triangle];
    const auto patch = two_ring(mesh, {tr[0], tr[1], tr[2]});
    return fit_jet_on_patch(mesh, values, patch, p);
}

Jet2 fit_jet_at_node(const TriMesh& mesh, const std::vector<double>& values, int node) {
    const auto patch = two_ring(mesh, {node});
    return fit_jet_on_patch(mesh, values, patch, mesh.nodes[node]);
}

double pde_residual(const ScalarField& u, Vec2 p) {
    return minimal_equation_residual(fit_jet(*u.mesh, u.values, p));
}

// ---------------------------------------------------------------------------
// Closed-form geometry at a jet
// ---------------------------------------------------------------------------

FundamentalForm second_fundamental_form(const Jet2& j) {
    const double W = j.W();
    FundamentalForm f;
    f.raw_xx = (j.y * j.uxx - j.uy) / (j.y * W);
    f.raw_xy = (j.y * j.uxy + j.ux) / (j.y * W);
    f.raw_yy = (j.y * j.uyy + j.uy) / (j.y * W);
    // normalization to {X, Y} = {F_x/|F_x|, F_y/|F_y|}
    const double fx2 = 1.0 / (j.y * j.y) + j.ux * j.ux;
    const double fy2 = 1.0 / (j.y * j.y) + j.uy * j.uy;
    f.l = f.raw_xx / fx2;
    f.m = f.raw_xy / std::sqrt(fx2 * fy2);
    f.n = f.raw_yy / fy2;
    f.normal = {-j.y * j.y * j.ux / W, -j.y * j.y * j.uy / W, 1.0 / W};
    return f;
}

double extrinsic_curvature(const Jet2& j) {
    const double W = j.W();
    const double y = j.y;
    return y * y / (W * W * W * W) *
           ((y * j.uxx - j.uy) * (y * j.uyy + j.uy) - (y * j.uxy + j.ux) * (y * j.uxy + j.ux));
}

Jet2 transport_jet(const Jet2& j, const MobiusIsometry& g) {
    if (g.reflection)
        throw std::invalid_argument("transport_jet: reflections are not supported");
    const std::complex<double> z(j.x, j.y);
    const std::complex<double> w = g.act(z);
    const MobiusIsometry psi = inverse(g);  // the moved graph is u o psi
    const std::complex<double> d = psi.derivative(w);
    const std::complex<double> d2 = psi.second_derivative(w);

    // real Jacobian of the holomorphic psi, and the Hessians of its parts
    Eigen::Matrix2d J, H1, H2;
    J << d.real(), -d.imag(), d.imag(), d.real();
    H1 << d2.real(), -d2.imag(), -d2.imag(), -d2.real();
    H2 << d2.imag(), d2.real(), d2.real(), -d2.imag();

    const Eigen::Vector2d grad(j.ux, j.uy);
    Eigen::Matrix2d H;
    H << j.uxx, j.uxy, j.uxy, j.uyy;

    const Eigen::Vector2d tg = J.transpose() * grad;
    const Eigen::Matrix2d tH = J.transpose() * H * J + j.ux * H1 + j.uy * H2;

    Jet2 out;
    out.x = w.real();
    out.y = w.imag();
    out.u = j.u;
    out.ux = tg[0];
    out.uy = tg[1];
    out.uxx = tH(0, 0);
    out.uxy = tH(0, 1);
    out.uyy = tH(1, 1);
    return out;
}

NormalizedJet normalize_jet(const Jet2& j) {
    const MobiusIsometry shift =
        MobiusIsometry::taking_to_center(ModelPoint::half_plane(j.x, j.y));
    Jet2 centered = transport_jet(j, shift);
    MobiusIsometry total = shift;
    const double gn = std::hypot(centered.ux, centered.uy);
    if (gn > 0.0) {
        // the gradient turns by +phi under the elliptic rotation by phi
        const double phi = std::atan2(centered.uy, centered.ux);
        const MobiusIsometry rot = MobiusIsometry::rotation_about_center(-phi);
        centered = transport_jet(centered, rot);
        total = compose(rot, shift);
    }
    return {centered, total};
}

NormalizedCurvature normalized_curvature_at_p(const Jet2& j) {
    if (std::abs(j.x) > 1e-12 || std::abs(j.y - 1.0) > 1e-12 || std::abs(j.uy) > 1e-9)
        throw std::invalid_argument("normalized_curvature_at_p: jet is not at the normalization point");
    const double scale =
        std::abs(j.uxx) + std::abs(j.uyy) + std::abs(j.uxy) + std::abs(j.ux) + 1.0;
    if (std::abs(minimal_equation_residual(j)) > 1e-6 * scale)
        throw std::invalid_argument("normalized_curvature_at_p: jet violates the minimal equation");

    NormalizedCurvature out;
    const double W = j.W();
    out.Tu = j.uxy + j.ux;
    out.kext = -(W * W * j.uyy * j.uyy + out.Tu * out.Tu) / (W * W * W * W);
    out.k1 = std::sqrt(-out.kext);
    out.lemma_defect = std::abs(j.uxx + W * W * j.uyy);
    return out;
}

// ---------------------------------------------------------------------------
// Principal frame and theta
// ---------------------------------------------------------------------------

namespace {

constexpr double kUmbilicK1 = 1e-12;

double wrap_2pi(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}

}  // namespace

ShapeData analyze_jet(const Jet2& j) {
    ShapeData s;
    s.jet = j;
    s.W = j.W();
    s.nu = 1.0 / s.W;
    s.kext = extrinsic_curvature(j);

    const NormalizedJet nj = normalize_jet(j);
    const Jet2& n = nj.jet;
    const double W = n.W();
    s.Tu = n.uxy + n.ux;
    s.uyy_n = n.uyy;
    s.k1 = std::sqrt(std::max(0.0, n.uyy * n.uyy / (W * W) + s.Tu * s.Tu / (W * W * W * W)));
    s.frame_valid = s.k1 > kUmbilicK1;
    if (!s.frame_valid) return s;

    // principal direction of +k1 in the {X,Y} basis, from the 2x2 system
    double a, b;
    if (std::abs(s.Tu) > 1e-14 * (W * std::abs(n.uyy) + std::abs(s.Tu))) {
        a = s.Tu;
        b = W * W * s.k1 + W * n.uyy;
    } else if (n.uyy > 0.0) {
        a = 0.0;
        b = 1.0;
    } else {
        a = 1.0;
        b = 0.0;
    }
    const double len = std::hypot(a, b);
    a /= len;
    b /= len;
    if (a < 0.0 || (a == 0.0 && b < 0.0)) {
        a = -a;
        b = -b;
    }
    s.dir1 = {a, b};
    s.dir2 = {-b, a};

    // pi(d_t) is proportional to +X at the normalized point when ux > 0
    s.theta_valid = n.ux > 1e-12;
    s.theta = s.theta_valid ? wrap_2pi(std::atan2(-a, -b)) : 0.0;

    // horizontal chart direction of V1 at the original base point
    const std::complex<double> h(a / W, b);
    const std::complex<double> back =
        inverse(nj.forward).derivative(std::complex<double>(0.0, 1.0));
    s.chart_angle = std::arg(back * h);
    return s;
}

PrincipalFrame principal_frame(const Jet2& j) {
    const ShapeData s = analyze_jet(j);
    if (!s.frame_valid)
        throw std::invalid_argument("principal_frame: umbilic point, no canonical frame");
    return {s.k1, s.dir1, s.dir2};
}

// ---------------------------------------------------------------------------
// SurfaceGeometry
// ---------------------------------------------------------------------------

SurfaceGeometry SurfaceGeometry::build(const ScalarField& u) {
    SurfaceGeometry g;
    g.mesh_ = u.mesh;
    g.values_ = &u.values;
    const TriMesh& mesh = *u.mesh;
    const int nn = mesh.node_count();
    g.nu_.assign(nn, 1.0);
    g.kext_.assign(nn, 0.0);
    g.k1_.assign(nn, 0.0);
    g.theta_.assign(nn, 0.0);
    g.chart_angle_.assign(nn, 0.0);
    g.valid_.assign(nn, 0);
    g.flipped_.assign(nn, 0);
    g.theta_ok_.assign(nn, 0);

    std::vector<double> canonical_theta(nn, 0.0);
    for (int n = 0; n < nn; ++n) {
        Jet2 j;
        try {
            j = fit_jet_at_node(mesh, u.values, n);
        } catch (const std::invalid_argument&) {
            continue;
        }
        const ShapeData s = analyze_jet(j);
        g.nu_[n] = s.nu;
        g.kext_[n] = s.kext;
        g.k1_[n] = s.k1;
        if (s.frame_valid) {
            g.valid_[n] = 1;
            g.chart_angle_[n] = s.chart_angle;
            canonical_theta[n] = s.theta;
            g.theta_ok_[n] = s.theta_valid;
        }
    }

    // anchor at the interior nu-maximum; orient its first principal direction
    // toward +x1 of the disk chart
    int anchor = -1;
    for (int n = 0; n < nn; ++n) {
        if (!g.valid_[n] || mesh.is_boundary(n)) continue;
        if (anchor < 0 || g.nu_[n] > g.nu_[anchor]) anchor = n;
    }
    if (anchor >= 0) {
        const std::complex<double> hp_dir = std::polar(1.0, g.chart_angle_[anchor]);
        const std::complex<double> disk_dir = hp_dir / cayley_derivative(mesh.nodes[anchor]);
        if (disk_dir.real() < 0.0) g.flipped_[anchor] = 1;

        std::deque<int> queue{anchor};
        std::vector<char> seen(nn, 0);
        seen[anchor] = 1;
        while (!queue.empty()) {
            const int n = queue.front();
            queue.pop_front();
            const double parent = g.chart_angle_[n] + (g.flipped_[n] ? kPi : 0.0);
            for (int nb : mesh.node_neighbors[n]) {
                if (seen[nb] || !g.valid_[nb]) continue;
                seen[nb] = 1;
                g.flipped_[nb] = std::cos(g.chart_angle_[nb] - parent) < 0.0 ? 1 : 0;
                queue.push_back(nb);
            }
        }
        for (int n = 0; n < nn; ++n)
            if (g.valid_[n])
                g.theta_[n] = wrap_2pi(canonical_theta[n] + (g.flipped_[n] ? kPi : 0.0));
    }
    g.anchor_ = anchor;
    return g;
}

double SurfaceGeometry::aligned_theta(const ShapeData& s, Vec2 p) const {
    const Located l = mesh_->locate(p);
    int ref = -1;
    for (int j = 0; j < 3; ++j) {
        const int n = mesh_->triangles[l.triangle][j];
        if (valid_[n]) {
            ref = n;
            break;
        }
    }
    if (ref < 0) throw std::invalid_argument("theta_at: no valid frame nearby");
    const double ref_angle = chart_angle_[ref] + (flipped_[ref] ? kPi : 0.0);
    const bool flip = std::cos(s.chart_angle - ref_angle) < 0.0;
    return wrap_2pi(s.theta + (flip ? kPi : 0.0));
}

double SurfaceGeometry::theta_at(Vec2 p) const {
    const ShapeData s = shape_at(p);
    if (!s.theta_valid)
        throw std::invalid_argument("theta_at: tangent plane horizontal or umbilic point");
    return s.theta;
}

ShapeData SurfaceGeometry::shape_at(Vec2 p) const {
    Jet2 j = fit_jet(*mesh_, *values_, p);
    ShapeData s = analyze_jet(j);
    if (s.frame_valid && anchor_ >= 0) {
        const double t = aligned_theta(s, p);
        if (t != s.theta) {  // flipped lift: the direction signs swap too
            s.dir1 = {-s.dir1[0], -s.dir1[1]};
            s.dir2 = {-s.dir2[0], -s.dir2[1]};
            s.chart_angle = wrap_2pi(s.chart_angle + kPi);
        }
        s.theta = t;
    }
    return s;
}

}  // namespace scherk
