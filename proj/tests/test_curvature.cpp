#include "scherk/curvature.hpp"

#include <cmath>
#include <random>

#include "scherk/translation_invariant.hpp"
#include "doctest.h"

using namespace scherk;

namespace {

Vec2 half_plane_coords(Vec2 disk) {
    const ModelPoint h = to_half_plane(ModelPoint::disk(disk.x, disk.y));
    return {h.c1, h.c2};
}

// nodal samples of a half-plane function on a mesh
template <typename F>
std::vector<double> sample(const TriMesh& mesh, F&& f) {
    std::vector<double> v(mesh.nodes.size());
    for (int n = 0; n < mesh.node_count(); ++n) {
        const Vec2 hp = half_plane_coords(mesh.nodes[n]);
        v[n] = f(hp.x, hp.y);
    }
    return v;
}

Jet2 linear_jet(double a, double x, double y) {
    Jet2 j;
    j.x = x;
    j.y = y;
    j.u = a * x;
    j.ux = a;
    return j;
}

const ScherkSolution& scherk2() {
    static ScherkSolution sol = solve_scherk(2.0, 8.0, {0.02, 0.5, 0.02}, {});
    return sol;
}

std::mt19937 rng(23);

Jet2 random_jet() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Jet2 j;
    j.x = u(rng);
    j.y = 1.0 + 0.8 * u(rng);
    j.u = u(rng);
    j.ux = u(rng);
    j.uy = u(rng);
    j.uxx = u(rng);
    j.uxy = u(rng);
    j.uyy = u(rng);
    return j;
}

MobiusIsometry random_isometry() {
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    return compose(MobiusIsometry::rotation_about_center(u(rng) * 2.0),
                   isometry_taking(ModelPoint::disk(u(rng), u(rng))));
}

}  // namespace

TEST_CASE("jet fit reproduces half-plane polynomials exactly") {
    const TriMesh mesh = triangulate(build_symmetric_domain(1.0), {0.03, 0.5, 0.02});

    const auto vx = sample(mesh, [](double x, double) { return x; });
    const auto vxy = sample(mesh, [](double x, double y) { return x * y; });

    for (Vec2 p : {Vec2{0.0, 0.0}, Vec2{0.21, -0.13}, Vec2{-0.3, 0.18}}) {
        const Jet2 jx = fit_jet(mesh, vx, p);
        CHECK(jx.ux == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(jx.uy) < 1e-9);
        CHECK(std::abs(jx.uxx) < 1e-7);
        CHECK(std::abs(jx.uxy) < 1e-7);
        CHECK(std::abs(jx.uyy) < 1e-7);

        const Jet2 jxy = fit_jet(mesh, vxy, p);
        CHECK(jxy.uxy == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(jxy.uxx) < 1e-7);
        CHECK(std::abs(jxy.uyy) < 1e-7);
    }
}

TEST_CASE("converged Scherk solution is critical at the center") {
    const Jet2 j = fit_jet(scherk2().mesh, scherk2().u.values, {0.0, 0.0});
    CHECK(std::abs(j.x) < 1e-12);
    CHECK(j.y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(j.ux) < 1e-6);
    CHECK(std::abs(j.uy) < 1e-6);
}

TEST_CASE("second fundamental form closed forms") {
    Jet2 zero;
    const FundamentalForm f0 = second_fundamental_form(zero);
    CHECK(f0.raw_xx == 0.0);
    CHECK(f0.raw_xy == 0.0);
    CHECK(f0.raw_yy == 0.0);
    CHECK(f0.normal[0] == 0.0);
    CHECK(f0.normal[1] == 0.0);
    CHECK(f0.normal[2] == 1.0);

    const double a = 0.7;
    const FundamentalForm fa = second_fundamental_form(linear_jet(a, 0.0, 1.0));
    const double W = std::sqrt(1.0 + a * a);
    CHECK(fa.raw_xx == doctest::Approx(0.0));
    CHECK(fa.raw_xy == doctest::Approx(a / W).epsilon(1e-14));
    CHECK(fa.raw_yy == doctest::Approx(0.0));
    CHECK(fa.normal[2] == doctest::Approx(1.0 / W).epsilon(1e-14));

    Jet2 logy;  // u = ln y at (x, 1)
    logy.x = 0.4;
    logy.y = 1.0;
    logy.uy = 1.0;
    logy.uyy = -1.0;
    const FundamentalForm fl = second_fundamental_form(logy);
    CHECK(fl.raw_xx == doctest::Approx(-1.0 / logy.W()).epsilon(1e-14));
    // u = ln y solves the equation with residual -2/y^2
    CHECK(minimal_equation_residual(logy) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(minimal_equation_residual(linear_jet(2.0, 0.3, 1.7)) == doctest::Approx(0.0));
}

TEST_CASE("extrinsic curvature closed forms") {
    CHECK(extrinsic_curvature(Jet2{}) == 0.0);
    for (double a : {0.25, 1.0, 4.0}) {
        CHECK(extrinsic_curvature(linear_jet(a, 0.0, 1.0)) ==
              doctest::Approx(-a * a / ((1 + a * a) * (1 + a * a))).epsilon(1e-13));
        Jet2 j2 = linear_jet(a, 0.0, 2.0);
        CHECK(extrinsic_curvature(j2) ==
              doctest::Approx(-4 * a * a / ((1 + 4 * a * a) * (1 + 4 * a * a))).epsilon(1e-13));
    }
}

TEST_CASE("nu equals 1/W through the normal's vertical component") {
    for (int k = 0; k < 50; ++k) {
        const Jet2 j = random_jet();
        CHECK(std::abs(second_fundamental_form(j).normal[2] - 1.0 / j.W()) < 1e-12);
    }
}

TEST_CASE("normalized-point curvature agrees with the general formula") {
    // u_yy = 0, T_u = a: matches the tilted-graph curvature
    const double a = 1.3;
    const Jet2 j = linear_jet(a, 0.0, 1.0);
    const NormalizedCurvature nc = normalized_curvature_at_p(j);
    CHECK(nc.kext == doctest::Approx(extrinsic_curvature(j)).epsilon(1e-13));
    CHECK(nc.Tu == doctest::Approx(a));
    CHECK(nc.lemma_defect < 1e-14);

    // u_yy = c, T_u = 0, W = 1: diagonal shape operator
    Jet2 diag;
    diag.uyy = 0.8;
    diag.uxx = -0.8;  // the minimal equation at W = 1
    const NormalizedCurvature nd = normalized_curvature_at_p(diag);
    CHECK(nd.kext == doctest::Approx(-0.64).epsilon(1e-14));
    const PrincipalFrame pf = principal_frame(diag);
    CHECK(std::abs(pf.dir1[0]) < 1e-14);  // dir1 along Y
    CHECK(std::abs(pf.dir1[1]) == doctest::Approx(1.0));
    CHECK(std::abs(pf.dir2[1]) < 1e-14);  // dir2 along X
    CHECK(std::abs(pf.dir2[0]) == doctest::Approx(1.0));

    // violating the minimal equation is rejected
    Jet2 bad = diag;
    bad.uxx = 0.8;
    CHECK_THROWS_AS(normalized_curvature_at_p(bad), std::invalid_argument);
    // off the normalization point is rejected
    CHECK_THROWS_AS(normalized_curvature_at_p(linear_jet(1.0, 0.5, 1.0)), std::invalid_argument);
}

TEST_CASE("principal frame from the eigen system") {
    const Jet2 j = linear_jet(1.0, 0.0, 1.0);
    const PrincipalFrame pf = principal_frame(j);
    CHECK(pf.k1 == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(pf.dir1[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(pf.dir1[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    // dir2 spans the X - Y line
    CHECK(std::abs(std::abs(pf.dir2[0]) - std::sqrt(0.5)) < 1e-12);
    CHECK(pf.dir2[0] * pf.dir2[1] < 0.0);

    // eigen-oracle: shape matrix times dir1 = k1 dir1
    for (int k = 0; k < 30; ++k) {
        Jet2 r = random_jet();
        const NormalizedJet nj = normalize_jet(r);
        const Jet2& n = nj.jet;
        const double W = n.W();
        const double T = n.uxy + n.ux;
        if (std::sqrt(std::max(0.0, n.uyy * n.uyy / (W * W) + T * T / (W * W * W * W))) < 1e-6)
            continue;
        const PrincipalFrame f = principal_frame(r);
        const double s11 = -n.uyy / W, s12 = T / (W * W), s22 = n.uyy / W;
        CHECK(std::abs(s11 * f.dir1[0] + s12 * f.dir1[1] - f.k1 * f.dir1[0]) < 1e-10);
        CHECK(std::abs(s12 * f.dir1[0] + s22 * f.dir1[1] - f.k1 * f.dir1[1]) < 1e-10);
    }

    // umbilic points have no canonical frame
    CHECK_THROWS_AS(principal_frame(Jet2{}), std::invalid_argument);
}

TEST_CASE("jet transport and normalization preserve the geometry") {
    for (int k = 0; k < 40; ++k) {
        const Jet2 j = random_jet();
        const MobiusIsometry g = random_isometry();
        const Jet2 tj = transport_jet(j, g);
        CHECK(std::abs(extrinsic_curvature(tj) - extrinsic_curvature(j)) < 1e-9);
        CHECK(std::abs(tj.W() - j.W()) < 1e-10);

        const NormalizedJet nj = normalize_jet(j);
        CHECK(std::abs(nj.jet.x) < 1e-12);
        CHECK(nj.jet.y == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(nj.jet.uy) < 1e-12);
        CHECK(nj.jet.ux >= -1e-15);
        CHECK(std::abs(extrinsic_curvature(nj.jet) - extrinsic_curvature(j)) < 1e-10);

        // round trip through the recorded isometry
        const Jet2 back = transport_jet(nj.jet, inverse(nj.forward));
        CHECK(std::abs(back.x - j.x) < 1e-10);
        CHECK(std::abs(back.uxx - j.uxx) < 1e-8);
    }
}

TEST_CASE("theta values on the Scherk axes and diagonals") {
    const SurfaceGeometry geo = SurfaceGeometry::build(scherk2().u);
    REQUIRE(geo.anchor_node() >= 0);
    // the anchor sits at the center cell
    CHECK(norm(scherk2().mesh.nodes[geo.anchor_node()]) < 3.0 * scherk2().mesh.h);

    auto wrap_line = [](double t) {  // representative in [-pi/2, pi/2)
        double a = std::fmod(t, kPi);
        if (a < -kPi / 2.0) a += kPi;
        if (a >= kPi / 2.0) a -= kPi;
        return a;
    };

    // oriented value on the positive x1-axis: -pi/2
    const double th_axis = geo.theta_at({0.35, 0.0});
    const double d_axis = std::abs(std::remainder(th_axis - (-kPi / 2.0), 2.0 * kPi));
    CHECK(d_axis < 0.02);

    // diagonal: the principal line makes pi/4 with the projected vertical
    const double th_diag = geo.theta_at({0.25, 0.25});
    CHECK(std::abs(std::abs(wrap_line(th_diag)) - kPi / 4.0) < 0.02);

    // x2-axis: the line angle vanishes
    const double th_x2 = geo.theta_at({0.0, 0.35});
    CHECK(std::abs(wrap_line(th_x2)) < 0.02);

    // theta is undefined where the tangent plane is horizontal
    CHECK_THROWS_AS(geo.theta_at({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("Lemma relation and pde residual decay under refinement") {
    const std::array<Vec2, 3> probes{Vec2{0.25, 0.1}, Vec2{0.0, 0.3}, Vec2{-0.2, -0.15}};
    std::array<double, 2> defect{}, resid{};
    int s = 0;
    for (double h : {0.04, 0.02}) {
        ScherkSolution sol = solve_scherk(2.0, 4.0, {h, 0.5, 0.02}, {});
        for (const Vec2 p : probes) {
            const Jet2 j = fit_jet(sol.mesh, sol.u.values, p);
            const NormalizedJet nj = normalize_jet(j);
            const double W = nj.jet.W();
            defect[s] = std::max(defect[s], std::abs(nj.jet.uxx + W * W * nj.jet.uyy));
            resid[s] = std::max(resid[s], std::abs(pde_residual(sol.u, p)));
        }
        ++s;
    }
    CHECK(defect[1] < defect[0] / 2.0);  // observed order >= 1
    CHECK(resid[1] < resid[0]);
    CHECK(resid[0] < 0.05);
}
