#pragma once

#include <functional>
#include <string>
#include <vector>

#include "scherk/hyperbolic.hpp"
#include "scherk/mesh.hpp"

namespace scherk {

/// Piecewise-linear nodal field on a triangulation.
struct ScalarField {
    const TriMesh* mesh = nullptr;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(const TriMesh& m, double fill = 0.0)
        : mesh(&m), values(m.nodes.size(), fill) {}

    /// Interpolated value at a disk-chart point; throws outside the mesh.
    double operator()(Vec2 p) const;
};

/// Dirichlet data keyed by boundary tag and node position.
using BoundaryData = std::function<double(NodeTag, Vec2)>;

BoundaryData scherk_boundary_data(double cap);     // A: +T, B: -T, diagonals: 0
BoundaryData constant_boundary_data(double c);
BoundaryData quadrant_graph_data(double n);        // TRUNC: n, spines: 0
BoundaryData disk_graph_data(double n);            // TRUNC: sign(x1^2 - x2^2) n

struct DirichletProblem {
    const TriMesh* mesh = nullptr;
    BoundaryData data;
    double cap = 0.0;  // bound on |data|; also the target of continuation
};

struct SolverConfig {
    double tol = 1e-10;   // sup-norm of the reduced gradient
    int max_iter = 100;
    double damping = 0.5;  // backtracking contraction
    std::vector<double> continuation;  // increasing caps; empty = doubling ladder
    int threads = 1;
    std::vector<double> warm_start;    // initial nodal values (optional)
};

struct IterationRecord {
    double grad_norm = 0.0;
    double energy = 0.0;
    double step = 0.0;
    double decrement = 0.0;  // sqrt(g^T H^{-1} g) for Newton steps
    bool newton = true;      // false when the gradient fallback was used
};

struct ConvergenceReport {
    std::vector<IterationRecord> iterations;
    bool converged = false;
    double final_grad_norm = 0.0;
    double max_principle_violation = 0.0;  // beyond [min data, max data]
    std::string failure;
};

/// Hyperbolic area of the graph of u: sum over triangles of
/// area * rho_c * sqrt(rho_c^2 + |grad u|^2) with the conformal factor
/// rho = 2/(1-|x|^2) frozen at the centroid.
double area_functional(const ScalarField& u, int threads = 1);

/// Gradient of the area functional (all nodes, Dirichlet included).
std::vector<double> area_gradient(const ScalarField& u, int threads = 1);

/// Action of the area Hessian on a nodal vector (for validation).
std::vector<double> area_hessian_apply(const ScalarField& u, const std::vector<double>& v);

/// Damped-Newton minimizer of the area functional at fixed Dirichlet data.
ScalarField solve_minimal_graph(const DirichletProblem& prob, const SolverConfig& cfg,
                                ConvergenceReport* report = nullptr);

/// Doubling cap ladder ending exactly at `cap`.
std::vector<double> continuation_ladder(double cap, const std::vector<double>& requested);

struct ScherkSolution {
    ScherkQuadrilateral domain;
    TriMesh mesh;
    ScalarField u;
    std::vector<double> caps;
    std::vector<std::vector<double>> cap_values;  // nodal values per cap
    std::vector<ConvergenceReport> reports;
};

/// Scherk problem on D_lambda with data +-T capped, solved by continuation
/// over increasing caps (each solve warm-starts the next).
ScherkSolution solve_scherk(double lambda, double cap, const RefinementConfig& rcfg,
                            const SolverConfig& scfg);

/// Shared meshes for the entire-graph family u_n: the truncated disk and its
/// first-quadrant submesh (extracted from the disk triangulation, so the odd
/// reflection of a quadrant solution is stationary for the full disk energy).
struct UnContext {
    TriMesh disk;
    TriMesh quadrant;
    std::vector<int> quadrant_to_disk;  // node id map
};

UnContext make_un_context(const RefinementConfig& rcfg);

struct EntireGraphUn {
    double level = 0.0;
    ScalarField u;         // odd extension on the disk mesh of the context
    ScalarField v;         // quadrant solution (data n on TRUNC, 0 on spines)
    double mismatch = 0.0;  // max |u| on the reflection lines
    std::vector<ConvergenceReport> reports;
};

EntireGraphUn build_entire_graph_un(const UnContext& ctx, double n, const SolverConfig& scfg);

/// Left-hand side of the expanded minimal-graph equation in the half-plane
/// chart, evaluated from a local quadratic fit at p (disk chart).
double pde_residual(const ScalarField& u, Vec2 p);

}  // namespace scherk
