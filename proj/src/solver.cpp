#include "scherk/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <thread>

namespace scherk {

double ScalarField::operator()(Vec2 p) const {
    const Located l = mesh->locate(p);
    double v = 0.0;
    for (int j = 0; j < 3; ++j) v += l.bary[j] * values[mesh->triangles[l.triangle][j]];
    return v;
}

BoundaryData scherk_boundary_data(double cap) {
    return [cap](NodeTag t, Vec2 p) -> double {
        switch (t) {
            case NodeTag::A1:
            case NodeTag::A2: return cap;
            case NodeTag::B1:
            case NodeTag::B2: return -cap;
            case NodeTag::Trunc: {
                const double s = p.x * p.x - p.y * p.y;
                return s > 0.0 ? cap : s < 0.0 ? -cap : 0.0;
            }
            default: return 0.0;  // diagonals
        }
    };
}

BoundaryData constant_boundary_data(double c) {
    return [c](NodeTag, Vec2) { return c; };
}

BoundaryData quadrant_graph_data(double n) {
    return [n](NodeTag t, Vec2) { return t == NodeTag::Trunc ? n : 0.0; };
}

BoundaryData disk_graph_data(double n) {
    return [n](NodeTag t, Vec2 p) -> double {
        if (t != NodeTag::Trunc) return 0.0;
        const double s = p.x * p.x - p.y * p.y;
        return s > 0.0 ? n : s < 0.0 ? -n : 0.0;
    };
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

namespace {

struct TriGeom {
    std::array<int, 3> n;
    double area;
    double rho;                     // conformal factor at the centroid
    Eigen::Matrix<double, 2, 3> B;  // shape-function gradients
};

std::vector<TriGeom> build_geometry(const TriMesh& mesh) {
    std::vector<TriGeom> geo(mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tr = mesh.triangles[t];
        TriGeom g;
        g.n = tr;
        const Vec2 p0 = mesh.nodes[tr[0]], p1 = mesh.nodes[tr[1]], p2 = mesh.nodes[tr[2]];
        const double det = cross(p1 - p0, p2 - p0);
        g.area = 0.5 * det;
        const Vec2 c = mesh.centroid(t);
        g.rho = 2.0 / (1.0 - dot(c, c));
        const Vec2 e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0;
        g.B << -e0.y / det, -e1.y / det, -e2.y / det,
                e0.x / det,  e1.x / det,  e2.x / det;
        geo[t] = g;
    }
    return geo;
}

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 4096) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            const int lo = t * chunk, hi = std::min(n, lo + chunk);
            for (int i = lo; i < hi; ++i) fn(i);
        });
    for (auto& th : pool) th.join();
}

double energy_of(const std::vector<TriGeom>& geo, const std::vector<double>& u, int threads) {
    std::vector<double> part(geo.size());
    parallel_for(int(geo.size()), threads, [&](int t) {
        const TriGeom& g = geo[t];
        const Eigen::Vector3d ul(u[g.n[0]], u[g.n[1]], u[g.n[2]]);
        const Eigen::Vector2d gr = g.B * ul;
        part[t] = g.area * g.rho * std::sqrt(g.rho * g.rho + gr.squaredNorm());
    });
    double e = 0.0;
    for (double p : part) e += p;  // fixed order: deterministic across thread counts
    return e;
}

void gradient_of(const std::vector<TriGeom>& geo, const std::vector<double>& u,
                 int threads, std::vector<double>& out) {
    std::vector<Eigen::Vector3d> part(geo.size());
    parallel_for(int(geo.size()), threads, [&](int t) {
        const TriGeom& g = geo[t];
        const Eigen::Vector3d ul(u[g.n[0]], u[g.n[1]], u[g.n[2]]);
        const Eigen::Vector2d gr = g.B * ul;
        const double s = std::sqrt(g.rho * g.rho + gr.squaredNorm());
        part[t] = (g.area * g.rho / s) * (g.B.transpose() * gr);
    });
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t t = 0; t < geo.size(); ++t)
        for (int j = 0; j < 3; ++j) out[geo[t].n[j]] += part[t][j];
}

void hessian_blocks(const std::vector<TriGeom>& geo, const std::vector<double>& u,
                    int threads, std::vector<Eigen::Matrix3d>& blocks) {
    blocks.resize(geo.size());
    parallel_for(int(geo.size()), threads, [&](int t) {
        const TriGeom& g = geo[t];
        const Eigen::Vector3d ul(u[g.n[0]], u[g.n[1]], u[g.n[2]]);
        const Eigen::Vector2d gr = g.B * ul;
        const double s2 = g.rho * g.rho + gr.squaredNorm();
        const double s = std::sqrt(s2);
        const Eigen::Matrix2d W =
            Eigen::Matrix2d::Identity() / s - (gr * gr.transpose()) / (s * s2);
        blocks[t] = g.area * g.rho * (g.B.transpose() * W * g.B);
    });
}

}  // namespace

double area_functional(const ScalarField& u, int threads) {
    return energy_of(build_geometry(*u.mesh), u.values, threads);
}

std::vector<double> area_gradient(const ScalarField& u, int threads) {
    std::vector<double> g(u.values.size());
    gradient_of(build_geometry(*u.mesh), u.values, threads, g);
    return g;
}

std::vector<double> area_hessian_apply(const ScalarField& u, const std::vector<double>& v) {
    const auto geo = build_geometry(*u.mesh);
    std::vector<Eigen::Matrix3d> blocks;
    hessian_blocks(geo, u.values, 1, blocks);
    std::vector<double> out(u.values.size(), 0.0);
    for (std::size_t t = 0; t < geo.size(); ++t) {
        const auto& n = geo[t].n;
        const Eigen::Vector3d vl(v[n[0]], v[n[1]], v[n[2]]);
        const Eigen::Vector3d r = blocks[t] * vl;
        for (int j = 0; j < 3; ++j) out[n[j]] += r[j];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Damped Newton
// ---------------------------------------------------------------------------

ScalarField solve_minimal_graph(const DirichletProblem& prob, const SolverConfig& cfg,
                                ConvergenceReport* report) {
    const TriMesh& mesh = *prob.mesh;
    ScalarField u(mesh);

    std::vector<int> free_index(mesh.nodes.size(), -1);
    std::vector<int> free_nodes;
    double data_min = std::numeric_limits<double>::infinity(), data_max = -data_min;
    for (int n = 0; n < mesh.node_count(); ++n) {
        if (mesh.is_boundary(n)) {
            u.values[n] = prob.data(mesh.node_tag[n], mesh.nodes[n]);
            data_min = std::min(data_min, u.values[n]);
            data_max = std::max(data_max, u.values[n]);
            if (std::abs(u.values[n]) > prob.cap + 1e-12)
                throw std::invalid_argument("solve_minimal_graph: data exceeds the cap");
        } else {
            free_index[n] = int(free_nodes.size());
            free_nodes.push_back(n);
        }
    }
    if (free_nodes.empty())
        throw std::invalid_argument("solve_minimal_graph: no free nodes");
    if (!cfg.warm_start.empty()) {
        if (cfg.warm_start.size() != u.values.size())
            throw std::invalid_argument("solve_minimal_graph: warm start size mismatch");
        for (int n : free_nodes) u.values[n] = cfg.warm_start[n];
    }

    const auto geo = build_geometry(mesh);
    const int nf = int(free_nodes.size());

    ConvergenceReport local;
    ConvergenceReport& rep = report ? *report : local;
    rep = ConvergenceReport{};

    std::vector<double> grad_full(mesh.nodes.size());
    std::vector<Eigen::Matrix3d> blocks;
    Eigen::SparseMatrix<double> H(nf, nf);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool analyzed = false;

    double energy = energy_of(geo, u.values, cfg.threads);
    for (int it = 0; it < cfg.max_iter; ++it) {
        gradient_of(geo, u.values, cfg.threads, grad_full);
        double gmax = 0.0;
        for (int n : free_nodes) gmax = std::max(gmax, std::abs(grad_full[n]));
        if (gmax < cfg.tol) {
            rep.converged = true;
            rep.final_grad_norm = gmax;
            break;
        }

        hessian_blocks(geo, u.values, cfg.threads, blocks);
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(geo.size() * 9);
        for (std::size_t t = 0; t < geo.size(); ++t)
            for (int a = 0; a < 3; ++a) {
                const int fa = free_index[geo[t].n[a]];
                if (fa < 0) continue;
                for (int b = 0; b < 3; ++b) {
                    const int fb = free_index[geo[t].n[b]];
                    if (fb >= 0) trips.emplace_back(fa, fb, blocks[t](a, b));
                }
            }
        H.setFromTriplets(trips.begin(), trips.end());

        Eigen::VectorXd g(nf);
        for (int i = 0; i < nf; ++i) g[i] = grad_full[free_nodes[i]];

        Eigen::VectorXd dir;
        bool newton_step = true;
        if (!analyzed) {
            ldlt.analyzePattern(H);
            analyzed = true;
        }
        ldlt.factorize(H);
        if (ldlt.info() == Eigen::Success) {
            dir = ldlt.solve(-g);
            if (g.dot(dir) >= 0.0) newton_step = false;  // numerical indefiniteness
        } else {
            newton_step = false;
        }
        if (!newton_step) dir = -g;

        const double slope = newton_step ? g.dot(dir) : -g.squaredNorm();
        const double decrement = newton_step ? std::sqrt(std::max(0.0, -slope)) : g.norm();

        // Inside the quadratic basin the predicted decrease falls below the
        // roundoff floor of the energy and the Armijo test can no longer
        // measure descent; the full Newton step is taken directly there
        // (the functional is strictly convex in the gradient).
        const bool below_roundoff =
            newton_step &&
            -slope < 1e2 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(energy));

        // classic damping 1/(1+lambda) far from the basin, full steps inside;
        // backtracking guards the remainder
        double alpha = (newton_step && decrement > 0.25) ? 1.0 / (1.0 + decrement) : 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            std::vector<double> trial = u.values;
            for (int i = 0; i < nf; ++i) trial[free_nodes[i]] += alpha * dir[i];
            const double e_trial = energy_of(geo, trial, cfg.threads);
            if (below_roundoff || e_trial <= energy + 1e-4 * alpha * slope) {
                u.values.swap(trial);
                energy = e_trial;
                accepted = true;
                break;
            }
            alpha *= cfg.damping;
        }
        rep.iterations.push_back({gmax, energy, accepted ? alpha : 0.0, decrement, newton_step});
        if (!accepted) {
            rep.failure = "line search failure";
            rep.final_grad_norm = gmax;
            break;
        }
        if (it + 1 == cfg.max_iter) {
            rep.failure = "max iterations reached";
            rep.final_grad_norm = gmax;
        }
    }

    double lo = 0.0, hi = 0.0;
    for (int n : free_nodes) {
        lo = std::max(lo, data_min - u.values[n]);
        hi = std::max(hi, u.values[n] - data_max);
    }
    rep.max_principle_violation = std::max({hi, lo, 0.0});
    return u;
}

std::vector<double> continuation_ladder(double cap, const std::vector<double>& requested) {
    if (!(cap > 0.0)) throw std::invalid_argument("continuation_ladder: cap must be positive");
    if (!requested.empty()) {
        for (std::size_t i = 0; i + 1 < requested.size(); ++i)
            if (!(requested[i] < requested[i + 1]))
                throw std::invalid_argument("continuation caps must increase");
        return requested;
    }
    std::vector<double> ladder;
    for (double t = 1.0; t < cap; t *= 2.0) ladder.push_back(t);
    ladder.push_back(cap);
    return ladder;
}

ScherkSolution solve_scherk(double lambda, double cap, const RefinementConfig& rcfg,
                            const SolverConfig& scfg) {
    ScherkSolution sol;
    sol.domain = build_symmetric_domain(lambda);
    sol.mesh = triangulate(sol.domain, rcfg);
    sol.caps = continuation_ladder(cap, scfg.continuation);

    SolverConfig step_cfg = scfg;
    step_cfg.continuation.clear();
    ScalarField u;
    for (std::size_t s = 0; s < sol.caps.size(); ++s) {
        DirichletProblem prob{&sol.mesh, scherk_boundary_data(sol.caps[s]), sol.caps[s]};
        ConvergenceReport rep;
        if (s > 0) step_cfg.warm_start = u.values;
        u = solve_minimal_graph(prob, step_cfg, &rep);
        sol.cap_values.push_back(u.values);
        sol.reports.push_back(std::move(rep));
    }
    sol.u = std::move(u);
    sol.u.mesh = &sol.mesh;
    return sol;
}

UnContext make_un_context(const RefinementConfig& rcfg) {
    UnContext ctx;
    ctx.disk = triangulate_disk(rcfg);
    ctx.quadrant = extract_quadrant(ctx.disk, &ctx.quadrant_to_disk);
    return ctx;
}

EntireGraphUn build_entire_graph_un(const UnContext& ctx, double n, const SolverConfig& scfg) {
    EntireGraphUn out;
    out.level = n;

    SolverConfig step_cfg = scfg;
    step_cfg.continuation.clear();
    ScalarField v;
    for (double cap : continuation_ladder(n, scfg.continuation)) {
        DirichletProblem prob{&ctx.quadrant, quadrant_graph_data(cap), cap};
        ConvergenceReport rep;
        if (!v.values.empty()) step_cfg.warm_start = v.values;
        v = solve_minimal_graph(prob, step_cfg, &rep);
        out.reports.push_back(std::move(rep));
    }

    // odd extension to the disk mesh through the template correspondence:
    // values in quadrants 1 and 3 are the negated mirror of quadrant 0
    std::vector<int> disk_to_quad(ctx.disk.nodes.size(), -1);
    for (std::size_t i = 0; i < ctx.quadrant_to_disk.size(); ++i)
        disk_to_quad[ctx.quadrant_to_disk[i]] = int(i);

    out.u = ScalarField(ctx.disk);
    for (int k = 1; k <= ctx.disk.rings; ++k)
        for (int q = 0; q < 4; ++q) {
            const int m = ctx.disk.half_intervals[k][q];
            for (int i = 0; i <= 2 * m; ++i) {
                const int di = ctx.disk.ring_ids[k][q][i];
                const int j = (q % 2 == 0) ? i : 2 * m - i;
                const int q0 = disk_to_quad[ctx.disk.ring_ids[k][0][j]];
                out.u.values[di] = (q % 2 == 0 ? 1.0 : -1.0) * v.values[q0];
            }
        }
    out.v = std::move(v);
    out.v.mesh = &ctx.quadrant;

    // stationarity defect of the glued field along the reflection lines
    std::vector<double> grad = area_gradient(out.u, scfg.threads);
    double defect = 0.0;
    for (int nd : ctx.disk.gamma1_nodes)
        if (!ctx.disk.is_boundary(nd)) defect = std::max(defect, std::abs(grad[nd]));
    for (int nd : ctx.disk.gamma2_nodes)
        if (!ctx.disk.is_boundary(nd)) defect = std::max(defect, std::abs(grad[nd]));
    out.mismatch = defect;
    return out;
}

}  // namespace scherk
