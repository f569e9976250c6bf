#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scherk/hyperbolic.hpp"

namespace scherk {

enum class NodeTag : std::uint8_t { None, A1, B1, A2, B2, Gamma1, Gamma2, Trunc };

const char* node_tag_name(NodeTag t);
NodeTag node_tag_from_name(const std::string& s);

struct RefinementConfig {
    double h = 0.02;               // target edge size, Euclidean, disk chart
    double grading = 0.5;          // boundary refinement factor in (0,1]
    double truncation_delta = 0.02;  // Euclidean cut distance from the unit circle

    void validate() const;
};

struct Located {
    int triangle = -1;
    std::array<double, 3> bary{};
};

/// Triangulation of a Scherk quadrilateral, the first quadrant, or the
/// truncated disk, built in the disk chart from four rotated copies of a
/// per-quadrant ring template.  The template structure is kept so that the
/// dihedral symmetries of symmetric domains act as exact node permutations.
struct TriMesh {
    enum class Kind { Quadrilateral, Quadrant, Disk };
    enum class Symmetry { Rot90, MirrorDiagonal, MirrorHorizontal };

    Kind kind = Kind::Quadrilateral;
    double h = 0.0;
    double grading = 1.0;

    std::vector<Vec2> nodes;                      // disk chart
    std::vector<std::array<int, 3>> triangles;    // positively oriented
    std::vector<NodeTag> node_tag;                // None = interior node
    std::vector<int> gamma1_nodes;                // mesh line on {x1 = x2}
    std::vector<int> gamma2_nodes;                // mesh line on {x1 = -x2}

    // Template bookkeeping: ring_ids[k][q] lists node ids of ring k in
    // quadrant q at parameter indices i = 0..2 m_k (spine nodes shared).
    int rings = 0;
    int center_node = -1;
    bool full_domain = true;                      // four quadrants vs one
    bool dihedral = false;                        // exact D4 node symmetry
    std::vector<std::array<int, 4>> half_intervals;  // m_k per ring per quadrant
    std::vector<std::array<std::vector<int>, 4>> ring_ids;

    // Derived connectivity (filled by finalize()).
    std::vector<std::vector<int>> node_triangles;
    std::vector<std::vector<int>> node_neighbors;

    // Boundary geometry for distance queries: the geodesic carriers of the
    // domain edges, plus the truncation circle radius when one was used.
    std::vector<GeodesicArc> boundary_geodesics;
    double trunc_radius = 0.0;  // 0 when the domain is not truncated

    /// Hyperbolic distance from a point to the domain boundary carriers.
    double boundary_distance(Vec2 p) const;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    bool is_boundary(int node) const { return node_tag[node] != NodeTag::None; }

    double triangle_area(int t) const;
    Vec2 centroid(int t) const;

    /// Point location with barycentric coordinates; throws outside the mesh.
    Located locate(Vec2 p) const;
    bool try_locate(Vec2 p, Located& out) const;

    /// Node permutation realizing a symmetry of the full symmetric domain.
    /// Only available when `dihedral` is set.
    std::vector<int> symmetry_permutation(Symmetry op) const;

    /// Angle statistics.  The margin band (hyperbolic distance < 0.3 from the
    /// boundary carriers) is reported separately: near quadrilateral vertices
    /// and ideal cusps the domain's own interior angles drop below any quality
    /// target, and that shear is confined to the band.
    struct Quality {
        double min_angle_deg = 180.0;         // interior region
        double min_margin_angle_deg = 180.0;  // boundary band
        double max_angle_deg = 0.0;           // everywhere
    };
    Quality quality() const;

    /// Area of the polygon traced by the mesh boundary edges.
    double boundary_polygon_area() const;

    void finalize();  // build adjacency + location grid

  private:
    // uniform background grid for locate()
    mutable std::vector<std::vector<int>> grid_;
    mutable int grid_n_ = 0;
    mutable double grid_x0_ = 0, grid_y0_ = 0, grid_cell_ = 0;
    void build_grid() const;
};

TriMesh triangulate(const ScherkQuadrilateral& domain, const RefinementConfig& cfg);
TriMesh triangulate_quadrant(const RefinementConfig& cfg);
TriMesh triangulate_disk(const RefinementConfig& cfg);

/// Closed first-quadrant submesh of a full dihedral mesh, with spine nodes
/// retagged as Dirichlet boundary (GAMMA1/GAMMA2).  node_map gives, per
/// submesh node id, the node id in the full mesh.
TriMesh extract_quadrant(const TriMesh& full, std::vector<int>* node_map);

}  // namespace scherk
