#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "afem/geometry.hpp"

namespace afem {

enum class BoundaryLabel : std::uint8_t { Interior = 0, Gamma0, GammaA, GammaC };

const char* to_string(BoundaryLabel label);
BoundaryLabel parse_boundary_label(const std::string& text);

struct Vertex {
    double x = 0.0;
    double y = 0.0;
};

// Local edge k connects v[k] and v[(k+1)%3]; refinement_edge is the local
// index of the edge bisected first (newest-vertex rule).
struct Triangle {
    std::array<std::int32_t, 3> v{};
    std::int8_t refinement_edge = 0;
    double sigma = 1.0; // per-element conductivity
};

struct Edge {
    std::array<std::int32_t, 2> v{};
    std::array<std::int32_t, 2> tri{-1, -1}; // tri[1] = -1 on the boundary
    BoundaryLabel label = BoundaryLabel::Interior;
};

struct BoundarySegment {
    Vec2 a, b;
    BoundaryLabel label = BoundaryLabel::Gamma0;
};

// Must cover the domain boundary exactly once; edges are classified by their
// midpoint, so segments have to break at mesh-representable corner points.
using BoundaryPartition = std::vector<BoundarySegment>;

class Mesh {
public:
    std::vector<Vertex> vertices;
    std::vector<Triangle> triangles;
    std::vector<Edge> edges;
    std::vector<std::array<std::int32_t, 3>> tri_edges; // edge id per local edge

    int generation = 0;
    int parent_generation = -1;
    std::int32_t parent_vertex_count = -1;
    // Parent edge endpoints per bisection-midpoint vertex (ids >= parent_vertex_count).
    std::vector<std::array<std::int32_t, 2>> midpoint_parents;

    std::int32_t num_vertices() const { return static_cast<std::int32_t>(vertices.size()); }
    std::int32_t num_triangles() const { return static_cast<std::int32_t>(triangles.size()); }
    std::int32_t num_edges() const { return static_cast<std::int32_t>(edges.size()); }

    Vec2 pos(std::int32_t v) const { return {vertices[v].x, vertices[v].y}; }
    double area(std::int32_t t) const;
    double total_area() const;
    double edge_length(std::int32_t e) const;
    Vec2 edge_midpoint(std::int32_t e) const;
    // Unit normal pointing out of edge.tri[0].
    Vec2 edge_normal(std::int32_t e) const;
    bool is_boundary_edge(std::int32_t e) const { return edges[e].tri[1] < 0; }

    // Gradients of the three nodal basis functions on triangle t.
    std::array<Vec2, 3> basis_gradients(std::int32_t t) const;
};

// Assembles edge table + adjacency for given vertices/triangles; boundary
// labels come from the supplied classifier (takes the two endpoint ids).
Mesh build_mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles,
                const std::function<BoundaryLabel(const Mesh&, std::int32_t, std::int32_t)>& classify);

// Uniform right-triangle mesh of the L-shaped domain [-1,1]^2 \ ([0,1]x[-1,0]).
// Each h x h square is split along its diagonal; refinement edges sit on the
// hypotenuses so the mesh is compatible with newest-vertex bisection.
// Requires 1/h integral.
Mesh build_lshape_initial(double h, const BoundaryPartition& partition, double sigma = 1.0);

enum class RefineMode { AllEdges, SingleEdge };

RefineMode parse_refine_mode(const std::string& text);
const char* to_string(RefineMode mode);

// Newest-vertex bisection of the marked triangles plus recursive conforming
// closure. AllEdges splits every marked triangle into four children
// (three bisections); SingleEdge bisects only the refinement edge.
Mesh refine(const Mesh& mesh, const std::vector<std::int32_t>& marked, RefineMode mode);

struct ConformityReport {
    bool ok = true;
    std::string diagnostic; // first violation found
};

ConformityReport validate_conformity(const Mesh& mesh);

// max over elements of h_T / rho_T with h_T = sqrt(|T|), rho_T twice the inradius.
double shape_regularity(const Mesh& mesh);

struct PointLocation {
    std::int32_t tri = -1;
    std::array<double, 3> bary{}; // sums to 1, each >= -1e-12
};

// Bucket-grid point locator over an immutable mesh. Ties on shared
// edges/vertices resolve to the lowest triangle id.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh);
    PointLocation locate(Vec2 p) const; // throws std::domain_error outside the mesh
    bool try_locate(Vec2 p, PointLocation& out) const;

private:
    const Mesh& mesh_;
    int nx_ = 0, ny_ = 0;
    double x0_ = 0, y0_ = 0, inv_dx_ = 0, inv_dy_ = 0;
    std::vector<std::int32_t> cell_ptr_;
    std::vector<std::int32_t> cell_tris_; // ascending ids within each cell
};

PointLocation locate_point(const Mesh& mesh, Vec2 p);

// Plain-text serialization ("afem-mesh v1").
void write_mesh(const Mesh& mesh, std::ostream& os);
Mesh read_mesh(std::istream& is);
void write_mesh_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_file(const std::string& path);

// Legacy-VTK unstructured-grid export, optionally with a vertex field.
void write_vtk(const Mesh& mesh, const std::string& path, const std::vector<double>* vertex_field = nullptr,
               const std::string& field_name = "u");

} // namespace afem
