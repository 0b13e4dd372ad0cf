#include "afem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace afem {

namespace {

constexpr double kGeomTol = 1e-12;

inline std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

bool point_on_segment(Vec2 p, Vec2 a, Vec2 b, double tol) {
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    if (len2 <= 0.0) return false;
    if (std::abs(cross(d, p - a)) > tol * std::sqrt(len2)) return false;
    const double t = dot(p - a, d);
    return t >= -tol && t <= len2 + tol;
}

} // namespace

const char* to_string(BoundaryLabel label) {
    switch (label) {
    case BoundaryLabel::Interior: return "Interior";
    case BoundaryLabel::Gamma0: return "Gamma0";
    case BoundaryLabel::GammaA: return "GammaA";
    case BoundaryLabel::GammaC: return "GammaC";
    }
    return "?";
}

BoundaryLabel parse_boundary_label(const std::string& text) {
    if (text == "Interior") return BoundaryLabel::Interior;
    if (text == "Gamma0") return BoundaryLabel::Gamma0;
    if (text == "GammaA") return BoundaryLabel::GammaA;
    if (text == "GammaC") return BoundaryLabel::GammaC;
    throw std::invalid_argument("unknown boundary label: " + text);
}

RefineMode parse_refine_mode(const std::string& text) {
    if (text == "all-edges") return RefineMode::AllEdges;
    if (text == "single-edge") return RefineMode::SingleEdge;
    throw std::invalid_argument("unknown refine mode: " + text);
}

const char* to_string(RefineMode mode) {
    return mode == RefineMode::AllEdges ? "all-edges" : "single-edge";
}

double Mesh::area(std::int32_t t) const {
    const auto& tr = triangles[t];
    return 0.5 * signed_area2(pos(tr.v[0]), pos(tr.v[1]), pos(tr.v[2]));
}

double Mesh::total_area() const {
    double s = 0.0;
    for (std::int32_t t = 0; t < num_triangles(); ++t) s += area(t);
    return s;
}

double Mesh::edge_length(std::int32_t e) const {
    return norm(pos(edges[e].v[1]) - pos(edges[e].v[0]));
}

Vec2 Mesh::edge_midpoint(std::int32_t e) const {
    return 0.5 * (pos(edges[e].v[0]) + pos(edges[e].v[1]));
}

Vec2 Mesh::edge_normal(std::int32_t e) const {
    const Edge& ed = edges[e];
    const Vec2 a = pos(ed.v[0]), b = pos(ed.v[1]);
    Vec2 n{b.y - a.y, a.x - b.x};
    const double len = norm(n);
    n = (1.0 / len) * n;
    // orient out of tri[0]: flip if the opposite vertex lies on n's side
    const auto& tr = triangles[ed.tri[0]];
    for (int k = 0; k < 3; ++k) {
        const std::int32_t w = tr.v[k];
        if (w != ed.v[0] && w != ed.v[1]) {
            if (dot(pos(w) - a, n) > 0.0) n = -1.0 * n;
            break;
        }
    }
    return n;
}

std::array<Vec2, 3> Mesh::basis_gradients(std::int32_t t) const {
    const auto& tr = triangles[t];
    const Vec2 p0 = pos(tr.v[0]), p1 = pos(tr.v[1]), p2 = pos(tr.v[2]);
    const double inv2a = 1.0 / signed_area2(p0, p1, p2);
    return {Vec2{(p1.y - p2.y) * inv2a, (p2.x - p1.x) * inv2a},
            Vec2{(p2.y - p0.y) * inv2a, (p0.x - p2.x) * inv2a},
            Vec2{(p0.y - p1.y) * inv2a, (p1.x - p0.x) * inv2a}};
}

Mesh build_mesh(std::vector<Vertex> vertices, std::vector<Triangle> triangles,
                const std::function<BoundaryLabel(const Mesh&, std::int32_t, std::int32_t)>& classify) {
    Mesh m;
    m.vertices = std::move(vertices);
    m.triangles = std::move(triangles);
    m.tri_edges.assign(m.triangles.size(), {-1, -1, -1});

    std::unordered_map<std::uint64_t, std::int32_t> ids;
    ids.reserve(m.triangles.size() * 2);
    for (std::int32_t t = 0; t < m.num_triangles(); ++t) {
        const auto& tr = m.triangles[t];
        if (0.5 * signed_area2(m.pos(tr.v[0]), m.pos(tr.v[1]), m.pos(tr.v[2])) <= 0.0)
            throw std::invalid_argument("build_mesh: triangle " + std::to_string(t) +
                                        " is not counterclockwise");
        for (int k = 0; k < 3; ++k) {
            const std::int32_t a = tr.v[k], b = tr.v[(k + 1) % 3];
            auto [it, inserted] = ids.try_emplace(edge_key(a, b), m.num_edges());
            if (inserted) {
                m.edges.push_back(Edge{{a, b}, {t, -1}, BoundaryLabel::Interior});
            } else {
                Edge& ed = m.edges[it->second];
                if (ed.tri[1] >= 0)
                    throw std::invalid_argument("build_mesh: edge shared by more than two triangles");
                ed.tri[1] = t;
            }
            m.tri_edges[t][k] = it->second;
        }
    }
    for (auto& ed : m.edges)
        if (ed.tri[1] < 0) ed.label = classify(m, ed.v[0], ed.v[1]);
    return m;
}

Mesh build_lshape_initial(double h, const BoundaryPartition& partition, double sigma) {
    const double inv = 1.0 / h;
    const auto n = static_cast<std::int32_t>(std::llround(inv));
    if (n < 1 || std::abs(inv - n) > 1e-9 * inv)
        throw std::invalid_argument("build_lshape_initial: 1/h must be an integer");

    const std::int32_t side = 2 * n; // squares per side of [-1,1]^2
    std::vector<std::int32_t> vid(static_cast<std::size_t>(side + 1) * (side + 1), -1);
    std::vector<Vertex> vertices;
    auto in_hole = [&](std::int32_t ix, std::int32_t iy) { return ix > n && iy < n; };
    for (std::int32_t iy = 0; iy <= side; ++iy)
        for (std::int32_t ix = 0; ix <= side; ++ix) {
            if (in_hole(ix, iy)) continue;
            vid[static_cast<std::size_t>(iy) * (side + 1) + ix] =
                static_cast<std::int32_t>(vertices.size());
            vertices.push_back(Vertex{-1.0 + h * ix, -1.0 + h * iy});
        }
    auto at = [&](std::int32_t ix, std::int32_t iy) {
        return vid[static_cast<std::size_t>(iy) * (side + 1) + ix];
    };

    std::vector<Triangle> tris;
    tris.reserve(static_cast<std::size_t>(3) * n * n * 2);
    for (std::int32_t iy = 0; iy < side; ++iy)
        for (std::int32_t ix = 0; ix < side; ++ix) {
            if (ix >= n && iy < n) continue; // square inside the cut-out quadrant
            const std::int32_t v00 = at(ix, iy), v10 = at(ix + 1, iy);
            const std::int32_t v11 = at(ix + 1, iy + 1), v01 = at(ix, iy + 1);
            // diagonal v00-v11 is the hypotenuse of both halves
            tris.push_back(Triangle{{v00, v10, v11}, 2, sigma});
            tris.push_back(Triangle{{v00, v11, v01}, 0, sigma});
        }

    auto classify = [&partition](const Mesh& m, std::int32_t a, std::int32_t b) {
        const Vec2 mid = 0.5 * (m.pos(a) + m.pos(b));
        for (const auto& seg : partition)
            if (point_on_segment(mid, seg.a, seg.b, kGeomTol)) return seg.label;
        throw std::invalid_argument("boundary partition does not cover the edge at (" +
                                    std::to_string(mid.x) + ", " + std::to_string(mid.y) + ")");
    };
    return build_mesh(std::move(vertices), std::move(tris), classify);
}

Mesh refine(const Mesh& mesh, const std::vector<std::int32_t>& marked, RefineMode mode) {
    const std::int32_t nt = mesh.num_triangles();
    const std::int32_t ne = mesh.num_edges();
    const std::int32_t nv = mesh.num_vertices();

    std::vector<char> edge_marked(ne, 0);
    for (const std::int32_t t : marked) {
        if (t < 0 || t >= nt) throw std::invalid_argument("refine: marked id out of range");
        if (mode == RefineMode::AllEdges) {
            for (int k = 0; k < 3; ++k) edge_marked[mesh.tri_edges[t][k]] = 1;
        } else {
            edge_marked[mesh.tri_edges[t][mesh.triangles[t].refinement_edge]] = 1;
        }
    }

    // conforming closure: a triangle with any marked edge must have its
    // refinement edge marked as well
    for (bool changed = true; changed;) {
        changed = false;
        for (std::int32_t t = 0; t < nt; ++t) {
            const auto& te = mesh.tri_edges[t];
            const std::int32_t re = te[mesh.triangles[t].refinement_edge];
            if (!edge_marked[re] && (edge_marked[te[0]] || edge_marked[te[1]] || edge_marked[te[2]])) {
                edge_marked[re] = 1;
                changed = true;
            }
        }
    }

    if (std::none_of(edge_marked.begin(), edge_marked.end(), [](char c) { return c != 0; }))
        return mesh;

    Mesh out;
    out.vertices = mesh.vertices;
    out.generation = mesh.generation + 1;
    out.parent_generation = mesh.generation;
    out.parent_vertex_count = nv;

    std::vector<std::int32_t> edge_mid(ne, -1);
    std::vector<std::int32_t> mid_source_edge; // parallel to midpoint_parents
    for (std::int32_t e = 0; e < ne; ++e) {
        if (!edge_marked[e]) continue;
        edge_mid[e] = out.num_vertices();
        const Vec2 p = mesh.edge_midpoint(e);
        out.vertices.push_back(Vertex{p.x, p.y});
        out.midpoint_parents.push_back(mesh.edges[e].v);
        mid_source_edge.push_back(e);
    }

    std::vector<Triangle> tris;
    tris.reserve(mesh.triangles.size() * 2);
    for (std::int32_t t = 0; t < nt; ++t) {
        const Triangle& tr = mesh.triangles[t];
        const auto& te = mesh.tri_edges[t];
        const int r = tr.refinement_edge;
        if (!edge_marked[te[r]]) {
            tris.push_back(tr); // closure guarantees no other edge is marked
            continue;
        }
        const std::int32_t p = tr.v[r], q = tr.v[(r + 1) % 3], s = tr.v[(r + 2) % 3];
        const std::int32_t e_qs = te[(r + 1) % 3], e_sp = te[(r + 2) % 3];
        const std::int32_t m0 = edge_mid[te[r]];
        // left child (s, p, m0): contains parent edge (s, p)
        if (edge_marked[e_sp]) {
            const std::int32_t m2 = edge_mid[e_sp];
            tris.push_back(Triangle{{m0, s, m2}, 0, tr.sigma});
            tris.push_back(Triangle{{p, m0, m2}, 0, tr.sigma});
        } else {
            tris.push_back(Triangle{{s, p, m0}, 0, tr.sigma});
        }
        // right child (q, s, m0): contains parent edge (q, s)
        if (edge_marked[e_qs]) {
            const std::int32_t m1 = edge_mid[e_qs];
            tris.push_back(Triangle{{m0, q, m1}, 0, tr.sigma});
            tris.push_back(Triangle{{s, m0, m1}, 0, tr.sigma});
        } else {
            tris.push_back(Triangle{{q, s, m0}, 0, tr.sigma});
        }
    }

    std::unordered_map<std::uint64_t, std::int32_t> old_edge_ids;
    old_edge_ids.reserve(mesh.edges.size() * 2);
    for (std::int32_t e = 0; e < ne; ++e)
        old_edge_ids.emplace(edge_key(mesh.edges[e].v[0], mesh.edges[e].v[1]), e);

    auto inherit = [&](const Mesh&, std::int32_t a, std::int32_t b) {
        // boundary edges are either unsplit parent edges or halves of one
        if (a >= nv || b >= nv) {
            const std::int32_t mid = a >= nv ? a : b;
            const std::int32_t other = a >= nv ? b : a;
            const std::int32_t pe = mid_source_edge[mid - nv];
            const auto& pv = mesh.edges[pe].v;
            if (other != pv[0] && other != pv[1])
                throw std::logic_error("refine: boundary edge does not descend from a parent edge");
            return mesh.edges[pe].label;
        }
        const auto it = old_edge_ids.find(edge_key(a, b));
        if (it == old_edge_ids.end())
            throw std::logic_error("refine: boundary edge not found in parent mesh");
        return mesh.edges[it->second].label;
    };

    Mesh built = build_mesh(std::move(out.vertices), std::move(tris), inherit);
    built.generation = out.generation;
    built.parent_generation = out.parent_generation;
    built.parent_vertex_count = out.parent_vertex_count;
    built.midpoint_parents = std::move(out.midpoint_parents);
    return built;
}

ConformityReport validate_conformity(const Mesh& mesh) {
    auto fail = [](std::string what) { return ConformityReport{false, std::move(what)}; };

    for (std::int32_t t = 0; t < mesh.num_triangles(); ++t)
        if (!(mesh.area(t) > 0.0))
            return fail("triangle " + std::to_string(t) + " has non-positive area");

    // adjacency tables consistent with the triangle list
    std::unordered_map<std::uint64_t, std::array<std::int32_t, 2>> counts;
    counts.reserve(mesh.edges.size() * 2);
    for (std::int32_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        if (tr.refinement_edge < 0 || tr.refinement_edge > 2)
            return fail("triangle " + std::to_string(t) + " has invalid refinement edge");
        for (int k = 0; k < 3; ++k) {
            const std::int32_t e = mesh.tri_edges[t][k];
            if (e < 0 || e >= mesh.num_edges())
                return fail("triangle " + std::to_string(t) + " references missing edge");
            const Edge& ed = mesh.edges[e];
            if (edge_key(ed.v[0], ed.v[1]) != edge_key(tr.v[k], tr.v[(k + 1) % 3]))
                return fail("edge table mismatch at triangle " + std::to_string(t));
            if (ed.tri[0] != t && ed.tri[1] != t)
                return fail("edge " + std::to_string(e) + " does not list triangle " + std::to_string(t));
            auto [it, inserted] = counts.try_emplace(edge_key(ed.v[0], ed.v[1]),
                                                     std::array<std::int32_t, 2>{1, e});
            if (!inserted) it->second[0] += 1;
        }
    }
    if (counts.size() != mesh.edges.size()) return fail("edge table size mismatch");
    for (const auto& [key, ce] : counts) {
        (void)key;
        const Edge& ed = mesh.edges[ce[1]];
        const int expect = ed.tri[1] < 0 ? 1 : 2;
        if (ce[0] != expect)
            return fail("edge " + std::to_string(ce[1]) + " adjacency count " +
                        std::to_string(ce[0]) + " != " + std::to_string(expect));
        if (ce[0] == 2 && ed.label != BoundaryLabel::Interior)
            return fail("interior edge " + std::to_string(ce[1]) + " carries a boundary label");
        if (ce[0] == 1 && ed.label == BoundaryLabel::Interior)
            return fail("boundary edge " + std::to_string(ce[1]) + " is unlabeled");
    }

    // hanging nodes: a vertex strictly inside a single-sided edge
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    for (const auto& v : mesh.vertices) {
        min_x = std::min(min_x, v.x);
        max_x = std::max(max_x, v.x);
        min_y = std::min(min_y, v.y);
        max_y = std::max(max_y, v.y);
    }
    const int cells = std::clamp<int>(
        static_cast<int>(std::sqrt(static_cast<double>(mesh.num_vertices()))), 1, 1024);
    const double dx = std::max((max_x - min_x) / cells, 1e-30);
    const double dy = std::max((max_y - min_y) / cells, 1e-30);
    std::vector<std::vector<std::int32_t>> grid(static_cast<std::size_t>(cells) * cells);
    auto cell_of = [&](double x, double y) {
        const int ix = std::clamp<int>(static_cast<int>((x - min_x) / dx), 0, cells - 1);
        const int iy = std::clamp<int>(static_cast<int>((y - min_y) / dy), 0, cells - 1);
        return static_cast<std::size_t>(iy) * cells + ix;
    };
    for (std::int32_t v = 0; v < mesh.num_vertices(); ++v)
        grid[cell_of(mesh.vertices[v].x, mesh.vertices[v].y)].push_back(v);

    for (std::int32_t e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        const Vec2 a = mesh.pos(mesh.edges[e].v[0]);
        const Vec2 b = mesh.pos(mesh.edges[e].v[1]);
        const int ix0 = std::clamp<int>(static_cast<int>((std::min(a.x, b.x) - kGeomTol - min_x) / dx), 0, cells - 1);
        const int ix1 = std::clamp<int>(static_cast<int>((std::max(a.x, b.x) + kGeomTol - min_x) / dx), 0, cells - 1);
        const int iy0 = std::clamp<int>(static_cast<int>((std::min(a.y, b.y) - kGeomTol - min_y) / dy), 0, cells - 1);
        const int iy1 = std::clamp<int>(static_cast<int>((std::max(a.y, b.y) + kGeomTol - min_y) / dy), 0, cells - 1);
        const double len = norm(b - a);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                for (const std::int32_t v : grid[static_cast<std::size_t>(iy) * cells + ix]) {
                    if (v == mesh.edges[e].v[0] || v == mesh.edges[e].v[1]) continue;
                    const Vec2 p = mesh.pos(v);
                    if (!point_on_segment(p, a, b, kGeomTol)) continue;
                    const double t = dot(p - a, b - a) / (len * len);
                    if (t > kGeomTol && t < 1.0 - kGeomTol)
                        return fail("hanging node: vertex " + std::to_string(v) +
                                    " lies inside edge " + std::to_string(e));
                }
    }
    return {};
}

double shape_regularity(const Mesh& mesh) {
    double worst = 0.0;
    for (std::int32_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p0 = mesh.pos(tr.v[0]), p1 = mesh.pos(tr.v[1]), p2 = mesh.pos(tr.v[2]);
        const double a = mesh.area(t);
        const double perim = norm(p1 - p0) + norm(p2 - p1) + norm(p0 - p2);
        // rho = 2 * inradius = 4 * area / perimeter
        worst = std::max(worst, std::sqrt(a) * perim / (4.0 * a));
    }
    return worst;
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
    double min_x = mesh.vertices.empty() ? 0.0 : mesh.vertices[0].x;
    double max_x = min_x, min_y = mesh.vertices.empty() ? 0.0 : mesh.vertices[0].y, max_y = min_y;
    for (const auto& v : mesh.vertices) {
        min_x = std::min(min_x, v.x);
        max_x = std::max(max_x, v.x);
        min_y = std::min(min_y, v.y);
        max_y = std::max(max_y, v.y);
    }
    const int cells = std::clamp<int>(
        static_cast<int>(std::sqrt(static_cast<double>(std::max<std::int32_t>(mesh.num_triangles(), 1)))),
        4, 1024);
    nx_ = ny_ = cells;
    x0_ = min_x;
    y0_ = min_y;
    inv_dx_ = nx_ / std::max(max_x - min_x, 1e-30);
    inv_dy_ = ny_ / std::max(max_y - min_y, 1e-30);

    // CSR cell -> candidate triangles, two passes, ids stay ascending
    std::vector<std::int32_t> count(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    auto cell_range = [&](std::int32_t t, int& ix0, int& ix1, int& iy0, int& iy1) {
        const auto& tr = mesh_.triangles[t];
        double bx0 = mesh_.vertices[tr.v[0]].x, bx1 = bx0;
        double by0 = mesh_.vertices[tr.v[0]].y, by1 = by0;
        for (int k = 1; k < 3; ++k) {
            bx0 = std::min(bx0, mesh_.vertices[tr.v[k]].x);
            bx1 = std::max(bx1, mesh_.vertices[tr.v[k]].x);
            by0 = std::min(by0, mesh_.vertices[tr.v[k]].y);
            by1 = std::max(by1, mesh_.vertices[tr.v[k]].y);
        }
        ix0 = std::clamp<int>(static_cast<int>((bx0 - kGeomTol - x0_) * inv_dx_), 0, nx_ - 1);
        ix1 = std::clamp<int>(static_cast<int>((bx1 + kGeomTol - x0_) * inv_dx_), 0, nx_ - 1);
        iy0 = std::clamp<int>(static_cast<int>((by0 - kGeomTol - y0_) * inv_dy_), 0, ny_ - 1);
        iy1 = std::clamp<int>(static_cast<int>((by1 + kGeomTol - y0_) * inv_dy_), 0, ny_ - 1);
    };
    for (std::int32_t t = 0; t < mesh_.num_triangles(); ++t) {
        int ix0, ix1, iy0, iy1;
        cell_range(t, ix0, ix1, iy0, iy1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                ++count[static_cast<std::size_t>(iy) * nx_ + ix + 1];
    }
    for (std::size_t c = 1; c < count.size(); ++c) count[c] += count[c - 1];
    cell_ptr_ = count;
    cell_tris_.resize(count.back());
    std::vector<std::int32_t> fill(cell_ptr_.begin(), cell_ptr_.end() - 1);
    for (std::int32_t t = 0; t < mesh_.num_triangles(); ++t) {
        int ix0, ix1, iy0, iy1;
        cell_range(t, ix0, ix1, iy0, iy1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                cell_tris_[fill[static_cast<std::size_t>(iy) * nx_ + ix]++] = t;
    }
}

bool PointLocator::try_locate(Vec2 p, PointLocation& out) const {
    const int ix = std::clamp<int>(static_cast<int>((p.x - x0_) * inv_dx_), 0, nx_ - 1);
    const int iy = std::clamp<int>(static_cast<int>((p.y - y0_) * inv_dy_), 0, ny_ - 1);
    const std::size_t c = static_cast<std::size_t>(iy) * nx_ + ix;
    for (std::int32_t k = cell_ptr_[c]; k < cell_ptr_[c + 1]; ++k) {
        const std::int32_t t = cell_tris_[k];
        const auto& tr = mesh_.triangles[t];
        const Vec2 a = mesh_.pos(tr.v[0]), b = mesh_.pos(tr.v[1]), d = mesh_.pos(tr.v[2]);
        const double inv2a = 1.0 / signed_area2(a, b, d);
        const double l0 = signed_area2(p, b, d) * inv2a;
        if (l0 < -kGeomTol) continue;
        const double l1 = signed_area2(a, p, d) * inv2a;
        if (l1 < -kGeomTol) continue;
        const double l2 = 1.0 - l0 - l1;
        if (l2 < -kGeomTol) continue;
        out.tri = t; // candidates are ascending, first hit is the lowest id
        out.bary = {l0, l1, l2};
        return true;
    }
    return false;
}

PointLocation PointLocator::locate(Vec2 p) const {
    PointLocation out;
    if (!try_locate(p, out))
        throw std::domain_error("locate_point: (" + std::to_string(p.x) + ", " +
                                std::to_string(p.y) + ") is outside the mesh");
    return out;
}

PointLocation locate_point(const Mesh& mesh, Vec2 p) { return PointLocator(mesh).locate(p); }

} // namespace afem
