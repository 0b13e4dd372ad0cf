#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "afem/mesh.hpp"

namespace afem {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void bad_format(const std::string& what) {
    throw std::runtime_error("afem-mesh: " + what);
}

} // namespace

void write_mesh(const Mesh& mesh, std::ostream& os) {
    os << "afem-mesh v1\n";
    os << mesh.num_vertices() << "\n";
    for (const auto& v : mesh.vertices) os << fmt_double(v.x) << " " << fmt_double(v.y) << "\n";
    os << mesh.num_triangles() << "\n";
    for (const auto& t : mesh.triangles)
        os << t.v[0] << " " << t.v[1] << " " << t.v[2] << " " << int(t.refinement_edge) << " "
           << fmt_double(t.sigma) << "\n";
    std::int32_t n_boundary = 0;
    for (std::int32_t e = 0; e < mesh.num_edges(); ++e)
        if (mesh.is_boundary_edge(e)) ++n_boundary;
    os << n_boundary << "\n";
    for (std::int32_t e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.is_boundary_edge(e)) continue;
        const Edge& ed = mesh.edges[e];
        os << ed.v[0] << " " << ed.v[1] << " " << to_string(ed.label) << "\n";
    }
}

Mesh read_mesh(std::istream& is) {
    std::string magic, version;
    is >> magic >> version;
    if (magic != "afem-mesh" || version != "v1") bad_format("bad header");

    std::int64_t nv = 0;
    is >> nv;
    if (!is || nv < 0) bad_format("bad vertex count");
    std::vector<Vertex> vertices(nv);
    for (auto& v : vertices) is >> v.x >> v.y;

    std::int64_t nt = 0;
    is >> nt;
    if (!is || nt < 0) bad_format("bad triangle count");
    std::vector<Triangle> tris(nt);
    for (auto& t : tris) {
        int re = 0;
        is >> t.v[0] >> t.v[1] >> t.v[2] >> re >> t.sigma;
        if (re < 0 || re > 2) bad_format("refinement edge out of range");
        t.refinement_edge = static_cast<std::int8_t>(re);
        for (const auto id : t.v)
            if (id < 0 || id >= nv) bad_format("vertex id out of range");
    }

    std::int64_t nb = 0;
    is >> nb;
    if (!is || nb < 0) bad_format("bad boundary edge count");
    std::unordered_map<std::int64_t, BoundaryLabel> labels;
    labels.reserve(static_cast<std::size_t>(nb) * 2);
    for (std::int64_t i = 0; i < nb; ++i) {
        std::int32_t a = 0, b = 0;
        std::string text;
        is >> a >> b >> text;
        if (!is) bad_format("truncated boundary edge line");
        if (a > b) std::swap(a, b);
        labels[(static_cast<std::int64_t>(a) << 32) | b] = parse_boundary_label(text);
    }

    auto classify = [&labels](const Mesh& m, std::int32_t a, std::int32_t b) {
        (void)m;
        if (a > b) std::swap(a, b);
        const auto it = labels.find((static_cast<std::int64_t>(a) << 32) | b);
        if (it == labels.end())
            bad_format("boundary edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") has no label line");
        return it->second;
    };
    return build_mesh(std::move(vertices), std::move(tris), classify);
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_mesh(mesh, os);
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_mesh(is);
}

void write_vtk(const Mesh& mesh, const std::string& path, const std::vector<double>* vertex_field,
               const std::string& field_name) {
    if (vertex_field && vertex_field->size() != mesh.vertices.size())
        throw std::invalid_argument("write_vtk: field length mismatch");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "# vtk DataFile Version 3.0\n";
    os << "afem mesh\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& v : mesh.vertices) os << fmt_double(v.x) << " " << fmt_double(v.y) << " 0\n";
    os << "CELLS " << mesh.num_triangles() << " " << 4 * static_cast<std::int64_t>(mesh.num_triangles())
       << "\n";
    for (const auto& t : mesh.triangles) os << "3 " << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
    os << "CELL_TYPES " << mesh.num_triangles() << "\n";
    for (std::int32_t t = 0; t < mesh.num_triangles(); ++t) os << "5\n";
    os << "CELL_DATA " << mesh.num_triangles() << "\n";
    os << "SCALARS sigma double 1\nLOOKUP_TABLE default\n";
    for (const auto& t : mesh.triangles) os << fmt_double(t.sigma) << "\n";
    if (vertex_field) {
        os << "POINT_DATA " << mesh.num_vertices() << "\n";
        os << "SCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
        for (const double v : *vertex_field) os << fmt_double(v) << "\n";
    }
}

} // namespace afem
