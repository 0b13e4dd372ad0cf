#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace afem {

class Mesh;

// Nodal coefficients of a piecewise-linear function on a specific mesh
// generation (one value per vertex).
struct FeFunction {
    int generation = 0;
    std::vector<double> coeffs;

    static FeFunction zeros(const Mesh& mesh);
};

// Throws if u is not bound to this mesh (generation or length mismatch).
void check_bound(const FeFunction& u, const Mesh& mesh, const char* where);

// Plain-text serialization ("afem-fn v1").
void write_fe_function(const FeFunction& u, std::ostream& os);
FeFunction read_fe_function(std::istream& is);

} // namespace afem
