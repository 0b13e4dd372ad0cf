#pragma once

#include <cstdint>
#include <vector>

namespace afem {

class Mesh;

// Square CSR matrix with a symmetric sparsity pattern.
class SparseMatrix {
public:
    std::int32_t n = 0;
    std::vector<std::int32_t> row_ptr; // size n+1
    std::vector<std::int32_t> cols;    // ascending within each row
    std::vector<double> vals;

    double& at(std::int32_t i, std::int32_t j);      // throws if (i,j) not in pattern
    double get(std::int32_t i, std::int32_t j) const; // 0 outside the pattern

    void set_zero();
    std::vector<double> diagonal() const;
    double max_abs() const;
    // max |A_ij - A_ji| over the pattern
    double symmetry_defect() const;

    // y = A x (and the fused variant returning dot(x, y)); deterministic for
    // any AFEM_THREADS because partial sums reduce in fixed block order.
    void multiply(const double* x, double* y) const;
    double multiply_dot(const double* x, double* y) const;
};

// Vertex-adjacency pattern (including the diagonal) with zero values.
SparseMatrix vertex_pattern(const Mesh& mesh);

} // namespace afem
