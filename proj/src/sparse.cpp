#include "afem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "afem/kernels.hpp"
#include "afem/mesh.hpp"
#include "afem/parallel.hpp"

namespace afem {

namespace {
constexpr std::size_t kRowGrain = 4096;
}

double& SparseMatrix::at(std::int32_t i, std::int32_t j) {
    const auto b = cols.begin() + row_ptr[i], e = cols.begin() + row_ptr[i + 1];
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j) throw std::out_of_range("SparseMatrix::at: entry not in pattern");
    return vals[static_cast<std::size_t>(it - cols.begin())];
}

double SparseMatrix::get(std::int32_t i, std::int32_t j) const {
    const auto b = cols.begin() + row_ptr[i], e = cols.begin() + row_ptr[i + 1];
    const auto it = std::lower_bound(b, e, j);
    return (it == e || *it != j) ? 0.0 : vals[static_cast<std::size_t>(it - cols.begin())];
}

void SparseMatrix::set_zero() { std::fill(vals.begin(), vals.end(), 0.0); }

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(n);
    for (std::int32_t i = 0; i < n; ++i) d[i] = get(i, i);
    return d;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (const double v : vals) m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::symmetry_defect() const {
    double worst = 0.0;
    for (std::int32_t i = 0; i < n; ++i)
        for (std::int32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            worst = std::max(worst, std::abs(vals[k] - get(cols[k], i)));
    return worst;
}

void SparseMatrix::multiply(const double* x, double* y) const {
    parallel_blocks(static_cast<std::size_t>(n), kRowGrain,
                    [&](std::size_t, std::size_t b, std::size_t e) {
                        kernels::spmv_dot_range(static_cast<std::int32_t>(b),
                                                static_cast<std::int32_t>(e), row_ptr.data(),
                                                cols.data(), vals.data(), x, y);
                    });
}

double SparseMatrix::multiply_dot(const double* x, double* y) const {
    const std::size_t blocks = (static_cast<std::size_t>(n) + kRowGrain - 1) / kRowGrain;
    std::vector<double> partial(blocks, 0.0);
    parallel_blocks(static_cast<std::size_t>(n), kRowGrain,
                    [&](std::size_t blk, std::size_t b, std::size_t e) {
                        partial[blk] = kernels::spmv_dot_range(
                            static_cast<std::int32_t>(b), static_cast<std::int32_t>(e),
                            row_ptr.data(), cols.data(), vals.data(), x, y);
                    });
    double s = 0.0;
    for (const double v : partial) s += v;
    return s;
}

SparseMatrix vertex_pattern(const Mesh& mesh) {
    const std::int32_t nv = mesh.num_vertices();
    // slot count per row: self + both partners of every incident triangle
    std::vector<std::int32_t> cap(nv + 1, 0);
    for (const auto& t : mesh.triangles)
        for (const auto v : t.v) cap[v + 1] += 2;
    for (std::int32_t i = 0; i < nv; ++i) cap[i + 1] += 1;
    for (std::int32_t i = 0; i < nv; ++i) cap[i + 1] += cap[i];

    std::vector<std::int32_t> slots(cap.back());
    std::vector<std::int32_t> fill(cap.begin(), cap.end() - 1);
    for (std::int32_t i = 0; i < nv; ++i) slots[fill[i]++] = i;
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            slots[fill[t.v[k]]++] = t.v[(k + 1) % 3];
            slots[fill[t.v[k]]++] = t.v[(k + 2) % 3];
        }

    SparseMatrix m;
    m.n = nv;
    m.row_ptr.assign(nv + 1, 0);
    for (std::int32_t i = 0; i < nv; ++i) {
        const auto b = slots.begin() + cap[i], e = slots.begin() + cap[i + 1];
        std::sort(b, e);
        m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<std::int32_t>(std::unique(b, e) - b);
    }
    m.cols.resize(m.row_ptr.back());
    for (std::int32_t i = 0; i < nv; ++i) {
        const auto b = slots.begin() + cap[i];
        std::copy(b, b + (m.row_ptr[i + 1] - m.row_ptr[i]), m.cols.begin() + m.row_ptr[i]);
    }
    m.vals.assign(m.cols.size(), 0.0);
    return m;
}

} // namespace afem
