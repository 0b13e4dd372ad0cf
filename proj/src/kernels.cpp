#include "afem/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace afem::kernels {

#ifdef AFEM_HAVE_AVX2
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void aypx(double a, const double* x, double* y, std::size_t n);
double spmv_dot_range(std::int32_t row_begin, std::int32_t row_end,
                      const std::int32_t* row_ptr, const std::int32_t* cols,
                      const double* vals, const double* x, double* y);
CgUpdate cg_update_range(std::size_t begin, std::size_t end, double a,
                         const double* p, const double* q, const double* dinv,
                         double* x, double* r, double* z);
} // namespace avx2
#endif

bool avx2_available() {
#if defined(AFEM_HAVE_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa detect_isa() {
    if (const char* env = std::getenv("AFEM_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Isa::Avx2;
    }
    return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa> g_isa{detect_isa()};

} // namespace

Isa active_isa() { return g_isa.load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
    g_isa.store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void aypx(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

double spmv_dot_range(std::int32_t row_begin, std::int32_t row_end,
                      const std::int32_t* row_ptr, const std::int32_t* cols,
                      const double* vals, const double* x, double* y) {
    double xy = 0.0;
    for (std::int32_t i = row_begin; i < row_end; ++i) {
        double s = 0.0;
        for (std::int32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
        xy += x[i] * s;
    }
    return xy;
}

CgUpdate cg_update_range(std::size_t begin, std::size_t end, double a,
                         const double* p, const double* q, const double* dinv,
                         double* x, double* r, double* z) {
    CgUpdate out;
    for (std::size_t i = begin; i < end; ++i) {
        x[i] += a * p[i];
        const double ri = r[i] - a * q[i];
        r[i] = ri;
        const double zi = dinv[i] * ri;
        z[i] = zi;
        out.rr += ri * ri;
        out.rz += ri * zi;
    }
    return out;
}

} // namespace scalar

double dot(const double* x, const double* y, std::size_t n) {
#ifdef AFEM_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return avx2::dot(x, y, n);
#endif
    return scalar::dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
#ifdef AFEM_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return avx2::axpy(a, x, y, n);
#endif
    scalar::axpy(a, x, y, n);
}

void aypx(double a, const double* x, double* y, std::size_t n) {
#ifdef AFEM_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return avx2::aypx(a, x, y, n);
#endif
    scalar::aypx(a, x, y, n);
}

double spmv_dot_range(std::int32_t row_begin, std::int32_t row_end,
                      const std::int32_t* row_ptr, const std::int32_t* cols,
                      const double* vals, const double* x, double* y) {
#ifdef AFEM_HAVE_AVX2
    if (active_isa() == Isa::Avx2)
        return avx2::spmv_dot_range(row_begin, row_end, row_ptr, cols, vals, x, y);
#endif
    return scalar::spmv_dot_range(row_begin, row_end, row_ptr, cols, vals, x, y);
}

CgUpdate cg_update_range(std::size_t begin, std::size_t end, double a,
                         const double* p, const double* q, const double* dinv,
                         double* x, double* r, double* z) {
#ifdef AFEM_HAVE_AVX2
    if (active_isa() == Isa::Avx2) return avx2::cg_update_range(begin, end, a, p, q, dinv, x, r, z);
#endif
    return scalar::cg_update_range(begin, end, a, p, q, dinv, x, r, z);
}

} // namespace afem::kernels
