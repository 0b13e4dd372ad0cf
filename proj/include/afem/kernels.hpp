#pragma once

#include <cstddef>
#include <cstdint>

// Scalar reference kernels for the linear-algebra inner loops plus AVX2
// variants selected at runtime. The AVX2 build of each kernel is compiled
// only when the compiler supports -mavx2/-mfma and is dispatched only when
// the CPU reports AVX2+FMA. Set AFEM_SIMD=scalar|avx2 to override.
namespace afem::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
void force_isa(Isa isa); // test hook, overrides detection and AFEM_SIMD
bool avx2_available();
const char* isa_name(Isa isa);

// y[i] accumulated as written; all kernels are deterministic for a fixed ISA.
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n); // y += a*x
void aypx(double a, const double* x, double* y, std::size_t n); // y = x + a*y

// CSR rows [row_begin, row_end): y = A*x on that range, returns partial dot(x, y).
double spmv_dot_range(std::int32_t row_begin, std::int32_t row_end,
                      const std::int32_t* row_ptr, const std::int32_t* cols,
                      const double* vals, const double* x, double* y);

struct CgUpdate {
    double rr = 0.0; // dot(r, r) after update
    double rz = 0.0; // dot(r, z) after update
};

// Fused PCG tail: x += a*p, r -= a*q, z = dinv.*r, returns (r.r, r.z) over [begin, end).
CgUpdate cg_update_range(std::size_t begin, std::size_t end, double a,
                         const double* p, const double* q, const double* dinv,
                         double* x, double* r, double* z);

} // namespace afem::kernels
