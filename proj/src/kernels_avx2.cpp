#ifdef AFEM_HAVE_AVX2

#include "afem/kernels.hpp"

#include <immintrin.h>

namespace afem::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

} // namespace

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void aypx(double a, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

double spmv_dot_range(std::int32_t row_begin, std::int32_t row_end,
                      const std::int32_t* row_ptr, const std::int32_t* cols,
                      const double* vals, const double* x, double* y) {
    double xy = 0.0;
    for (std::int32_t i = row_begin; i < row_end; ++i) {
        const std::int32_t b = row_ptr[i], e = row_ptr[i + 1];
        __m256d acc = _mm256_setzero_pd();
        std::int32_t k = b;
        for (; k + 4 <= e; k += 4) {
            __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
            __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
        }
        double s = hsum(acc);
        for (; k < e; ++k) s += vals[k] * x[cols[k]];
        y[i] = s;
        xy += x[i] * s;
    }
    return xy;
}

CgUpdate cg_update_range(std::size_t begin, std::size_t end, double a,
                         const double* p, const double* q, const double* dinv,
                         double* x, double* r, double* z) {
    const __m256d av = _mm256_set1_pd(a);
    __m256d rr = _mm256_setzero_pd();
    __m256d rz = _mm256_setzero_pd();
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
        __m256d xv = _mm256_fmadd_pd(av, _mm256_loadu_pd(p + i), _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(x + i, xv);
        __m256d rv = _mm256_fnmadd_pd(av, _mm256_loadu_pd(q + i), _mm256_loadu_pd(r + i));
        _mm256_storeu_pd(r + i, rv);
        __m256d zv = _mm256_mul_pd(_mm256_loadu_pd(dinv + i), rv);
        _mm256_storeu_pd(z + i, zv);
        rr = _mm256_fmadd_pd(rv, rv, rr);
        rz = _mm256_fmadd_pd(rv, zv, rz);
    }
    CgUpdate out{hsum(rr), hsum(rz)};
    for (; i < end; ++i) {
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

} // namespace afem::kernels::avx2

#endif // AFEM_HAVE_AVX2
