#include "kernels_internal.hpp"

#include <cstring>

#if defined(CSCV_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
#define CSCV_AVX2_TU 1
#include <immintrin.h>
#endif

namespace cscv::kernels {

#if CSCV_AVX2_TU

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

double sumsq_avx2(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d v0 = _mm256_loadu_pd(a + i);
        const __m256d v1 = _mm256_loadu_pd(a + i + 4);
        acc0 = _mm256_fmadd_pd(v0, v0, acc0);
        acc1 = _mm256_fmadd_pd(v1, v1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(a + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        s += a[i] * a[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i)
        y[i] += alpha * x[i];
}

// 4-row blocks so each B row is read once per block instead of once per C row.
void matmul_avx2(const double* a, std::size_t m, std::size_t k, const double* b, std::size_t n,
                 double* c) {
    std::memset(c, 0, m * n * sizeof(double));
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const double* a0 = a + i * k;
        const double* a1 = a0 + k;
        const double* a2 = a1 + k;
        const double* a3 = a2 + k;
        double* c0 = c + i * n;
        double* c1 = c0 + n;
        double* c2 = c1 + n;
        double* c3 = c2 + n;
        for (std::size_t l = 0; l < k; ++l) {
            const double* brow = b + l * n;
            const __m256d v0 = _mm256_set1_pd(a0[l]);
            const __m256d v1 = _mm256_set1_pd(a1[l]);
            const __m256d v2 = _mm256_set1_pd(a2[l]);
            const __m256d v3 = _mm256_set1_pd(a3[l]);
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                const __m256d bv = _mm256_loadu_pd(brow + j);
                _mm256_storeu_pd(c0 + j, _mm256_fmadd_pd(v0, bv, _mm256_loadu_pd(c0 + j)));
                _mm256_storeu_pd(c1 + j, _mm256_fmadd_pd(v1, bv, _mm256_loadu_pd(c1 + j)));
                _mm256_storeu_pd(c2 + j, _mm256_fmadd_pd(v2, bv, _mm256_loadu_pd(c2 + j)));
                _mm256_storeu_pd(c3 + j, _mm256_fmadd_pd(v3, bv, _mm256_loadu_pd(c3 + j)));
            }
            for (; j < n; ++j) {
                const double bj = brow[j];
                c0[j] += a0[l] * bj;
                c1[j] += a1[l] * bj;
                c2[j] += a2[l] * bj;
                c3[j] += a3[l] * bj;
            }
        }
    }
    for (; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l)
            axpy_avx2(arow[l], b + l * n, crow, n);
    }
}

const KernelTable kAvx2Table = {dot_avx2, sumsq_avx2, axpy_avx2, matmul_avx2, "avx2"};

} // namespace

const KernelTable* avx2_table() {
    return &kAvx2Table;
}

bool avx2_runtime_ok() {
#if defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

#else // !CSCV_AVX2_TU

const KernelTable* avx2_table() {
    return nullptr;
}

bool avx2_runtime_ok() {
    return false;
}

#endif

} // namespace cscv::kernels
