#pragma once

#include <cstddef>

// Dense double-precision kernels behind a runtime-selected backend. The
// scalar implementations are the reference; the AVX2+FMA variants must agree
// with them up to summation-order rounding and are picked at startup when the
// CPU supports them. Everything above this layer (measurement, correlations,
// QR updates, CV scoring) is expressed in terms of these primitives.

namespace cscv::kernels {

enum class Backend { Auto, Scalar, Avx2 };

// Returns the name of the backend currently in effect ("scalar" or "avx2").
const char* active_backend();

// Force a backend; Backend::Auto re-probes the CPU. Throws InvalidArgument if
// the requested backend is not available on this machine. Used by the
// equivalence tests; not thread-safe against concurrent kernel calls.
void set_backend(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sumsq(const double* a, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

// Row-major A (rows x cols): y = A x.
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

// Row-major A (rows x cols): y = A^T x  (correlation pass; y has cols entries).
void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

// Row-major C (m x n) = A (m x k) * B (k x n). Overwrites C.
void matmul(const double* a, std::size_t m, std::size_t k, const double* b, std::size_t n,
            double* c);

} // namespace cscv::kernels
