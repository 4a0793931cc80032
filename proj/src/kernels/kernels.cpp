#include "cscv/kernels.hpp"

#include <atomic>
#include <cstring>

#include "cscv/errors.hpp"
#include "kernels_internal.hpp"

namespace cscv::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
    }
    if (i < n)
        s0 += a[i] * b[i];
    return s0 + s1;
}

double sumsq_scalar(const double* a, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        s0 += a[i] * a[i];
        s1 += a[i + 1] * a[i + 1];
    }
    if (i < n)
        s0 += a[i] * a[i];
    return s0 + s1;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += alpha * x[i];
}

// ikj order: streams B rows, accumulates into C rows held in cache.
void matmul_scalar(const double* a, std::size_t m, std::size_t k, const double* b, std::size_t n,
                   double* c) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l)
            axpy_scalar(arow[l], b + l * n, crow, n);
    }
}

} // namespace

const KernelTable kScalarTable = {dot_scalar, sumsq_scalar, axpy_scalar, matmul_scalar, "scalar"};

namespace {

const KernelTable* pick_auto() {
    if (const KernelTable* t = avx2_table(); t && avx2_runtime_ok())
        return t;
    return &kScalarTable;
}

std::atomic<const KernelTable*> g_table{nullptr};

const KernelTable* table() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        t = pick_auto();
        g_table.store(t, std::memory_order_release);
    }
    return t;
}

} // namespace

const char* active_backend() {
    return table()->name;
}

void set_backend(Backend b) {
    switch (b) {
    case Backend::Auto:
        g_table.store(pick_auto(), std::memory_order_release);
        return;
    case Backend::Scalar:
        g_table.store(&kScalarTable, std::memory_order_release);
        return;
    case Backend::Avx2:
        if (const KernelTable* t = avx2_table(); t && avx2_runtime_ok()) {
            g_table.store(t, std::memory_order_release);
            return;
        }
        throw InvalidArgument("avx2 backend not available on this machine");
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    return table()->dot(a, b, n);
}

double sumsq(const double* a, std::size_t n) {
    return table()->sumsq(a, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    table()->axpy(alpha, x, y, n);
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    const KernelTable* t = table();
    for (std::size_t i = 0; i < rows; ++i)
        y[i] = t->dot(a + i * cols, x, cols);
}

void gemv_t(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    const KernelTable* t = table();
    std::memset(y, 0, cols * sizeof(double));
    for (std::size_t i = 0; i < rows; ++i)
        t->axpy(x[i], a + i * cols, y, cols);
}

void matmul(const double* a, std::size_t m, std::size_t k, const double* b, std::size_t n,
            double* c) {
    table()->matmul(a, m, k, b, n, c);
}

} // namespace cscv::kernels
