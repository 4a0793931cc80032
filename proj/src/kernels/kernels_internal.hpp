#pragma once

#include <cstddef>

namespace cscv::kernels {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*matmul)(const double*, std::size_t, std::size_t, const double*, std::size_t, double*);
    const char* name;
};

extern const KernelTable kScalarTable;

// Null when this binary was built without AVX2 support.
const KernelTable* avx2_table();

// True when the running CPU can execute the AVX2+FMA variants.
bool avx2_runtime_ok();

} // namespace cscv::kernels
