#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Signal construction and k-term approximation. Sparsity here means exact
// zeros: an entry counts toward the support only when it is nonzero, and
// best-k selection keeps the k largest magnitudes with ties broken by the
// lowest index so every quantity derived from a signal is deterministic.

namespace cscv {

struct DenseSignal {
    std::vector<double> values;

    int length() const { return static_cast<int>(values.size()); }
};

struct KTermReport {
    int k = 0;
    std::vector<int> support;  // ascending indices of the kept entries
    double residual_l1 = 0.0;  // ||x - x_k||_1
    double residual_l2 = 0.0;  // ||x - x_k||_2, i.e. sigma_k in the l2 metric
};

// Power-law magnitude model: sorted magnitudes equal c_s * j^(-s), j = 1..N.
struct CompressibilityModel {
    double s = 2.0;
    double c_s = 1.0;
};

// Number of entries with |x_i| > 0 (exact zero test).
int sparsity(const DenseSignal& x);

// Best k-term approximation report. 0 <= k <= length.
KTermReport best_k_term(const DenseSignal& x, int k);

// Copy of x with everything outside the best-k support zeroed.
DenseSignal trim_to_k(const DenseSignal& x, int k);

// Working sparsity target for m measurements in ambient dimension n:
// floor(2m / ln(n/m)). Requires 1 <= m < n.
int k_of_m(int m, int n);

// d spikes of height 1 in the first d slots, i.i.d. N(0, noise_std^2) added to
// every entry, then rescaled to unit l2 norm. noise_std >= 0, 1 <= d <= n.
DenseSignal make_spike_signal(int n, int d, double noise_std, std::uint64_t seed);

// Exact power-law magnitude profile with random signs and a random
// permutation of positions. Requires s > 1 (summable tails) and c_s > 0.
DenseSignal make_compressible_signal(int n, const CompressibilityModel& model,
                                     std::uint64_t seed);

// Flat text format: first line N, then one value per line at 17 significant
// digits (round-trips double exactly).
void save_signal(const DenseSignal& x, const std::string& path);
DenseSignal load_signal(const std::string& path);

} // namespace cscv
