#include "cscv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cscv/errors.hpp"
#include "cscv/kernels.hpp"
#include "cscv/rng.hpp"

namespace cscv {

int sparsity(const DenseSignal& x) {
    int count = 0;
    for (double v : x.values)
        if (v != 0.0)
            ++count;
    return count;
}

namespace {

// Indices of the k largest magnitudes; ties keep the lowest index.
std::vector<int> top_k_indices(const std::vector<double>& v, int k) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::abs(v[a]) > std::abs(v[b]);
    });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace

KTermReport best_k_term(const DenseSignal& x, int k) {
    if (k < 0 || k > x.length())
        throw InvalidArgument("best_k_term: k must be in [0, length]");
    KTermReport report;
    report.k = k;
    report.support = top_k_indices(x.values, k);

    std::vector<char> keep(x.values.size(), 0);
    for (int i : report.support)
        keep[i] = 1;
    double l1 = 0.0, l2 = 0.0;
    for (int i = 0; i < x.length(); ++i) {
        if (!keep[i]) {
            l1 += std::abs(x.values[i]);
            l2 += x.values[i] * x.values[i];
        }
    }
    report.residual_l1 = l1;
    report.residual_l2 = std::sqrt(l2);
    return report;
}

DenseSignal trim_to_k(const DenseSignal& x, int k) {
    if (k < 0 || k > x.length())
        throw InvalidArgument("trim_to_k: k must be in [0, length]");
    DenseSignal out;
    out.values.assign(x.values.size(), 0.0);
    for (int i : top_k_indices(x.values, k))
        out.values[i] = x.values[i];
    return out;
}

int k_of_m(int m, int n) {
    if (m < 1 || m >= n)
        throw InvalidArgument("k_of_m: need 1 <= m < n");
    return static_cast<int>(std::floor(2.0 * m / std::log(static_cast<double>(n) / m)));
}

DenseSignal make_spike_signal(int n, int d, double noise_std, std::uint64_t seed) {
    if (n < 1 || d < 1 || d > n)
        throw InvalidArgument("make_spike_signal: need 1 <= d <= n");
    if (!(noise_std >= 0.0))
        throw InvalidArgument("make_spike_signal: noise_std must be >= 0");
    DenseSignal x;
    x.values.assign(n, 0.0);
    for (int i = 0; i < d; ++i)
        x.values[i] = 1.0;
    if (noise_std > 0.0) {
        CounterRng rng(seed, 0);
        for (int i = 0; i < n; ++i)
            x.values[i] += noise_std * rng.next_gaussian();
    }
    const double norm = std::sqrt(kernels::sumsq(x.values.data(), x.values.size()));
    if (norm == 0.0)
        throw DegenerateInput("make_spike_signal: zero vector before normalization");
    for (double& v : x.values)
        v /= norm;
    return x;
}

DenseSignal make_compressible_signal(int n, const CompressibilityModel& model,
                                     std::uint64_t seed) {
    if (n < 1)
        throw InvalidArgument("make_compressible_signal: need n >= 1");
    if (!(model.s > 1.0))
        throw InvalidArgument("make_compressible_signal: need s > 1");
    if (!(model.c_s > 0.0))
        throw InvalidArgument("make_compressible_signal: need c_s > 0");

    CounterRng signs(seed, 0);
    CounterRng shuffle(seed, 1);

    std::vector<double> mags(n);
    for (int j = 0; j < n; ++j)
        mags[j] = model.c_s * std::pow(static_cast<double>(j + 1), -model.s);

    std::vector<int> pos(n);
    std::iota(pos.begin(), pos.end(), 0);
    for (int j = n - 1; j > 0; --j)
        std::swap(pos[j], pos[shuffle.next_below(static_cast<std::uint64_t>(j) + 1)]);

    DenseSignal x;
    x.values.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
        x.values[pos[j]] = signs.next_sign() * mags[j];
    return x;
}

void save_signal(const DenseSignal& x, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("save_signal: cannot open " + path);
    out << x.length() << "\n";
    char buf[40];
    for (double v : x.values) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << "\n";
    }
    if (!out)
        throw IoError("save_signal: write failed for " + path);
}

DenseSignal load_signal(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("load_signal: cannot open " + path);
    long long n = -1;
    if (!(in >> n) || n < 0)
        throw IoError("load_signal: bad length line in " + path);
    DenseSignal x;
    x.values.resize(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        if (!(in >> x.values[i]))
            throw IoError("load_signal: truncated value list in " + path);
        if (!std::isfinite(x.values[i]))
            throw IoError("load_signal: non-finite value in " + path);
    }
    return x;
}

} // namespace cscv
