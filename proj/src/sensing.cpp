#include "cscv/sensing.hpp"

#include <cmath>

#include "cscv/errors.hpp"
#include "cscv/kernels.hpp"
#include "cscv/rng.hpp"

namespace cscv {

MeasurementEnsemble draw_ensemble(int rows, int cols, EnsembleKind kind, double entry_variance,
                                  std::uint64_t seed) {
    if (rows < 1 || cols < 1)
        throw InvalidArgument("draw_ensemble: rows and cols must be >= 1");
    if (!(entry_variance > 0.0))
        throw InvalidArgument("draw_ensemble: entry_variance must be > 0");

    auto data = std::make_shared<std::vector<double>>(static_cast<std::size_t>(rows) * cols);
    const double sd = std::sqrt(entry_variance);
    for (int i = 0; i < rows; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        double* row = data->data() + static_cast<std::size_t>(i) * cols;
        if (kind == EnsembleKind::Gaussian) {
            for (int j = 0; j < cols; ++j)
                row[j] = sd * rng.next_gaussian();
        } else {
            for (int j = 0; j < cols; ++j)
                row[j] = sd * rng.next_sign();
        }
    }

    MeasurementEnsemble m;
    m.rows = rows;
    m.cols = cols;
    m.kind = kind;
    m.entry_variance = entry_variance;
    m.seed = seed;
    m.storage = std::move(data);
    return m;
}

MeasurementPartition split(int total_m, int r, int cols, EnsembleKind kind, std::uint64_t seed) {
    if (r < 1 || r >= total_m)
        throw InvalidArgument("split: need 1 <= r < total_m");
    const int n = total_m - r;
    MeasurementPartition p;
    p.phi = draw_ensemble(n, cols, kind, 1.0 / n, derive_seed(seed, 0));
    p.psi = draw_ensemble(r, cols, kind, 1.0 / r, derive_seed(seed, 1));
    p.total_m = total_m;
    return p;
}

std::vector<double> measure(const MeasurementEnsemble& m, const DenseSignal& x) {
    if (m.cols != x.length())
        throw InvalidArgument("measure: signal length does not match ensemble cols");
    std::vector<double> y(m.rows);
    kernels::gemv(m.data(), m.rows, m.cols, x.values.data(), y.data());
    return y;
}

MeasurementEnsemble row_prefix(const MeasurementEnsemble& m, int j) {
    if (j < 1 || j > m.rows)
        throw InvalidArgument("row_prefix: need 1 <= j <= rows");
    MeasurementEnsemble v = m;
    v.rows = j;
    v.entry_variance = 1.0 / j;
    return v;
}

MeasurementEnsemble row_range(const MeasurementEnsemble& m, int begin, int end) {
    if (begin < 0 || end > m.rows || begin >= end)
        throw InvalidArgument("row_range: need 0 <= begin < end <= rows");
    MeasurementEnsemble v = m;
    v.row_offset = m.row_offset + begin;
    v.rows = end - begin;
    return v;
}

std::vector<double> measure_range(const MeasurementEnsemble& m, std::span<const double> x,
                                  int begin, int end, double scale) {
    if (static_cast<int>(x.size()) != m.cols)
        throw InvalidArgument("measure_range: signal length does not match ensemble cols");
    if (begin < 0 || end > m.rows || begin >= end)
        throw InvalidArgument("measure_range: need 0 <= begin < end <= rows");
    std::vector<double> y(end - begin);
    kernels::gemv(m.row(begin), end - begin, m.cols, x.data(), y.data());
    if (scale != 1.0)
        for (double& v : y)
            v *= scale;
    return y;
}

} // namespace cscv
