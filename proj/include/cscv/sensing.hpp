#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cscv/signal.hpp"

// Random measurement ensembles and the implementation/holdout row split.
// Entries are drawn row by row from counter-based streams keyed by
// (seed, row index), so the first j rows of a matrix never depend on how many
// rows exist in total: extending an ensemble with more measurements leaves
// every measurement already taken intact.

namespace cscv {

enum class EnsembleKind { Gaussian, Bernoulli };

// Dense row-major matrix plus the metadata needed to reproduce or rescale it.
// Copies are cheap: views produced by row_prefix/row_range share storage.
struct MeasurementEnsemble {
    int rows = 0;
    int cols = 0;
    EnsembleKind kind = EnsembleKind::Gaussian;
    double entry_variance = 0.0;
    std::uint64_t seed = 0;

    std::shared_ptr<const std::vector<double>> storage;
    int row_offset = 0;

    const double* row(int i) const { return storage->data() + (row_offset + i) * static_cast<std::size_t>(cols); }
    const double* data() const { return row(0); }
};

struct MeasurementPartition {
    MeasurementEnsemble phi;  // implementation rows, entry variance 1/n
    MeasurementEnsemble psi;  // holdout rows, entry variance 1/r
    int total_m = 0;
};

// Draw a rows x cols ensemble. Gaussian: N(0, entry_variance). Bernoulli:
// +/- sqrt(entry_variance) with equal probability. Same seed, same matrix.
MeasurementEnsemble draw_ensemble(int rows, int cols, EnsembleKind kind, double entry_variance,
                                  std::uint64_t seed);

// Split total_m rows into n = total_m - r implementation rows and r holdout
// rows, drawn from disjoint derived streams with variances 1/n and 1/r.
// Requires 1 <= r < total_m.
MeasurementPartition split(int total_m, int r, int cols, EnsembleKind kind, std::uint64_t seed);

// Exact matrix-vector product y = M x. Requires cols == x.length().
std::vector<double> measure(const MeasurementEnsemble& m, const DenseSignal& x);

// View of the first j rows (1 <= j <= rows). Entries are shared, not
// re-drawn; entry_variance metadata is rescaled to 1/j for decoder-side use.
MeasurementEnsemble row_prefix(const MeasurementEnsemble& m, int j);

// View of rows [begin, end). Metadata variance is kept; used to address the
// holdout suffix of a staged ensemble.
MeasurementEnsemble row_range(const MeasurementEnsemble& m, int begin, int end);

// y = scale * (rows [begin,end) of M) * x, without materializing the view.
std::vector<double> measure_range(const MeasurementEnsemble& m, std::span<const double> x,
                                  int begin, int end, double scale);

} // namespace cscv
