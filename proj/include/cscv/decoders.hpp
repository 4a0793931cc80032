#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cscv/jl_cv.hpp"
#include "cscv/sensing.hpp"
#include "cscv/signal.hpp"

// Greedy and l1 decoders. Both expose every intermediate estimate as a
// first-class candidate list: holdout validation selects among them, so the
// sequence itself (not just the final iterate) is the decoder's output.

namespace cscv {

enum class Provenance { OmpIteration, HomotopyKink, MeasurementCount };

struct EstimateSequence {
    std::vector<DenseSignal> candidates;
    Provenance provenance = Provenance::OmpIteration;
    // Per-candidate parameter: iteration number, kink tau, or row count.
    std::vector<double> params;
};

// Orthogonal matching pursuit for k iterations. Candidate j is the least
// squares fit on the greedily grown support of size j, so each candidate is
// at most j-sparse and the measurement residual is orthogonal to the selected
// columns. Requires 1 <= k <= rows. warm_support seeds the support (used by
// staged decoding when measurements grow); its indices count toward k.
EstimateSequence omp_decode(const MeasurementEnsemble& phi, std::span<const double> y, int k,
                            std::span<const int> warm_support = {});

// Least squares on an explicit support via orthogonal factorization.
DenseSignal least_squares_on_support(const MeasurementEnsemble& phi, std::span<const double> y,
                                     std::span<const int> support);

struct HomotopyKink {
    double tau = 0.0;
    DenseSignal solution;
    std::vector<std::int8_t> sign_pattern;  // sign of each entry, 0 off-support
};

struct HomotopyPath {
    std::vector<HomotopyKink> kinks;  // tau strictly decreasing
    double tau_max = 0.0;
    bool truncated = false;
};

inline constexpr int kHomotopyKinkBudgetSlack = 10;

// Solution path of min 1/2 ||Phi z - y||^2 + tau ||z||_1 from tau_max =
// ||Phi^T y||_inf down to tau_stop, one kink per active-set event. The
// solution is piecewise affine in tau between kinks. max_kinks <= 0 selects
// the default budget 3*rows + slack; exceeding it sets `truncated` instead of
// failing.
HomotopyPath lasso_homotopy(const MeasurementEnsemble& phi, std::span<const double> y,
                            double tau_stop = 0.0, int max_kinks = 0);

// Exact solution at any tau in [kinks.back().tau, tau_max] by affine
// interpolation between the bracketing kinks.
DenseSignal path_solution_at(const HomotopyPath& path, double tau);

// Kink solutions as a candidate sequence (params are the kink tau values).
EstimateSequence estimates_from_path(const HomotopyPath& path);

struct PathCvResult {
    double tau_star = 0.0;
    double cv_score = 0.0;
    ErrorInterval interval;
};

// Minimize the holdout score over the entire continuum of path solutions.
// On each affine segment the squared score is an exact quadratic in the
// interpolation weight, so the per-segment minimum is closed-form. The budget
// must have been built with the continuum (2r) convention.
PathCvResult cross_validate_path(const HomotopyPath& path, const MeasurementEnsemble& psi,
                                 std::span<const double> y_psi, const JLBudget& budget);

} // namespace cscv
