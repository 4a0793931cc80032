#pragma once

#include <span>
#include <vector>

#include "cscv/sensing.hpp"
#include "cscv/signal.hpp"

// Holdout-row budget arithmetic and the error brackets it certifies. A budget
// ties together the accuracy eps, the confidence xi, and the number of
// candidate estimates p through r = ceil(C * eps^-2 * ln(2p/xi)). All
// logarithms are natural. With such a budget, a holdout score
// ||y_psi - Psi x_hat|| brackets the unobservable error ||x - x_hat|| with
// probability at least 1 - xi simultaneously over all p candidates.

namespace cscv {

// Default multiplicative constant: practical choice used by the numerical
// protocol. The concentration proof supports the larger preset below.
inline constexpr double kDefaultC = 1.0;
inline constexpr double kProofBackedC = 8.0;

struct JLBudget {
    double epsilon = 0.0;
    double xi = 0.0;
    int p = 0;
    double C = kDefaultC;
    int rows = 0;
    bool heuristic = false;  // epsilon > 1/2: outside the guaranteed range
    bool continuum = false;  // rows reserved under the 2r convention
};

struct JLAccuracy {
    double epsilon = 0.0;
    bool heuristic = false;
};

// Rows needed for accuracy eps in (0, 1/2], confidence xi in (0,1), p >= 1
// candidates: r = ceil(C * eps^-2 * ln(2p/xi)). When the product sits within
// 0.1% of an integer it is taken as that integer first, so that a 4-decimal
// eps quoted from an exact row count inverts back to it.
JLBudget required_rows(double epsilon, double xi, int p, double C = kDefaultC);

// Same, with twice the rows reserved: validation over a solution continuum
// (an entire homotopy path) rather than a finite candidate list.
JLBudget required_rows_continuum(double epsilon, double xi, int p, double C = kDefaultC);

// Accuracy available from r rows at confidence xi with p candidates:
// eps = sqrt(ln(2p/xi) / r). Flagged heuristic when eps > 1/2.
JLAccuracy accuracy_from_rows(int r, double xi, int p);

// Budget describing r existing rows (C = 1). The continuum variant treats the
// r physical rows as a 2r-convention reservation, i.e. eps = sqrt(2 ln(2p/xi) / r).
JLBudget budget_from_rows(int r, double xi, int p);
JLBudget budget_from_rows_continuum(int r, double xi, int p);

enum class IntervalKind { Absolute, Relative };

struct ErrorInterval {
    double lower = 0.0;
    double upper = 0.0;
    IntervalKind kind = IntervalKind::Absolute;
    // True when the lower endpoint additionally assumes the decoder's
    // instance-optimality regime (sigma_k bracketing).
    bool conditional_lower = false;
};

// ||x - x_hat|| in [score/(1+eps), score/(1-eps)]. Requires eps < 1.
ErrorInterval absolute_interval(double score, const JLBudget& budget);

// Bracket for ||x - x_hat|| / ||x||, using q = score / ||y_psi||:
// [max(0, q(1-3eps) / ((1+eps)(1-eps)^2)), q / (1-eps)^2].
ErrorInterval relative_interval(double score, double y_psi_norm, const JLBudget& budget);

// The minimum holdout score brackets the oracle error the same way a single
// score brackets a single candidate's error.
ErrorInterval oracle_bracket(double eta_cv_hat, const JLBudget& budget);

// Bracket for the best-k approximation error sigma_k from the holdout score
// of the trimmed estimate: [(1-eps)*score/c, (1+eps)*score]. The lower end
// holds only under the decoder's error guarantee with constant c (caller
// supplied) and is flagged conditional.
ErrorInterval sigma_k_bracket(double score_on_trimmed, const JLBudget& budget, double c);

struct CVScoredSequence {
    std::vector<double> scores;  // per-candidate holdout scores
    int cv_index = 0;            // argmin, ties to the lowest index
    double eta_cv_hat = 0.0;     // min score
};

// Holdout scores ||y_psi - Psi x_hat_j|| for every candidate.
CVScoredSequence cv_scores(const MeasurementEnsemble& psi, std::span<const double> y_psi,
                           std::span<const DenseSignal> candidates);

// Candidates packed column-wise into a row-major n x p matrix, for callers
// that score the same list against many holdout draws.
struct CandidateMatrix {
    int n = 0;
    int p = 0;
    std::vector<double> data;
};

CandidateMatrix pack_candidates(std::span<const DenseSignal> candidates);

std::vector<double> scores_prepacked(const MeasurementEnsemble& psi,
                                     std::span<const double> y_psi, const CandidateMatrix& cm);

// Decision statistic (sqrt(r_j) * score / ||y_phi||) / (sqrt(r_j) - 3 ln p).
// Requires sqrt(r_j) > 3 ln p; otherwise the holdout budget cannot support
// the decision and InsufficientCvRows is thrown.
double stopping_statistic(double score, double y_phi_norm, int r_j, int p);

// True when the statistic certifies relative error at most tau.
bool stopping_rule(double score, double y_phi_norm, int r_j, int p, double tau);

// a ~eps b  <=>  (1-eps) a <= b <= (1+eps) a, for nonnegative a, b.
bool relation_holds(double a, double b, double eps);

// Divisor that flips the relation: a ~eps b implies b / relation_invert(eps)
// ~eps a.
double relation_invert(double eps);

// Accuracy degradation when dividing two eps-related pairs: 2 eps / (1 - eps).
double relation_quotient_eps(double eps);

} // namespace cscv
