#include "cscv/jl_cv.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "cscv/errors.hpp"
#include "cscv/kernels.hpp"

namespace cscv {

namespace {

double log_term(double xi, int p) {
    if (!(xi > 0.0 && xi < 1.0))
        throw InvalidArgument("jl budget: xi must be in (0,1)");
    if (p < 1)
        throw InvalidArgument("jl budget: p must be >= 1");
    return std::log(2.0 * p / xi);
}

int snapped_ceil(double v) {
    const double nearest = std::nearbyint(v);
    if (nearest >= 1.0 && std::abs(v - nearest) <= 1e-3 * v)
        return static_cast<int>(nearest);
    return static_cast<int>(std::ceil(v));
}

JLBudget make_budget(double epsilon, double xi, int p, double C, bool continuum) {
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw InvalidArgument("required_rows: epsilon must be in (0, 1/2]");
    if (!(C > 0.0))
        throw InvalidArgument("required_rows: C must be > 0");
    const double v = C / (epsilon * epsilon) * log_term(xi, p);
    JLBudget b;
    b.epsilon = epsilon;
    b.xi = xi;
    b.p = p;
    b.C = C;
    b.rows = std::max(1, snapped_ceil(v));
    if (continuum)
        b.rows *= 2;
    b.heuristic = false;
    b.continuum = continuum;
    return b;
}

void require_bracketing_budget(const JLBudget& budget) {
    if (!(budget.epsilon > 0.0 && budget.epsilon < 1.0))
        throw InvalidArgument("interval: budget epsilon must be in (0,1), got " +
                              std::to_string(budget.epsilon));
}

} // namespace

JLBudget required_rows(double epsilon, double xi, int p, double C) {
    return make_budget(epsilon, xi, p, C, false);
}

JLBudget required_rows_continuum(double epsilon, double xi, int p, double C) {
    return make_budget(epsilon, xi, p, C, true);
}

JLAccuracy accuracy_from_rows(int r, double xi, int p) {
    if (r < 1)
        throw InvalidArgument("accuracy_from_rows: r must be >= 1");
    JLAccuracy a;
    a.epsilon = std::sqrt(log_term(xi, p) / r);
    a.heuristic = a.epsilon > 0.5;
    return a;
}

JLBudget budget_from_rows(int r, double xi, int p) {
    const JLAccuracy a = accuracy_from_rows(r, xi, p);
    JLBudget b;
    b.epsilon = a.epsilon;
    b.xi = xi;
    b.p = p;
    b.C = 1.0;
    b.rows = r;
    b.heuristic = a.heuristic;
    b.continuum = false;
    return b;
}

JLBudget budget_from_rows_continuum(int r, double xi, int p) {
    if (r < 1)
        throw InvalidArgument("budget_from_rows_continuum: r must be >= 1");
    JLBudget b;
    b.epsilon = std::sqrt(log_term(xi, p) / (0.5 * r));
    b.xi = xi;
    b.p = p;
    b.C = 1.0;
    b.rows = r;
    b.heuristic = b.epsilon > 0.5;
    b.continuum = true;
    return b;
}

ErrorInterval absolute_interval(double score, const JLBudget& budget) {
    require_bracketing_budget(budget);
    if (!(score >= 0.0))
        throw InvalidArgument("absolute_interval: score must be >= 0");
    const double eps = budget.epsilon;
    return {score / (1.0 + eps), score / (1.0 - eps), IntervalKind::Absolute, false};
}

ErrorInterval relative_interval(double score, double y_psi_norm, const JLBudget& budget) {
    require_bracketing_budget(budget);
    if (!(score >= 0.0))
        throw InvalidArgument("relative_interval: score must be >= 0");
    if (!(y_psi_norm > 0.0))
        throw DegenerateInput("relative_interval: ||y_psi|| must be > 0");
    const double eps = budget.epsilon;
    const double q = score / y_psi_norm;
    const double lo = q * (1.0 - 3.0 * eps) / ((1.0 + eps) * (1.0 - eps) * (1.0 - eps));
    const double hi = q / ((1.0 - eps) * (1.0 - eps));
    return {std::max(0.0, lo), hi, IntervalKind::Relative, false};
}

ErrorInterval oracle_bracket(double eta_cv_hat, const JLBudget& budget) {
    return absolute_interval(eta_cv_hat, budget);
}

ErrorInterval sigma_k_bracket(double score_on_trimmed, const JLBudget& budget, double c) {
    require_bracketing_budget(budget);
    if (!(score_on_trimmed >= 0.0))
        throw InvalidArgument("sigma_k_bracket: score must be >= 0");
    if (!(c > 0.0))
        throw InvalidArgument("sigma_k_bracket: c must be > 0");
    const double eps = budget.epsilon;
    ErrorInterval iv;
    iv.lower = std::max(0.0, (1.0 - eps) * score_on_trimmed / c);
    iv.upper = (1.0 + eps) * score_on_trimmed;
    iv.kind = IntervalKind::Absolute;
    iv.conditional_lower = true;
    return iv;
}

CandidateMatrix pack_candidates(std::span<const DenseSignal> candidates) {
    if (candidates.empty())
        throw InvalidArgument("pack_candidates: empty candidate list");
    CandidateMatrix cm;
    cm.n = candidates[0].length();
    cm.p = static_cast<int>(candidates.size());
    cm.data.assign(static_cast<std::size_t>(cm.n) * cm.p, 0.0);
    for (int j = 0; j < cm.p; ++j) {
        if (candidates[j].length() != cm.n)
            throw InvalidArgument("pack_candidates: candidates differ in length");
        const double* src = candidates[j].values.data();
        for (int i = 0; i < cm.n; ++i)
            cm.data[static_cast<std::size_t>(i) * cm.p + j] = src[i];
    }
    return cm;
}

std::vector<double> scores_prepacked(const MeasurementEnsemble& psi,
                                     std::span<const double> y_psi, const CandidateMatrix& cm) {
    if (psi.cols != cm.n)
        throw InvalidArgument("scores_prepacked: candidate length does not match psi cols");
    if (static_cast<int>(y_psi.size()) != psi.rows)
        throw InvalidArgument("scores_prepacked: y_psi length does not match psi rows");

    // P = Psi * X (rows x p), then per-column residual norms against y_psi.
    std::vector<double> products(static_cast<std::size_t>(psi.rows) * cm.p);
    kernels::matmul(psi.data(), psi.rows, psi.cols, cm.data.data(), cm.p, products.data());

    std::vector<double> acc(cm.p, 0.0);
    for (int i = 0; i < psi.rows; ++i) {
        const double* prow = products.data() + static_cast<std::size_t>(i) * cm.p;
        const double yi = y_psi[i];
        for (int j = 0; j < cm.p; ++j) {
            const double d = yi - prow[j];
            acc[j] += d * d;
        }
    }
    for (double& v : acc)
        v = std::sqrt(v);
    return acc;
}

CVScoredSequence cv_scores(const MeasurementEnsemble& psi, std::span<const double> y_psi,
                           std::span<const DenseSignal> candidates) {
    CVScoredSequence out;
    out.scores = scores_prepacked(psi, y_psi, pack_candidates(candidates));
    const auto it = std::min_element(out.scores.begin(), out.scores.end());
    out.cv_index = static_cast<int>(it - out.scores.begin());
    out.eta_cv_hat = *it;
    return out;
}

double stopping_statistic(double score, double y_phi_norm, int r_j, int p) {
    if (r_j < 1)
        throw InvalidArgument("stopping_statistic: r_j must be >= 1");
    if (p < 1)
        throw InvalidArgument("stopping_statistic: p must be >= 1");
    if (!(score >= 0.0))
        throw InvalidArgument("stopping_statistic: score must be >= 0");
    const double sqrt_r = std::sqrt(static_cast<double>(r_j));
    const double lnp3 = 3.0 * std::log(static_cast<double>(p));
    if (!(sqrt_r > lnp3))
        throw InsufficientCvRows("stopping rule inapplicable: sqrt(r_j) = " +
                                 std::to_string(sqrt_r) + " <= 3 ln p = " + std::to_string(lnp3));
    if (!(y_phi_norm > 0.0))
        throw DegenerateInput("stopping_statistic: ||y_phi|| must be > 0");
    return (sqrt_r * score / y_phi_norm) / (sqrt_r - lnp3);
}

bool stopping_rule(double score, double y_phi_norm, int r_j, int p, double tau) {
    if (!(tau > 0.0))
        throw InvalidArgument("stopping_rule: tau must be > 0");
    return stopping_statistic(score, y_phi_norm, r_j, p) <= tau;
}

bool relation_holds(double a, double b, double eps) {
    if (!(a >= 0.0 && b >= 0.0))
        throw InvalidArgument("relation_holds: a and b must be >= 0");
    if (!(eps > 0.0 && eps < 1.0))
        throw InvalidArgument("relation_holds: eps must be in (0,1)");
    return (1.0 - eps) * a <= b && b <= (1.0 + eps) * a;
}

double relation_invert(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw InvalidArgument("relation_invert: eps must be in (0,1)");
    return (1.0 + eps) * (1.0 - eps);
}

double relation_quotient_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw InvalidArgument("relation_quotient_eps: eps must be in (0,1)");
    return 2.0 * eps / (1.0 - eps);
}

} // namespace cscv
