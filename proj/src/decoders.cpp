#include "cscv/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cscv/errors.hpp"
#include "cscv/kernels.hpp"
#include "cscv/qr.hpp"

namespace cscv {

namespace {

DenseSignal sparse_to_dense(int n, const std::vector<int>& support,
                            const std::vector<double>& coeffs) {
    DenseSignal x;
    x.values.assign(n, 0.0);
    for (std::size_t i = 0; i < support.size(); ++i)
        x.values[support[i]] = coeffs[i];
    return x;
}

void check_support(const MeasurementEnsemble& phi, std::span<const int> support) {
    std::vector<char> seen(phi.cols, 0);
    for (int idx : support) {
        if (idx < 0 || idx >= phi.cols)
            throw InvalidArgument("support index out of range");
        if (seen[idx])
            throw InvalidArgument("support indices must be distinct");
        seen[idx] = 1;
    }
}

// Copy column idx of the row-major ensemble into a contiguous buffer.
void load_column(const MeasurementEnsemble& phi, int idx, std::vector<double>& col) {
    col.resize(phi.rows);
    const double* base = phi.data();
    for (int i = 0; i < phi.rows; ++i)
        col[i] = base[static_cast<std::size_t>(i) * phi.cols + idx];
}

} // namespace

EstimateSequence omp_decode(const MeasurementEnsemble& phi, std::span<const double> y, int k,
                            std::span<const int> warm_support) {
    if (static_cast<int>(y.size()) != phi.rows)
        throw InvalidArgument("omp_decode: y length does not match phi rows");
    if (k < 1 || k > phi.rows)
        throw InvalidArgument("omp_decode: need 1 <= k <= rows");
    check_support(phi, warm_support);
    if (static_cast<int>(warm_support.size()) > k)
        throw InvalidArgument("omp_decode: warm support larger than k");

    IncrementalQr qr(phi.rows);
    std::vector<int> selected;
    std::vector<char> in_support(phi.cols, 0);
    std::vector<double> col, corr(phi.cols);

    EstimateSequence seq;
    seq.provenance = Provenance::OmpIteration;

    for (int idx : warm_support) {
        load_column(phi, idx, col);
        qr.push_column(col.data());
        selected.push_back(idx);
        in_support[idx] = 1;
    }
    if (!selected.empty()) {
        seq.candidates.push_back(sparse_to_dense(phi.cols, selected, qr.solve_ls(y.data())));
        seq.params.push_back(static_cast<double>(selected.size()));
    }

    while (static_cast<int>(selected.size()) < k) {
        const std::vector<double> res = qr.project_residual(y.data());
        kernels::gemv_t(phi.data(), phi.rows, phi.cols, res.data(), corr.data());

        int pick = -1;
        double best = -1.0;
        for (int j = 0; j < phi.cols; ++j) {
            if (in_support[j])
                continue;
            const double a = std::abs(corr[j]);
            if (a > best) {
                best = a;
                pick = j;
            }
        }
        if (best == 0.0) {
            // Residual already orthogonal to every remaining column (exact
            // fit); grow the support deterministically anyway.
            for (int j = 0; j < phi.cols; ++j) {
                if (!in_support[j]) {
                    pick = j;
                    break;
                }
            }
        }
        if (pick < 0)
            throw InvalidArgument("omp_decode: k exceeds the number of columns");

        load_column(phi, pick, col);
        qr.push_column(col.data());
        selected.push_back(pick);
        in_support[pick] = 1;

        seq.candidates.push_back(sparse_to_dense(phi.cols, selected, qr.solve_ls(y.data())));
        seq.params.push_back(static_cast<double>(selected.size()));
    }
    return seq;
}

DenseSignal least_squares_on_support(const MeasurementEnsemble& phi, std::span<const double> y,
                                     std::span<const int> support) {
    if (static_cast<int>(y.size()) != phi.rows)
        throw InvalidArgument("least_squares_on_support: y length does not match phi rows");
    if (support.empty())
        throw InvalidArgument("least_squares_on_support: empty support");
    if (static_cast<int>(support.size()) > phi.rows)
        throw InvalidArgument("least_squares_on_support: support larger than row count");
    check_support(phi, support);

    IncrementalQr qr(phi.rows);
    std::vector<double> col;
    for (int idx : support) {
        load_column(phi, idx, col);
        qr.push_column(col.data());
    }
    return sparse_to_dense(phi.cols, std::vector<int>(support.begin(), support.end()),
                           qr.solve_ls(y.data()));
}

namespace {

struct ActiveSet {
    std::vector<int> indices;
    std::vector<double> signs;
};

// Dense solution and sign pattern for the current active set at tau.
HomotopyKink make_kink(int n, double tau, const ActiveSet& act, const std::vector<double>& a_a,
                       const std::vector<double>& b_a, int zeroed = -1) {
    HomotopyKink kink;
    kink.tau = tau;
    kink.solution.values.assign(n, 0.0);
    kink.sign_pattern.assign(n, 0);
    for (std::size_t i = 0; i < act.indices.size(); ++i) {
        const int idx = act.indices[i];
        if (idx == zeroed)
            continue;
        const double v = a_a[i] - tau * b_a[i];
        kink.solution.values[idx] = v;
        kink.sign_pattern[idx] = static_cast<std::int8_t>(v > 0.0 ? 1 : (v < 0.0 ? -1 : 0));
    }
    return kink;
}

} // namespace

HomotopyPath lasso_homotopy(const MeasurementEnsemble& phi, std::span<const double> y,
                            double tau_stop, int max_kinks) {
    if (static_cast<int>(y.size()) != phi.rows)
        throw InvalidArgument("lasso_homotopy: y length does not match phi rows");
    if (!(tau_stop >= 0.0))
        throw InvalidArgument("lasso_homotopy: tau_stop must be >= 0");
    if (max_kinks <= 0)
        max_kinks = 3 * phi.rows + kHomotopyKinkBudgetSlack;

    const int n = phi.cols;
    const int m = phi.rows;

    std::vector<double> u(n), v(n);
    kernels::gemv_t(phi.data(), m, n, y.data(), u.data());
    double tau_max = 0.0;
    for (int j = 0; j < n; ++j)
        tau_max = std::max(tau_max, std::abs(u[j]));

    HomotopyPath path;
    path.tau_max = tau_max;

    HomotopyKink origin;
    origin.tau = tau_max;
    origin.solution.values.assign(n, 0.0);
    origin.sign_pattern.assign(n, 0);
    path.kinks.push_back(std::move(origin));

    if (tau_max == 0.0 || tau_stop >= tau_max)
        return path;

    IncrementalQr qr(m);
    ActiveSet act;
    std::vector<char> active(n, 0);
    std::vector<double> col;
    double tau_cur = tau_max;
    // The index changed by the previous event owns a spurious event root at
    // exactly tau_cur: a coordinate that just entered has its zero there, and
    // one that just left has its sign's correlation boundary contact there.
    // Both are segment endpoints, not future events, yet floating-point noise
    // can land them on either side of tau_cur. Candidates for these indices
    // are only admitted strictly below a relative band around tau_cur; their
    // genuine events (an opposite-sign re-entry, a later crossing under a new
    // direction) sit well below it.
    int last_removed = -1;
    int last_added = -1;
    constexpr double kReentryBand = 1e-9;

    while (true) {
        std::vector<double> a_a, b_a, res0, w;
        if (!act.indices.empty()) {
            a_a = qr.solve_ls(y.data());
            b_a = qr.solve_gram(act.signs);
            res0 = qr.project_residual(y.data());
            w = qr.q_times_rinvt(act.signs);
        } else {
            res0.assign(y.begin(), y.end());
            w.assign(m, 0.0);
        }
        kernels::gemv_t(phi.data(), m, n, res0.data(), u.data());
        kernels::gemv_t(phi.data(), m, n, w.data(), v.data());

        // Inactive correlations are affine: c_j(tau) = u_j + tau * v_j. An
        // activation happens where |c_j| meets tau; a deactivation where an
        // active coefficient a_i - tau * b_i crosses zero.
        const double tie_tol = tau_cur * 1e-12;
        double best_tau = -1.0;
        int best_index = -1;
        bool best_is_removal = false;
        double best_sign = 0.0;

        // A square active set fits y exactly, so the inactive correlations are
        // pure numerical noise there: no further activation is possible.
        const bool can_grow = static_cast<int>(act.indices.size()) < m;
        for (int j = 0; can_grow && j < n; ++j) {
            if (active[j])
                continue;
            const double admit =
                j == last_removed ? tau_cur * (1.0 - kReentryBand) : tau_cur + tie_tol;
            for (double sg : {1.0, -1.0}) {
                const double den = sg - v[j];
                if (den == 0.0)
                    continue;
                const double t = u[j] / den;
                if (!(t > tau_stop) || t > admit)
                    continue;
                const double tc = std::min(t, tau_cur);
                if (tc > best_tau + tie_tol ||
                    (tc > best_tau - tie_tol && !best_is_removal && j < best_index)) {
                    best_tau = tc;
                    best_index = j;
                    best_is_removal = false;
                    best_sign = sg;
                }
            }
        }
        for (std::size_t i = 0; i < act.indices.size(); ++i) {
            if (b_a[i] == 0.0)
                continue;
            const double admit = act.indices[i] == last_added
                                     ? tau_cur * (1.0 - kReentryBand)
                                     : tau_cur - tie_tol;
            const double t = a_a[i] / b_a[i];
            if (!(t > tau_stop) || t >= admit)
                continue;
            if (t > best_tau + tie_tol) {
                best_tau = t;
                best_index = static_cast<int>(i);
                best_is_removal = true;
            }
        }

        if (best_index < 0) {
            // No further event above tau_stop: close the path there.
            if (std::abs(tau_cur - tau_stop) > tie_tol || path.kinks.size() == 1) {
                if (static_cast<int>(path.kinks.size()) >= max_kinks) {
                    path.truncated = true;
                    return path;
                }
                path.kinks.push_back(make_kink(n, tau_stop, act, a_a, b_a));
            }
            return path;
        }

        const bool merges_with_current = best_tau >= tau_cur - tie_tol;
        if (!merges_with_current) {
            if (static_cast<int>(path.kinks.size()) >= max_kinks) {
                path.truncated = true;
                return path;
            }
            const int zeroed = best_is_removal ? act.indices[best_index] : -1;
            path.kinks.push_back(make_kink(n, best_tau, act, a_a, b_a, zeroed));
        }

        if (best_is_removal) {
            last_removed = act.indices[best_index];
            last_added = -1;
            act.indices.erase(act.indices.begin() + best_index);
            act.signs.erase(act.signs.begin() + best_index);
            active[last_removed] = 0;
            IncrementalQr rebuilt(m);
            for (int idx : act.indices) {
                load_column(phi, idx, col);
                rebuilt.push_column(col.data());
            }
            qr = std::move(rebuilt);
        } else {
            last_removed = -1;
            last_added = best_index;
            load_column(phi, best_index, col);
            qr.push_column(col.data());
            act.indices.push_back(best_index);
            act.signs.push_back(best_sign);
            active[best_index] = 1;
        }
        tau_cur = merges_with_current ? tau_cur : best_tau;
    }
}

DenseSignal path_solution_at(const HomotopyPath& path, double tau) {
    if (path.kinks.empty())
        throw InvalidArgument("path_solution_at: empty path");
    const double hi = path.kinks.front().tau;
    const double lo = path.kinks.back().tau;
    const double slack = 1e-12 * (1.0 + hi);
    if (tau > hi + slack || tau < lo - slack)
        throw InvalidArgument("path_solution_at: tau outside [tau_stop, tau_max]");
    const double t = std::clamp(tau, lo, hi);

    // Kinks are sorted by decreasing tau; find the bracketing pair.
    std::size_t seg = 0;
    while (seg + 1 < path.kinks.size() && path.kinks[seg + 1].tau > t)
        ++seg;
    if (seg + 1 == path.kinks.size())
        return path.kinks[seg].solution;

    const HomotopyKink& k0 = path.kinks[seg];
    const HomotopyKink& k1 = path.kinks[seg + 1];
    const double width = k0.tau - k1.tau;
    if (width <= 0.0)
        return k1.solution;
    const double wgt = (k0.tau - t) / width;
    DenseSignal out;
    const std::size_t n = k0.solution.values.size();
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.values[i] = k0.solution.values[i] + wgt * (k1.solution.values[i] - k0.solution.values[i]);
    return out;
}

EstimateSequence estimates_from_path(const HomotopyPath& path) {
    if (path.kinks.empty())
        throw InvalidArgument("estimates_from_path: empty path");
    EstimateSequence seq;
    seq.provenance = Provenance::HomotopyKink;
    for (const HomotopyKink& k : path.kinks) {
        seq.candidates.push_back(k.solution);
        seq.params.push_back(k.tau);
    }
    return seq;
}

PathCvResult cross_validate_path(const HomotopyPath& path, const MeasurementEnsemble& psi,
                                 std::span<const double> y_psi, const JLBudget& budget) {
    if (path.kinks.empty())
        throw InvalidArgument("cross_validate_path: empty path");
    if (!budget.continuum)
        throw InvalidArgument("cross_validate_path: budget must reserve continuum (2r) rows");
    if (static_cast<int>(y_psi.size()) != psi.rows)
        throw InvalidArgument("cross_validate_path: y_psi length does not match psi rows");
    if (psi.cols != path.kinks.front().solution.length())
        throw InvalidArgument("cross_validate_path: psi cols do not match solution length");

    // Holdout residual e(tau) is affine on each segment, so ||e||^2 is an
    // exact quadratic in the interpolation weight.
    const int r = psi.rows;
    std::vector<std::vector<double>> errs;
    errs.reserve(path.kinks.size());
    for (const HomotopyKink& k : path.kinks) {
        std::vector<double> e(r);
        kernels::gemv(psi.data(), r, psi.cols, k.solution.values.data(), e.data());
        for (int i = 0; i < r; ++i)
            e[i] = y_psi[i] - e[i];
        errs.push_back(std::move(e));
    }

    double best_sq = kernels::sumsq(errs[0].data(), r);
    double best_tau = path.kinks[0].tau;
    for (std::size_t s = 0; s + 1 < path.kinks.size(); ++s) {
        const std::vector<double>& e0 = errs[s];
        const std::vector<double>& e1 = errs[s + 1];
        std::vector<double> d(r);
        for (int i = 0; i < r; ++i)
            d[i] = e1[i] - e0[i];
        const double dd = kernels::sumsq(d.data(), r);
        double t = 1.0;
        if (dd > 0.0)
            t = std::clamp(-kernels::dot(e0.data(), d.data(), r) / dd, 0.0, 1.0);
        double sq = 0.0;
        for (int i = 0; i < r; ++i) {
            const double e = e0[i] + t * d[i];
            sq += e * e;
        }
        if (sq < best_sq) {
            best_sq = sq;
            best_tau = path.kinks[s].tau + t * (path.kinks[s + 1].tau - path.kinks[s].tau);
        }
    }

    PathCvResult out;
    out.tau_star = best_tau;
    out.cv_score = std::sqrt(std::max(0.0, best_sq));
    out.interval = absolute_interval(out.cv_score, budget);
    return out;
}

} // namespace cscv
