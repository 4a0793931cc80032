#include "cscv/qr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cscv/errors.hpp"
#include "cscv/kernels.hpp"

namespace cscv {

namespace {
constexpr double kMaxCondition = 1e12;
}

IncrementalQr::IncrementalQr(int rows) : rows_(rows) {
    if (rows < 1)
        throw InvalidArgument("IncrementalQr: rows must be >= 1");
}

void IncrementalQr::push_column(const double* col) {
    const int n = cols();
    if (n >= rows_)
        throw InvalidArgument("IncrementalQr: more columns than rows");

    std::vector<double> v(col, col + rows_);
    std::vector<double> h(n, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < n; ++i) {
            const double* qi = q_.data() + static_cast<std::size_t>(i) * rows_;
            const double c = kernels::dot(qi, v.data(), rows_);
            h[i] += c;
            kernels::axpy(-c, qi, v.data(), rows_);
        }
    }
    const double nrm = std::sqrt(kernels::sumsq(v.data(), rows_));

    double dmin = nrm, dmax = nrm;
    for (double d : rdiag_) {
        dmin = std::min(dmin, std::abs(d));
        dmax = std::max(dmax, std::abs(d));
    }
    if (!(nrm > 0.0) || !(dmax / dmin <= kMaxCondition))
        throw IllConditionedSupport("support is numerically rank-deficient (condition estimate > 1e12)");

    const double inv = 1.0 / nrm;
    const std::size_t base = q_.size();
    q_.resize(base + rows_);
    for (int i = 0; i < rows_; ++i)
        q_[base + i] = v[i] * inv;
    h.push_back(nrm);
    r_.push_back(std::move(h));
    rdiag_.push_back(nrm);
}

std::vector<double> IncrementalQr::solve_ls(const double* y) const {
    const int n = cols();
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i)
        z[i] = kernels::dot(q_.data() + static_cast<std::size_t>(i) * rows_, y, rows_);
    for (int j = n - 1; j >= 0; --j) {
        double s = z[j];
        for (int l = j + 1; l < n; ++l)
            s -= r_[l][j] * z[l];
        z[j] = s / r_[j][j];
    }
    return z;
}

std::vector<double> IncrementalQr::solve_gram(const std::vector<double>& rhs) const {
    const int n = cols();
    // Forward solve R^T u = rhs (R^T is lower triangular, rows of R^T are
    // columns of R).
    std::vector<double> u(n);
    for (int j = 0; j < n; ++j) {
        double s = rhs[j];
        for (int i = 0; i < j; ++i)
            s -= r_[j][i] * u[i];
        u[j] = s / r_[j][j];
    }
    // Back solve R w = u.
    for (int j = n - 1; j >= 0; --j) {
        double s = u[j];
        for (int l = j + 1; l < n; ++l)
            s -= r_[l][j] * u[l];
        u[j] = s / r_[j][j];
    }
    return u;
}

std::vector<double> IncrementalQr::project_residual(const double* y) const {
    std::vector<double> res(y, y + rows_);
    for (int i = 0; i < cols(); ++i) {
        const double* qi = q_.data() + static_cast<std::size_t>(i) * rows_;
        kernels::axpy(-kernels::dot(qi, res.data(), rows_), qi, res.data(), rows_);
    }
    return res;
}

std::vector<double> IncrementalQr::q_times_rinvt(const std::vector<double>& s) const {
    const int n = cols();
    std::vector<double> t(n);
    for (int j = 0; j < n; ++j) {
        double acc = s[j];
        for (int i = 0; i < j; ++i)
            acc -= r_[j][i] * t[i];
        t[j] = acc / r_[j][j];
    }
    std::vector<double> w(rows_, 0.0);
    for (int j = 0; j < n; ++j)
        kernels::axpy(t[j], q_.data() + static_cast<std::size_t>(j) * rows_, w.data(), rows_);
    return w;
}

double IncrementalQr::condition_lower_bound() const {
    if (rdiag_.empty())
        return 1.0;
    double dmin = std::abs(rdiag_[0]), dmax = dmin;
    for (double d : rdiag_) {
        dmin = std::min(dmin, std::abs(d));
        dmax = std::max(dmax, std::abs(d));
    }
    return dmax / dmin;
}

} // namespace cscv
