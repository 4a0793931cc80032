#pragma once

#include <vector>

// Incremental thin QR by modified Gram-Schmidt with one reorthogonalization
// pass. Columns are appended one at a time (greedy support growth); the
// factor is the orthogonal route for every least-squares solve in the
// decoders. A column that is numerically dependent on the ones already
// present raises IllConditionedSupport.

namespace cscv {

class IncrementalQr {
  public:
    explicit IncrementalQr(int rows);

    int rows() const { return rows_; }
    int cols() const { return static_cast<int>(rdiag_.size()); }

    // Append one column (length rows()). Throws IllConditionedSupport when
    // the diagonal-ratio condition estimate exceeds 1e12.
    void push_column(const double* col);

    // z minimizing ||A z - y||_2 over the appended columns, via R z = Q^T y.
    std::vector<double> solve_ls(const double* y) const;

    // w with (A^T A) w = rhs, via R^T R w = rhs.
    std::vector<double> solve_gram(const std::vector<double>& rhs) const;

    // res = y - Q Q^T y (the orthogonal-complement residual).
    std::vector<double> project_residual(const double* y) const;

    // A * solve_gram-style direction: returns Q R^{-T} s (length rows()).
    std::vector<double> q_times_rinvt(const std::vector<double>& s) const;

    // max |R_ii| / min |R_ii|; a lower bound on the condition number.
    double condition_lower_bound() const;

  private:
    int rows_;
    std::vector<double> q_;               // column-major rows_ x cols()
    std::vector<std::vector<double>> r_;  // r_[j] = column j of R, length j+1
    std::vector<double> rdiag_;
};

} // namespace cscv
