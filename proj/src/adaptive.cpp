#include "cscv/adaptive.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cscv/errors.hpp"
#include "cscv/jl_cv.hpp"
#include "cscv/kernels.hpp"

namespace cscv {

namespace {

constexpr double kTraceXi = 0.01;

std::vector<int> nonzero_support(const DenseSignal& x) {
    std::vector<int> support;
    for (int i = 0; i < x.length(); ++i)
        if (x.values[i] != 0.0)
            support.push_back(i);
    return support;
}

void validate_schedule(const MeasurementEnsemble& ensemble, const AdaptiveSchedule& schedule) {
    const int p = static_cast<int>(schedule.stage_rows.size());
    if (p < 1)
        throw InvalidSchedule("schedule has no stages");
    if (!(schedule.tau > 0.0))
        throw InvalidSchedule("schedule tau must be > 0");
    if (schedule.sparsity_input < 1)
        throw InvalidSchedule("schedule sparsity_input must be >= 1");

    int prev = 0;
    for (int m_j : schedule.stage_rows) {
        if (m_j <= prev)
            throw InvalidSchedule("stage rows must be strictly increasing and >= 1");
        prev = m_j;
    }
    if (schedule.stage_rows.back() >= ensemble.rows)
        throw InvalidSchedule("last stage must leave holdout rows (m_p < total_m)");
    if (schedule.decoder == DecoderKind::Omp && schedule.sparsity_input > schedule.stage_rows.front())
        throw InvalidSchedule("sparsity_input exceeds the first stage's row count");

    const double lnp3 = 3.0 * std::log(static_cast<double>(p));
    for (int m_j : schedule.stage_rows) {
        const double sqrt_r = std::sqrt(static_cast<double>(ensemble.rows - m_j));
        if (!(sqrt_r > lnp3))
            throw InvalidSchedule("stopping rule inapplicable: sqrt(r_j) = " +
                                  std::to_string(sqrt_r) +
                                  " <= 3 ln p = " + std::to_string(lnp3));
    }
}

DenseSignal stage_estimate(const MeasurementEnsemble& prefix, std::span<const double> y_phi,
                           const AdaptiveSchedule& schedule, std::vector<int>& warm_support) {
    if (schedule.decoder == DecoderKind::Omp) {
        const EstimateSequence seq =
            omp_decode(prefix, y_phi, schedule.sparsity_input, warm_support);
        DenseSignal estimate = seq.candidates.back();
        warm_support = nonzero_support(estimate);
        return estimate;
    }
    const HomotopyPath path = lasso_homotopy(prefix, y_phi, 0.0, 0);
    return path.kinks.back().solution;
}

} // namespace

AdaptiveSchedule geometric_schedule(int m1, int stages, int total_m, double tau,
                                    int sparsity_input, DecoderKind decoder) {
    if (m1 < 1 || stages < 1 || total_m <= m1)
        throw InvalidSchedule("geometric_schedule: need 1 <= m1 < total_m and stages >= 1");
    const double lnp3 = 3.0 * std::log(static_cast<double>(stages));
    const int r_min = static_cast<int>(std::floor(lnp3 * lnp3)) + 1;
    const int cap = total_m - r_min;
    if (cap < m1)
        throw InvalidSchedule("geometric_schedule: total_m too small for the stopping rule");

    AdaptiveSchedule schedule;
    schedule.tau = tau;
    schedule.sparsity_input = sparsity_input;
    schedule.decoder = decoder;
    double rows = m1;
    for (int j = 0; j < stages; ++j) {
        const int m_j = std::min(static_cast<int>(std::ceil(rows)), cap);
        if (schedule.stage_rows.empty() || m_j > schedule.stage_rows.back())
            schedule.stage_rows.push_back(m_j);
        rows *= 2.0;
    }
    return schedule;
}

AdaptiveResult adaptive_decode(const MeasurementEnsemble& ensemble, std::span<const double> y,
                               const AdaptiveSchedule& schedule) {
    if (static_cast<int>(y.size()) != ensemble.rows)
        throw InvalidArgument("adaptive_decode: y length does not match ensemble rows");
    validate_schedule(ensemble, schedule);

    const int total_m = ensemble.rows;
    const int p = static_cast<int>(schedule.stage_rows.size());

    AdaptiveResult result;
    std::vector<int> warm_support;

    for (int j = 0; j < p; ++j) {
        const int m_j = schedule.stage_rows[j];
        const int r_j = total_m - m_j;

        const MeasurementEnsemble prefix = row_prefix(ensemble, m_j);
        const std::span<const double> y_phi = y.subspan(0, m_j);
        const DenseSignal estimate = stage_estimate(prefix, y_phi, schedule, warm_support);

        // Holdout suffix, both halves in their 1/sqrt(rows-in-role) scaling.
        const std::vector<double> predicted =
            measure_range(ensemble, estimate.values, m_j, total_m, 1.0);
        double sq = 0.0;
        for (int i = 0; i < r_j; ++i) {
            const double d = y[m_j + i] - predicted[i];
            sq += d * d;
        }
        const double score = std::sqrt(sq / r_j);
        const double y_phi_norm =
            std::sqrt(kernels::sumsq(y_phi.data(), y_phi.size()) / m_j);

        StageRecord record;
        record.stage = j + 1;
        record.m_j = m_j;
        record.r_j = r_j;
        record.score = score;
        record.statistic = stopping_statistic(score, y_phi_norm, r_j, p);
        record.fired = record.statistic <= schedule.tau;
        record.epsilon_r = accuracy_from_rows(r_j, kTraceXi, p).epsilon;
        result.per_stage.push_back(record);

        if (record.fired) {
            result.stopped_at_stage = j + 1;
            result.estimate = estimate;
            return result;
        }
    }

    // Exhausted: decode once more with every row and flag the verdict.
    const MeasurementEnsemble full = row_prefix(ensemble, total_m);
    result.stopped_at_stage = 0;
    result.estimate = stage_estimate(full, y, schedule, warm_support);
    result.warning = "too dense";
    return result;
}

void save_trace(const AdaptiveResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("save_trace: cannot open " + path);
    out << "stage,m_j,r_j,score,statistic,fired,epsilon_r\n";
    char buf[128];
    for (const StageRecord& rec : result.per_stage) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g,%d,%.17g\n", rec.stage, rec.m_j,
                      rec.r_j, rec.score, rec.statistic, rec.fired ? 1 : 0, rec.epsilon_r);
        out << buf;
    }
    if (!out)
        throw IoError("save_trace: write failed for " + path);
}

} // namespace cscv
