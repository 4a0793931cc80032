#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cscv/decoders.hpp"
#include "cscv/sensing.hpp"
#include "cscv/signal.hpp"

// Staged decoding with a certified stopping rule. Measurements are taken once
// from a single ensemble drawn at entry variance 1; stage j decodes on the
// first m_j rows and scores on the remaining r_j = total_m - m_j rows, with
// the 1/sqrt(rows-in-role) normalizations applied at use time. Rows already
// used are never re-drawn, so advancing a stage only ever adds measurements.

namespace cscv {

enum class DecoderKind { Omp, LassoHomotopy };

struct AdaptiveSchedule {
    std::vector<int> stage_rows;  // strictly increasing, last < total_m
    double tau = 0.1;             // target relative error
    int sparsity_input = 1;       // k handed to the stage decoder
    DecoderKind decoder = DecoderKind::Omp;
};

struct StageRecord {
    int stage = 0;  // 1-based
    int m_j = 0;
    int r_j = 0;
    double score = 0.0;
    double statistic = 0.0;
    bool fired = false;
    double epsilon_r = 0.0;  // accuracy available from r_j holdout rows
};

struct AdaptiveResult {
    // 1-based stage that satisfied the rule; 0 when the schedule exhausted.
    int stopped_at_stage = 0;
    DenseSignal estimate;
    std::vector<StageRecord> per_stage;
    std::optional<std::string> warning;  // "too dense" on exhaustion
};

// Geometric default: m_j = min(ceil(m1 * 2^(j-1)), largest usable row count).
AdaptiveSchedule geometric_schedule(int m1, int stages, int total_m, double tau,
                                    int sparsity_input, DecoderKind decoder);

// Run the staged loop. `ensemble` must be drawn with entry variance 1 and
// carry all total_m rows; `y` holds the corresponding raw measurements. The
// schedule is validated before any decoding: stage rows strictly increasing,
// below total_m, and sqrt(r_j) > 3 ln(stages) at every stage (otherwise
// InvalidSchedule). If no stage fires, the result carries the full-ensemble
// decode and a "too dense" warning.
AdaptiveResult adaptive_decode(const MeasurementEnsemble& ensemble, std::span<const double> y,
                               const AdaptiveSchedule& schedule);

// Per-stage trace table as CSV (columns: stage,m_j,r_j,score,statistic,fired,
// epsilon_r).
void save_trace(const AdaptiveResult& result, const std::string& path);

} // namespace cscv
