#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cscv/sensing.hpp"

// The repeated-holdout recovery experiment: decode once per holdout size r,
// then score the candidate sequence against many fresh holdout draws and
// compare the observable minimum score against the unobservable oracle error.

namespace cscv {

struct ExperimentConfig {
    int n = 900;             // ambient dimension
    int d = 25;              // spike count
    int total_m = 200;       // measurement budget per r (n_rows + r)
    int k = 50;              // decoder iterations = candidate count
    double noise_std = 0.05;
    std::vector<int> r_values = {5, 10, 15, 20, 25, 30, 45, 60, 75, 90};
    int num_cv_draws = 200;
    double xi = 0.01;
    EnsembleKind ensemble = EnsembleKind::Gaussian;
    std::uint64_t master_seed = 1;
};

ExperimentConfig desk_config();
ExperimentConfig paper_config();

struct TrialSummary {
    int r = 0;
    double epsilon = 0.0;  // accuracy from r holdout rows at p = k candidates
    bool epsilon_heuristic = false;
    double eta_or = 0.0;   // min_j ||x - x_hat_j||
    double eta_omp = 0.0;  // ||x - x_hat_k||
    double eta_cv_mean = 0.0;
    double eta_cv_std = 0.0;  // sample standard deviation over draws
    int coverage_count = 0;   // draws with |eta_cv - eta_or| <= eps * eta_or
    int n_draws = 0;
    double sigma_d = 0.0;     // best-d residual of the true signal
    std::uint64_t seed = 0;   // derived implementation-matrix seed for this r
};

// One summary per r value. Deterministic given config.master_seed, regardless
// of the worker count: per-draw streams are derived from (seed, r, draw), and
// aggregation reduces in draw order.
std::vector<TrialSummary> run_omp_cv_experiment(const ExperimentConfig& config, int jobs = 0);

struct Figure1Row {
    int r = 0;
    double epsilon = 0.0;
    double eta_cv_mean = 0.0;
    double eta_cv_std = 0.0;
    double band_lo = 0.0;  // (1 - eps) * eta_or
    double band_hi = 0.0;  // (1 + eps) * eta_or
    double eta_or = 0.0;
    double eta_omp = 0.0;
};

struct Figure1Report {
    std::vector<Figure1Row> rows;
    double sigma_d = 0.0;
    // Smallest r in the grid whose accuracy meets the eps <= 0.6 working
    // point; -1 when no grid point qualifies.
    int heuristic_r = -1;
};

Figure1Report summarize_figure1(const std::vector<TrialSummary>& summaries);

// CSV columns: r,epsilon,eta_or,eta_omp,eta_cv_mean,eta_cv_std,coverage,
// n_draws,sigma_d,seed.
void save_summary_csv(const std::vector<TrialSummary>& summaries, const std::string& path);

// JSON manifest recording the full config and, per r, the (seed, dims, kind,
// variance) tuple of the implementation ensemble.
void save_manifest(const ExperimentConfig& config, const std::vector<TrialSummary>& summaries,
                   const std::string& path);

} // namespace cscv
