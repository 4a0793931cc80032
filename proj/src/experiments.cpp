#include "cscv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "cscv/decoders.hpp"
#include "cscv/errors.hpp"
#include "cscv/jl_cv.hpp"
#include "cscv/kernels.hpp"
#include "cscv/parallel.hpp"
#include "cscv/rng.hpp"

namespace cscv {

namespace {

// Seed-derivation tags: one namespace per role so streams never overlap.
constexpr std::uint64_t kTagPhi = 1;
constexpr std::uint64_t kTagSignal = 2;
constexpr std::uint64_t kTagCvDraw = 3;

void validate_config(const ExperimentConfig& config) {
    if (config.n < 2 || config.d < 1 || config.d > config.n)
        throw InvalidArgument("experiment: need 1 <= d <= n, n >= 2");
    if (config.total_m < 2 || config.total_m >= config.n)
        throw InvalidArgument("experiment: need 2 <= total_m < n");
    if (config.r_values.empty())
        throw InvalidArgument("experiment: r grid is empty");
    for (int r : config.r_values) {
        if (r < 1 || r >= config.total_m)
            throw InvalidArgument("experiment: each r must satisfy 1 <= r < total_m");
        if (config.k > config.total_m - r)
            throw InvalidArgument("experiment: k exceeds implementation rows at some r");
    }
    if (config.k < 1)
        throw InvalidArgument("experiment: need k >= 1");
    if (config.num_cv_draws < 1)
        throw InvalidArgument("experiment: need num_cv_draws >= 1");
    if (!(config.xi > 0.0 && config.xi < 1.0))
        throw InvalidArgument("experiment: xi must be in (0,1)");
}

} // namespace

ExperimentConfig desk_config() {
    return ExperimentConfig{};
}

ExperimentConfig paper_config() {
    ExperimentConfig config;
    config.n = 3600;
    config.d = 100;
    config.total_m = 800;
    config.k = 200;
    config.noise_std = 0.05;
    config.num_cv_draws = 1000;
    return config;
}

std::vector<TrialSummary> run_omp_cv_experiment(const ExperimentConfig& config, int jobs) {
    validate_config(config);

    const DenseSignal x =
        make_spike_signal(config.n, config.d, config.noise_std,
                          derive_seed(config.master_seed, kTagSignal, 0));
    const double sigma_d = best_k_term(x, config.d).residual_l2;

    std::vector<TrialSummary> summaries;
    summaries.reserve(config.r_values.size());

    for (int r : config.r_values) {
        const int n_rows = config.total_m - r;
        const std::uint64_t phi_seed = derive_seed(config.master_seed, kTagPhi, r);
        const MeasurementEnsemble phi =
            draw_ensemble(n_rows, config.n, config.ensemble, 1.0 / n_rows, phi_seed);
        const std::vector<double> y_phi = measure(phi, x);
        const EstimateSequence seq = omp_decode(phi, y_phi, config.k);

        // True per-candidate errors (unobservable outside the experiment).
        double eta_or = 0.0, eta_omp = 0.0;
        CandidateMatrix diffs;
        diffs.n = config.n;
        diffs.p = config.k;
        diffs.data.assign(static_cast<std::size_t>(config.n) * config.k, 0.0);
        for (int j = 0; j < config.k; ++j) {
            const DenseSignal& cand = seq.candidates[j];
            double sq = 0.0;
            for (int i = 0; i < config.n; ++i) {
                const double d = x.values[i] - cand.values[i];
                diffs.data[static_cast<std::size_t>(i) * config.k + j] = d;
                sq += d * d;
            }
            const double err = std::sqrt(sq);
            if (j == 0 || err < eta_or)
                eta_or = err;
            eta_omp = err;
        }

        const JLAccuracy acc = accuracy_from_rows(r, config.xi, config.k);
        const std::vector<double> zero_y(r, 0.0);

        std::vector<double> eta_cv(config.num_cv_draws);
        std::vector<char> covered(config.num_cv_draws, 0);
        parallel_for(config.num_cv_draws, jobs, [&](int q) {
            const std::uint64_t draw_seed = derive_seed(
                config.master_seed, kTagCvDraw,
                (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint32_t>(q));
            const MeasurementEnsemble psi =
                draw_ensemble(r, config.n, config.ensemble, 1.0 / r, draw_seed);
            const std::vector<double> scores = scores_prepacked(psi, zero_y, diffs);
            const double best = *std::min_element(scores.begin(), scores.end());
            eta_cv[q] = best;
            covered[q] = std::abs(best - eta_or) <= acc.epsilon * eta_or ? 1 : 0;
        });

        TrialSummary summary;
        summary.r = r;
        summary.epsilon = acc.epsilon;
        summary.epsilon_heuristic = acc.heuristic;
        summary.eta_or = eta_or;
        summary.eta_omp = eta_omp;
        summary.n_draws = config.num_cv_draws;
        summary.sigma_d = sigma_d;
        summary.seed = phi_seed;

        double sum = 0.0;
        for (double v : eta_cv)
            sum += v;
        summary.eta_cv_mean = sum / config.num_cv_draws;
        double var = 0.0;
        for (double v : eta_cv)
            var += (v - summary.eta_cv_mean) * (v - summary.eta_cv_mean);
        summary.eta_cv_std =
            config.num_cv_draws > 1 ? std::sqrt(var / (config.num_cv_draws - 1)) : 0.0;
        for (char c : covered)
            summary.coverage_count += c;

        summaries.push_back(std::move(summary));
    }
    return summaries;
}

Figure1Report summarize_figure1(const std::vector<TrialSummary>& summaries) {
    if (summaries.empty())
        throw InvalidArgument("summarize_figure1: no summaries");
    Figure1Report report;
    report.sigma_d = summaries.front().sigma_d;
    std::vector<TrialSummary> sorted(summaries);
    std::sort(sorted.begin(), sorted.end(),
              [](const TrialSummary& a, const TrialSummary& b) { return a.r < b.r; });
    for (const TrialSummary& s : sorted) {
        Figure1Row row;
        row.r = s.r;
        row.epsilon = s.epsilon;
        row.eta_cv_mean = s.eta_cv_mean;
        row.eta_cv_std = s.eta_cv_std;
        row.band_lo = (1.0 - s.epsilon) * s.eta_or;
        row.band_hi = (1.0 + s.epsilon) * s.eta_or;
        row.eta_or = s.eta_or;
        row.eta_omp = s.eta_omp;
        report.rows.push_back(row);
        if (report.heuristic_r < 0 && s.epsilon <= 0.6)
            report.heuristic_r = s.r;
    }
    return report;
}

void save_summary_csv(const std::vector<TrialSummary>& summaries, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("save_summary_csv: cannot open " + path);
    out << "r,epsilon,eta_or,eta_omp,eta_cv_mean,eta_cv_std,coverage,n_draws,sigma_d,seed\n";
    char buf[256];
    for (const TrialSummary& s : summaries) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g,%llu\n",
                      s.r, s.epsilon, s.eta_or, s.eta_omp, s.eta_cv_mean, s.eta_cv_std,
                      s.coverage_count, s.n_draws, s.sigma_d,
                      static_cast<unsigned long long>(s.seed));
        out << buf;
    }
    if (!out)
        throw IoError("save_summary_csv: write failed for " + path);
}

void save_manifest(const ExperimentConfig& config, const std::vector<TrialSummary>& summaries,
                   const std::string& path) {
    nlohmann::json j;
    j["config"] = {
        {"n", config.n},
        {"d", config.d},
        {"total_m", config.total_m},
        {"k", config.k},
        {"noise_std", config.noise_std},
        {"r_values", config.r_values},
        {"num_cv_draws", config.num_cv_draws},
        {"xi", config.xi},
        {"ensemble", config.ensemble == EnsembleKind::Gaussian ? "gaussian" : "bernoulli"},
        {"master_seed", config.master_seed},
    };
    nlohmann::json rows = nlohmann::json::array();
    for (const TrialSummary& s : summaries) {
        rows.push_back({
            {"r", s.r},
            {"seed", s.seed},
            {"rows", config.total_m - s.r},
            {"cols", config.n},
            {"kind", config.ensemble == EnsembleKind::Gaussian ? "gaussian" : "bernoulli"},
            {"variance", 1.0 / (config.total_m - s.r)},
        });
    }
    j["implementation_ensembles"] = rows;

    std::ofstream out(path);
    if (!out)
        throw IoError("save_manifest: cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("save_manifest: write failed for " + path);
}

} // namespace cscv
