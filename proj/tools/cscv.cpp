#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cscv/adaptive.hpp"
#include "cscv/decoders.hpp"
#include "cscv/errors.hpp"
#include "cscv/experiments.hpp"
#include "cscv/jl_cv.hpp"
#include "cscv/kernels.hpp"
#include "cscv/rng.hpp"
#include "cscv/sensing.hpp"
#include "cscv/signal.hpp"

// Exit codes: 0 ok, 2 usage, 3 assertion failed, 4 I/O, 5 inapplicable rule.

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitAssertion = 3;
constexpr int kExitIo = 4;
constexpr int kExitInapplicable = 5;

struct SeedFlag {
    std::uint64_t value = 1;
    bool given = false;
};

// Flag wins, then a config-file value, then CSCV_SEED, then the default.
std::uint64_t resolve_seed(const SeedFlag& flag, const nlohmann::json& cfg) {
    if (flag.given)
        return flag.value;
    if (cfg.contains("seed"))
        return cfg.at("seed").get<std::uint64_t>();
    if (const char* env = std::getenv("CSCV_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw cscv::InvalidArgument("CSCV_SEED is not an unsigned integer");
        }
    }
    return flag.value;
}

nlohmann::json load_config(const std::string& path) {
    if (path.empty())
        return nlohmann::json::object();
    std::ifstream in(path);
    if (!in)
        throw cscv::IoError("cannot open config file " + path);
    try {
        nlohmann::json cfg = nlohmann::json::parse(in);
        if (!cfg.is_object())
            throw cscv::InvalidArgument("config file must hold a JSON object");
        return cfg;
    } catch (const nlohmann::json::parse_error& e) {
        throw cscv::InvalidArgument(std::string("config file is not valid JSON: ") + e.what());
    }
}

template <typename T>
void overlay(const nlohmann::json& cfg, const CLI::Option* opt, const char* key, T& value) {
    if (opt->count() == 0 && cfg.contains(key))
        value = cfg.at(key).get<T>();
}

// Rescale a budget built at C = 1 to an explicit constant: for fixed rows,
// eps grows with sqrt(C).
cscv::JLBudget apply_budget_constant(cscv::JLBudget budget, double C) {
    if (!(C > 0.0))
        throw cscv::InvalidArgument("--jl-c must be positive");
    if (C != cscv::kDefaultC) {
        budget.C = C;
        budget.epsilon *= std::sqrt(C);
        budget.heuristic = budget.epsilon > 0.5;
    }
    return budget;
}

cscv::EnsembleKind parse_ensemble(const std::string& name) {
    if (name == "gaussian")
        return cscv::EnsembleKind::Gaussian;
    if (name == "bernoulli")
        return cscv::EnsembleKind::Bernoulli;
    throw cscv::InvalidArgument("ensemble must be gaussian or bernoulli");
}

cscv::DecoderKind parse_decoder(const std::string& name) {
    if (name == "omp")
        return cscv::DecoderKind::Omp;
    if (name == "lasso")
        return cscv::DecoderKind::LassoHomotopy;
    throw cscv::InvalidArgument("decoder must be omp or lasso");
}

void print_interval(const char* label, const cscv::ErrorInterval& iv) {
    std::printf("%s [%.10g, %.10g]%s\n", label, iv.lower, iv.upper,
                iv.conditional_lower ? " (lower end conditional)" : "");
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string kind;
    int n = 0;
    int d = 0;
    double noise_std = 0.05;
    double s = 2.0;
    double cs = 1.0;
    SeedFlag seed;
    std::string out;
    std::string config_path;
};

int run_generate(GenerateArgs& args, const CLI::App* cmd) {
    const nlohmann::json cfg = load_config(args.config_path);
    overlay(cfg, cmd->get_option("--kind"), "kind", args.kind);
    overlay(cfg, cmd->get_option("--n"), "n", args.n);
    overlay(cfg, cmd->get_option("--d"), "d", args.d);
    overlay(cfg, cmd->get_option("--noise-std"), "noise-std", args.noise_std);
    overlay(cfg, cmd->get_option("--s"), "s", args.s);
    overlay(cfg, cmd->get_option("--cs"), "cs", args.cs);
    overlay(cfg, cmd->get_option("--out"), "out", args.out);
    args.seed.given = cmd->get_option("--seed")->count() > 0;
    const std::uint64_t seed = resolve_seed(args.seed, cfg);

    if (args.out.empty())
        throw cscv::InvalidArgument("generate: --out is required");

    cscv::DenseSignal x;
    if (args.kind == "spike") {
        if (args.d <= 0)
            throw cscv::InvalidArgument("generate: spike kind requires --d >= 1");
        x = cscv::make_spike_signal(args.n, args.d, args.noise_std, seed);
    } else if (args.kind == "powerlaw") {
        x = cscv::make_compressible_signal(args.n, {args.s, args.cs}, seed);
    } else {
        throw cscv::InvalidArgument("generate: kind must be spike or powerlaw");
    }

    cscv::save_signal(x, args.out);
    std::printf("kind=%s n=%d seed=%llu out=%s\n", args.kind.c_str(), args.n,
                static_cast<unsigned long long>(seed), args.out.c_str());
    std::printf("sparsity=%d\n", cscv::sparsity(x));
    if (args.kind == "spike")
        std::printf("sigma_d=%.10g (d=%d)\n", cscv::best_k_term(x, args.d).residual_l2, args.d);
    else
        std::printf("s=%.10g c_s=%.10g\n", args.s, args.cs);
    return kExitOk;
}

// ------------------------------------------------------------------ decode

struct DecodeArgs {
    std::string signal_path;
    int m_total = 0;
    int r = 0;
    std::string decoder;
    int k = 0;
    std::string ensemble = "gaussian";
    double xi = 0.01;
    double jl_c = cscv::kDefaultC;
    SeedFlag seed;
    std::string config_path;
};

int run_decode(DecodeArgs& args, const CLI::App* cmd) {
    const nlohmann::json cfg = load_config(args.config_path);
    overlay(cfg, cmd->get_option("--signal"), "signal", args.signal_path);
    overlay(cfg, cmd->get_option("--m-total"), "m-total", args.m_total);
    overlay(cfg, cmd->get_option("--r"), "r", args.r);
    overlay(cfg, cmd->get_option("--decoder"), "decoder", args.decoder);
    overlay(cfg, cmd->get_option("--k"), "k", args.k);
    overlay(cfg, cmd->get_option("--ensemble"), "ensemble", args.ensemble);
    overlay(cfg, cmd->get_option("--xi"), "xi", args.xi);
    overlay(cfg, cmd->get_option("--jl-c"), "jl-c", args.jl_c);
    args.seed.given = cmd->get_option("--seed")->count() > 0;
    const std::uint64_t seed = resolve_seed(args.seed, cfg);
    if (args.signal_path.empty())
        throw cscv::InvalidArgument("decode: --signal is required");

    const cscv::DenseSignal x = cscv::load_signal(args.signal_path);
    const cscv::EnsembleKind kind = parse_ensemble(args.ensemble);
    const cscv::DecoderKind decoder = parse_decoder(args.decoder);

    const cscv::MeasurementPartition part =
        cscv::split(args.m_total, args.r, x.length(), kind, seed);
    const std::vector<double> y_phi = cscv::measure(part.phi, x);
    const std::vector<double> y_psi = cscv::measure(part.psi, x);

    std::printf("decoder=%s n=%d m_total=%d r=%d seed=%llu\n", args.decoder.c_str(), x.length(),
                args.m_total, args.r, static_cast<unsigned long long>(seed));

    if (decoder == cscv::DecoderKind::Omp) {
        const int k = args.k > 0 ? args.k : cscv::k_of_m(part.phi.rows, x.length());
        const cscv::EstimateSequence seq = cscv::omp_decode(part.phi, y_phi, k);
        const cscv::CVScoredSequence scored = cscv::cv_scores(part.psi, y_psi, seq.candidates);
        const cscv::JLBudget budget =
            apply_budget_constant(cscv::budget_from_rows(args.r, args.xi, k), args.jl_c);

        std::printf("candidates=%d cv_index=%d eta_cv=%.10g\n", k, scored.cv_index + 1,
                    scored.eta_cv_hat);
        std::printf("epsilon=%.10g heuristic=%d\n", budget.epsilon, budget.heuristic ? 1 : 0);
        const double sel = scored.scores[scored.cv_index];
        print_interval("interval absolute", cscv::absolute_interval(sel, budget));
        const double y_psi_norm =
            std::sqrt(cscv::kernels::sumsq(y_psi.data(), y_psi.size()));
        print_interval("interval relative", cscv::relative_interval(sel, y_psi_norm, budget));
        print_interval("oracle bracket", cscv::oracle_bracket(scored.eta_cv_hat, budget));
    } else {
        const cscv::HomotopyPath path = cscv::lasso_homotopy(part.phi, y_phi, 0.0, 0);
        const cscv::JLBudget budget = apply_budget_constant(
            cscv::budget_from_rows_continuum(args.r, args.xi,
                                             static_cast<int>(path.kinks.size())),
            args.jl_c);
        const cscv::PathCvResult res = cscv::cross_validate_path(path, part.psi, y_psi, budget);
        std::printf("kinks=%zu truncated=%d tau_max=%.10g\n", path.kinks.size(),
                    path.truncated ? 1 : 0, path.tau_max);
        std::printf("tau_star=%.10g cv_score=%.10g\n", res.tau_star, res.cv_score);
        std::printf("epsilon=%.10g heuristic=%d\n", budget.epsilon, budget.heuristic ? 1 : 0);
        print_interval("interval absolute", res.interval);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- adaptive

struct AdaptiveArgs {
    std::string signal_path;
    int m_total = 0;
    int m1 = 0;
    int stages = 3;
    double tau = 0.1;
    std::string decoder = "omp";
    int k = 1;
    std::string ensemble = "gaussian";
    SeedFlag seed;
    std::string trace_path;
    std::string config_path;
};

int run_adaptive(AdaptiveArgs& args, const CLI::App* cmd) {
    const nlohmann::json cfg = load_config(args.config_path);
    overlay(cfg, cmd->get_option("--signal"), "signal", args.signal_path);
    overlay(cfg, cmd->get_option("--m-total"), "m-total", args.m_total);
    overlay(cfg, cmd->get_option("--m1"), "m1", args.m1);
    overlay(cfg, cmd->get_option("--stages"), "stages", args.stages);
    overlay(cfg, cmd->get_option("--tau"), "tau", args.tau);
    overlay(cfg, cmd->get_option("--decoder"), "decoder", args.decoder);
    overlay(cfg, cmd->get_option("--k"), "k", args.k);
    overlay(cfg, cmd->get_option("--ensemble"), "ensemble", args.ensemble);
    overlay(cfg, cmd->get_option("--trace"), "trace", args.trace_path);
    args.seed.given = cmd->get_option("--seed")->count() > 0;
    const std::uint64_t seed = resolve_seed(args.seed, cfg);
    if (args.signal_path.empty())
        throw cscv::InvalidArgument("adaptive: --signal is required");

    const cscv::DenseSignal x = cscv::load_signal(args.signal_path);
    const cscv::AdaptiveSchedule schedule = cscv::geometric_schedule(
        args.m1, args.stages, args.m_total, args.tau, args.k, parse_decoder(args.decoder));

    const cscv::MeasurementEnsemble ensemble = cscv::draw_ensemble(
        args.m_total, x.length(), parse_ensemble(args.ensemble), 1.0, cscv::derive_seed(seed, 4));
    const std::vector<double> y = cscv::measure(ensemble, x);

    const cscv::AdaptiveResult result = cscv::adaptive_decode(ensemble, y, schedule);
    if (!args.trace_path.empty())
        cscv::save_trace(result, args.trace_path);

    std::printf("seed=%llu stages=%zu\n", static_cast<unsigned long long>(seed),
                schedule.stage_rows.size());
    for (const cscv::StageRecord& rec : result.per_stage)
        std::printf("stage=%d m_j=%d r_j=%d score=%.10g statistic=%.10g fired=%d\n", rec.stage,
                    rec.m_j, rec.r_j, rec.score, rec.statistic, rec.fired ? 1 : 0);
    if (result.stopped_at_stage > 0)
        std::printf("STOPPED stage=%d\n", result.stopped_at_stage);
    else
        std::printf("EXHAUSTED warning=too-dense\n");
    return kExitOk;
}

// -------------------------------------------------------------- experiment

struct ExperimentArgs {
    std::string preset = "desk";
    int n = 0;
    int d = 0;
    int m_total = 0;
    int k = 0;
    double noise_std = -1.0;
    int draws = 0;
    double xi = 0.0;
    std::string ensemble;
    std::vector<int> r_values;
    SeedFlag seed;
    std::string out;
    std::string manifest;
    int jobs = 0;
    std::string config_path;
};

int run_experiment(ExperimentArgs& args, const CLI::App* cmd) {
    const nlohmann::json cfg = load_config(args.config_path);
    overlay(cfg, cmd->get_option("--preset"), "preset", args.preset);
    overlay(cfg, cmd->get_option("--n"), "n", args.n);
    overlay(cfg, cmd->get_option("--d"), "d", args.d);
    overlay(cfg, cmd->get_option("--m-total"), "m-total", args.m_total);
    overlay(cfg, cmd->get_option("--k"), "k", args.k);
    overlay(cfg, cmd->get_option("--noise-std"), "noise-std", args.noise_std);
    overlay(cfg, cmd->get_option("--draws"), "draws", args.draws);
    overlay(cfg, cmd->get_option("--xi"), "xi", args.xi);
    overlay(cfg, cmd->get_option("--ensemble"), "ensemble", args.ensemble);
    overlay(cfg, cmd->get_option("--r-values"), "r-values", args.r_values);
    overlay(cfg, cmd->get_option("--out"), "out", args.out);
    overlay(cfg, cmd->get_option("--manifest"), "manifest", args.manifest);
    overlay(cfg, cmd->get_option("--jobs"), "jobs", args.jobs);
    args.seed.given = cmd->get_option("--seed")->count() > 0;

    cscv::ExperimentConfig config;
    if (args.preset == "desk")
        config = cscv::desk_config();
    else if (args.preset == "paper")
        config = cscv::paper_config();
    else
        throw cscv::InvalidArgument("experiment: preset must be desk or paper");

    if (args.n > 0)
        config.n = args.n;
    if (args.d > 0)
        config.d = args.d;
    if (args.m_total > 0)
        config.total_m = args.m_total;
    if (args.k > 0)
        config.k = args.k;
    if (args.noise_std >= 0.0)
        config.noise_std = args.noise_std;
    if (args.draws > 0)
        config.num_cv_draws = args.draws;
    if (args.xi > 0.0)
        config.xi = args.xi;
    if (!args.ensemble.empty())
        config.ensemble = parse_ensemble(args.ensemble);
    if (!args.r_values.empty())
        config.r_values = args.r_values;
    config.master_seed = resolve_seed(args.seed, cfg);

    if (args.out.empty())
        throw cscv::InvalidArgument("experiment: --out is required");

    const std::vector<cscv::TrialSummary> summaries =
        cscv::run_omp_cv_experiment(config, args.jobs);
    cscv::save_summary_csv(summaries, args.out);
    if (!args.manifest.empty())
        cscv::save_manifest(config, summaries, args.manifest);

    const cscv::Figure1Report report = cscv::summarize_figure1(summaries);
    std::printf("master_seed=%llu rows=%zu out=%s\n",
                static_cast<unsigned long long>(config.master_seed), summaries.size(),
                args.out.c_str());
    std::printf("sigma_d=%.6g heuristic_r=%d\n", report.sigma_d, report.heuristic_r);
    std::printf("%4s %9s %12s %12s %12s %12s %12s\n", "r", "epsilon", "eta_cv_mean", "band_lo",
                "band_hi", "eta_or", "eta_omp");
    for (const cscv::Figure1Row& row : report.rows)
        std::printf("%4d %9.4f %12.6g %12.6g %12.6g %12.6g %12.6g\n", row.r, row.epsilon,
                    row.eta_cv_mean, row.band_lo, row.band_hi, row.eta_or, row.eta_omp);

    bool coverage_ok = true;
    for (const cscv::TrialSummary& s : summaries) {
        const double expect = config.xi * s.n_draws;
        const int allowed = static_cast<int>(
            std::ceil(expect + 5.0 * std::sqrt(expect * (1.0 - config.xi))));
        const int failures = s.n_draws - s.coverage_count;
        if (failures > allowed) {
            std::printf("COVERAGE ASSERTION FAILED r=%d failures=%d allowed=%d\n", s.r, failures,
                        allowed);
            coverage_ok = false;
        }
    }
    return coverage_ok ? kExitOk : kExitAssertion;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse recovery with holdout-certified error brackets"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("generate", "Write a synthetic signal file");
    cmd_gen->add_option("--kind", gen.kind, "spike or powerlaw");
    cmd_gen->add_option("--n", gen.n, "signal length");
    cmd_gen->add_option("--d", gen.d, "spike count (spike)");
    cmd_gen->add_option("--noise-std", gen.noise_std, "spike noise level");
    cmd_gen->add_option("--s", gen.s, "power-law decay exponent (powerlaw)");
    cmd_gen->add_option("--cs", gen.cs, "power-law scale (powerlaw)");
    cmd_gen->add_option("--seed", gen.seed.value, "rng seed (CSCV_SEED fallback)");
    cmd_gen->add_option("--out", gen.out, "output signal path");
    cmd_gen->add_option("--config", gen.config_path, "JSON config overlay");

    DecodeArgs dec;
    CLI::App* cmd_dec = app.add_subcommand("decode", "Measure, decode, and bracket the error");
    cmd_dec->add_option("--signal", dec.signal_path, "signal file");
    cmd_dec->add_option("--m-total", dec.m_total, "total measurement rows");
    cmd_dec->add_option("--r", dec.r, "holdout rows");
    cmd_dec->add_option("--decoder", dec.decoder, "omp or lasso");
    cmd_dec->add_option("--k", dec.k, "omp iterations (default: working sparsity)");
    cmd_dec->add_option("--ensemble", dec.ensemble, "gaussian or bernoulli");
    cmd_dec->add_option("--xi", dec.xi, "confidence parameter");
    cmd_dec->add_option("--jl-c", dec.jl_c, "budget constant C");
    cmd_dec->add_option("--seed", dec.seed.value, "rng seed (CSCV_SEED fallback)");
    cmd_dec->add_option("--config", dec.config_path, "JSON config overlay");

    AdaptiveArgs ada;
    CLI::App* cmd_ada = app.add_subcommand("adaptive", "Staged decoding with the stopping rule");
    cmd_ada->add_option("--signal", ada.signal_path, "signal file");
    cmd_ada->add_option("--m-total", ada.m_total, "total measurement rows");
    cmd_ada->add_option("--m1", ada.m1, "first stage rows");
    cmd_ada->add_option("--stages", ada.stages, "stage count");
    cmd_ada->add_option("--tau", ada.tau, "target relative error");
    cmd_ada->add_option("--decoder", ada.decoder, "omp or lasso");
    cmd_ada->add_option("--k", ada.k, "decoder sparsity input");
    cmd_ada->add_option("--ensemble", ada.ensemble, "gaussian or bernoulli");
    cmd_ada->add_option("--seed", ada.seed.value, "rng seed (CSCV_SEED fallback)");
    cmd_ada->add_option("--trace", ada.trace_path, "per-stage trace CSV path");
    cmd_ada->add_option("--config", ada.config_path, "JSON config overlay");

    ExperimentArgs exp;
    CLI::App* cmd_exp = app.add_subcommand("experiment", "Repeated-holdout recovery experiment");
    cmd_exp->add_option("--preset", exp.preset, "desk or paper");
    cmd_exp->add_option("--n", exp.n, "override: signal length");
    cmd_exp->add_option("--d", exp.d, "override: spike count");
    cmd_exp->add_option("--m-total", exp.m_total, "override: measurement budget");
    cmd_exp->add_option("--k", exp.k, "override: decoder iterations");
    cmd_exp->add_option("--noise-std", exp.noise_std, "override: spike noise level");
    cmd_exp->add_option("--draws", exp.draws, "override: holdout draws per r");
    cmd_exp->add_option("--xi", exp.xi, "override: confidence parameter");
    cmd_exp->add_option("--ensemble", exp.ensemble, "override: gaussian or bernoulli");
    cmd_exp->add_option("--r-values", exp.r_values, "override: comma-separated r grid")
        ->delimiter(',');
    cmd_exp->add_option("--seed", exp.seed.value, "master seed (CSCV_SEED fallback)");
    cmd_exp->add_option("--out", exp.out, "summary CSV path");
    cmd_exp->add_option("--manifest", exp.manifest, "JSON manifest path");
    cmd_exp->add_option("--jobs", exp.jobs, "worker cap (0 = hardware)");
    cmd_exp->add_option("--config", exp.config_path, "JSON config overlay");

    try {
        app.parse(argc, argv);
        if (cmd_gen->parsed())
            return run_generate(gen, cmd_gen);
        if (cmd_dec->parsed())
            return run_decode(dec, cmd_dec);
        if (cmd_ada->parsed())
            return run_adaptive(ada, cmd_ada);
        return run_experiment(exp, cmd_exp);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const cscv::InsufficientCvRows& e) {
        std::fprintf(stderr, "error (rule inapplicable): %s\n", e.what());
        return kExitInapplicable;
    } catch (const cscv::InvalidSchedule& e) {
        std::fprintf(stderr, "error (schedule): %s\n", e.what());
        return kExitInapplicable;
    } catch (const cscv::IoError& e) {
        std::fprintf(stderr, "error (io): %s\n", e.what());
        return kExitIo;
    } catch (const cscv::InvalidArgument& e) {
        std::fprintf(stderr, "error (usage): %s\n", e.what());
        return kExitUsage;
    } catch (const cscv::IllConditionedSupport& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitAssertion;
    } catch (const cscv::DegenerateInput& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitAssertion;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitAssertion;
    }
}
