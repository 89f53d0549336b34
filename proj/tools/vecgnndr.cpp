// Command-line front door: GMI sweeps across decoder variants and channels,
// MCMC validation against the quadrature oracle, decoder simulations, and
// codebook optimization runs. Emits CSV (12 significant digits, LF) and
// plain-text summaries.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure,
// 3 validation-tolerance breach.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vecgnndr/channels.hpp"
#include "vecgnndr/codebook.hpp"
#include "vecgnndr/core.hpp"
#include "vecgnndr/decoder.hpp"
#include "vecgnndr/gmi.hpp"
#include "vecgnndr/mcmc.hpp"
#include "vecgnndr/restricted.hpp"
#include "vecgnndr/rng.hpp"
#include "vecgnndr/stats.hpp"

using namespace vecgnndr;
using nlohmann::json;

namespace {

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + path);
    for (const auto& l : lines) f << l << "\n";
}

// Companion layout for gnuplot: same rows, whitespace-separated, '#' header.
void write_gnuplot(const std::string& path, const std::vector<std::string>& lines) {
    std::vector<std::string> out;
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string row = lines[i];
        std::replace(row.begin(), row.end(), ',', ' ');
        out.push_back(i == 0 ? "# " + row : row);
    }
    write_lines(path, out);
}

// Pre-parse --config and turn the JSON object into leading CLI arguments so
// that explicitly passed flags override it (TakeLast policy).
std::vector<std::string> merge_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream f(config_path);
    if (!f) throw std::invalid_argument("cannot read config file: " + config_path);
    json cfg = json::parse(f);
    if (!cfg.is_object()) throw std::invalid_argument("config must be a JSON object");

    std::vector<std::string> injected;
    if (!args.empty()) injected.push_back(args[0]);  // subcommand name
    for (const auto& [key, value] : cfg.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) injected.push_back("--" + key);
            continue;
        }
        injected.push_back("--" + key);
        if (value.is_string())
            injected.push_back(value.get<std::string>());
        else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                if (!joined.empty()) joined += ",";
                joined += v.is_string() ? v.get<std::string>() : v.dump();
            }
            injected.push_back(joined);
        } else {
            injected.push_back(value.dump());
        }
    }
    for (std::size_t i = 1; i < args.size(); ++i) injected.push_back(args[i]);
    return injected;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
    std::string channel = "bnc";
    int bx = 2;
    double power = 1.0;
    double c = 0.1;
    double snr_start = 0.0, snr_end = 20.0, snr_step = 5.0;
    std::string variants = "opt";
    std::int64_t n_samples = 100000;
    std::int64_t obs = 1000;  // outer observations for MCMC-driven variants
    int mcmc_iters = 10000, mcmc_burnin = 2000, mcmc_chains = 4;
    double mcmc_step = 0.1;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out = "sweep.csv";
    bool gnuplot = false;
};

bool variant_allowed(const std::string& channel, const std::string& v) {
    if (v == "elem") return channel == "bnc";
    if (v == "id") return channel == "pnc";
    const std::vector<std::string> generic = {"opt",     "cssf",    "cmsf",
                                              "csi_ssf", "csi_msf", "lin"};
    return std::find(generic.begin(), generic.end(), v) != generic.end();
}

StatsSampler mcmc_stats_sampler(const PhaseNoiseParams& p, const McmcConfig& base) {
    return [p, base](Rng& rng) {
        const VectorXcd y = pnc_sample(p, rng).y;
        McmcConfig cfg = base;
        cfg.seed = rng.raw();  // per-observation chain seeds from the stream
        return mcmc_posterior(y, p, cfg).first;
    };
}

int run_sweep(const SweepOptions& o) {
    const std::vector<std::string> variants = split_csv_list(o.variants);
    if (variants.empty())
        throw std::invalid_argument("sweep: the variant list is empty");
    for (const auto& v : variants)
        if (!variant_allowed(o.channel, v))
            throw std::invalid_argument(
                "sweep: variant '" + v + "' is not defined for channel '" +
                o.channel + "' (elem is bnc-only, id is pnc-only)");
    if (o.snr_step <= 0.0) throw std::invalid_argument("sweep: snr-step must be positive");

    std::vector<std::string> rows = {"snr_db,variant,gmi_nats,std_err,n_samples,method"};

    int point = 0;
    for (double snr = o.snr_start; snr <= o.snr_end + 1e-9; snr += o.snr_step, ++point) {
        const double sigma2 = snr_db_to_sigma2(snr, o.power);
        int vi = 0;
        for (const auto& v : variants) {
            const std::uint64_t seed =
                mix_seed(o.seed, static_cast<std::uint64_t>(point * 64 + vi++));
            GmiEstimate est;
            std::string method;

            if (o.channel == "bnc") {
                const BlockNoncoherentParams p{o.bx, o.power, sigma2};
                if (v == "opt") {
                    est = bnc_optimal_gmi(p);
                    method = "quadrature";
                } else if (v == "elem") {
                    est = bnc_elementwise_gmi(p);
                    method = "quadrature";
                } else if (v == "cssf" || v == "csi_ssf") {
                    est = cssf(bnc_stats_sampler(p), o.power, o.n_samples, seed,
                               o.threads).gmi;
                    method = "mc";
                } else if (v == "cmsf" || v == "csi_msf") {
                    est = cmsf(bnc_stats_sampler(p), o.power, o.n_samples, seed,
                               o.threads).gmi;
                    method = "mc";
                } else {  // lin
                    est = linear_variant_sampled(bnc_joint_sampler(p), o.power,
                                                 o.n_samples, seed, o.threads).gmi;
                    method = "mc";
                }
            } else if (o.channel == "pnc") {
                const PhaseNoiseParams p{o.bx, o.power, sigma2, o.c};
                McmcConfig cfg;
                cfg.n_iters = o.mcmc_iters;
                cfg.burn_in = o.mcmc_burnin;
                cfg.n_chains = o.mcmc_chains;
                cfg.step = o.mcmc_step;
                if (v == "lin") {
                    est = pnc_linear_gmi(p).gmi;
                    method = "closed";
                } else if (v == "id") {
                    est = pnc_identity_gmi(p);
                    method = "closed";
                } else {
                    const StatsSampler sampler = mcmc_stats_sampler(p, cfg);
                    if (v == "opt")
                        est = optimal_gmi(sampler, o.power, o.obs, seed, o.threads);
                    else if (v == "cssf" || v == "csi_ssf")
                        est = cssf(sampler, o.power, o.obs, seed, o.threads).gmi;
                    else
                        est = cmsf(sampler, o.power, o.obs, seed, o.threads).gmi;
                    method = "mcmc";
                }
            } else if (o.channel == "acgnc") {
                AcgncParams p;
                p.a = MatrixXcd::Identity(o.bx, o.bx);
                p.sigma_noise = sigma2 * MatrixXcd::Identity(o.bx, o.bx);
                p.power = o.power;
                if (v == "opt") {
                    est = acgnc_optimal(p).gmi;
                    method = "closed";
                } else if (v == "lin") {
                    CorrelationPair corr;
                    corr.xy = o.power * p.a.adjoint();
                    corr.yy = o.power * p.a * p.a.adjoint() + p.sigma_noise;
                    est = linear_variant([&](int) { return corr; }, {1.0}, o.power).gmi;
                    method = "closed";
                } else if (v == "cssf" || v == "csi_ssf") {
                    est = cssf(acgnc_stats_sampler(p), o.power, o.n_samples, seed,
                               o.threads).gmi;
                    method = "mc";
                } else {
                    est = cmsf(acgnc_stats_sampler(p), o.power, o.n_samples, seed,
                               o.threads).gmi;
                    method = "mc";
                }
            } else {
                throw std::invalid_argument("sweep: unknown channel " + o.channel);
            }

            rows.push_back(fmt12(snr) + "," + v + "," + fmt12(est.value) + "," +
                           fmt12(est.std_err) + "," +
                           std::to_string(est.n_samples) + "," + method);
        }
    }
    write_lines(o.out, rows);
    if (o.gnuplot) write_gnuplot(o.out + ".dat", rows);
    std::cout << "wrote " << rows.size() - 1 << " rows to " << o.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// mcmc-validate
// ---------------------------------------------------------------------------

struct McmcValidateOptions {
    int bx = 1;
    double power = 1.0;
    double c = 0.5;
    double snr = 0.0;
    int obs = 20;
    int iters = 10000, burnin = 2000, chains = 4;
    double step = 0.1;
    bool no_adapt = false;
    double tol_mu = 0.02, tol_sigma = 0.05;
    double acc_lo = 0.1, acc_hi = 0.6;
    std::uint64_t seed = 0;
};

int run_mcmc_validate(const McmcValidateOptions& o) {
    const PhaseNoiseParams p{o.bx, o.power, snr_db_to_sigma2(o.snr, o.power), o.c};
    const bool with_oracle = o.bx <= 3;
    McmcConfig cfg;
    cfg.n_iters = o.iters;
    cfg.burn_in = o.burnin;
    cfg.n_chains = o.chains;
    cfg.step = o.step;
    cfg.adapt_step = !o.no_adapt;

    Rng rng = derive_stream(o.seed, 0);
    bool ok = true;
    double worst_mu = 0.0, worst_sigma = 0.0;

    std::cout << (with_oracle
                      ? "obs  max|dmu|    max|dSigma| accept  spread\n"
                      : "obs  accept  spread   (diagnostics only: B_x > 3)\n");
    for (int i = 0; i < o.obs; ++i) {
        const VectorXcd y = pnc_sample(p, rng).y;
        McmcConfig run_cfg = cfg;
        run_cfg.seed = mix_seed(o.seed, 1000 + static_cast<std::uint64_t>(i));
        const auto [st, diag] = mcmc_posterior(y, p, run_cfg);

        char line[160];
        if (with_oracle) {
            const PosteriorStats oracle = quadrature_posterior(y, p);
            const double dmu = (st.mu - oracle.mu).cwiseAbs().maxCoeff();
            const double dsig =
                (st.sigma - oracle.sigma).cwiseAbs().maxCoeff();
            worst_mu = std::max(worst_mu, dmu);
            worst_sigma = std::max(worst_sigma, dsig);
            if (dmu > o.tol_mu * std::sqrt(o.power) || dsig > o.tol_sigma * o.power)
                ok = false;
            std::snprintf(line, sizeof(line), "%-4d %-11.4g %-11.4g %-7.3f %-8.4g",
                          i, dmu, dsig, diag.acceptance_rate, diag.split_spread);
        } else {
            std::snprintf(line, sizeof(line), "%-4d %-7.3f %-8.4g", i,
                          diag.acceptance_rate, diag.split_spread);
        }
        std::cout << line << "\n";
        if (diag.acceptance_rate < o.acc_lo || diag.acceptance_rate > o.acc_hi)
            ok = false;
    }
    if (with_oracle)
        std::cout << "worst |dmu| = " << fmt12(worst_mu)
                  << "  worst |dSigma| = " << fmt12(worst_sigma)
                  << "  (tolerances " << fmt12(o.tol_mu * std::sqrt(o.power))
                  << ", " << fmt12(o.tol_sigma * o.power) << ")\n";
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 3;
}

// ---------------------------------------------------------------------------
// decode-sim
// ---------------------------------------------------------------------------

struct DecodeSimOptions {
    int bx = 2;
    double power = 1.0;
    double snr = 10.0;
    double rate = -1.0;       // absolute rate in nats/symbol
    double rate_frac = 0.5;   // used when rate < 0: fraction of the optimal GMI
    std::string metric = "opt";
    std::string lengths = "10,50,200";
    std::int64_t trials = 10000;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out = "decode_sim.csv";
    bool gnuplot = false;
};

int run_decode_sim(const DecodeSimOptions& o) {
    const BlockNoncoherentParams p{o.bx, o.power, snr_db_to_sigma2(o.snr, o.power)};
    double rate = o.rate;
    if (rate < 0.0) rate = o.rate_frac * bnc_optimal_gmi(p).value;

    const TransmitChannel chan = [p](const VectorXcd& x, Rng& rng) {
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        const cplx rot(std::cos(theta), std::sin(theta));
        return Observation{rot * x + rng.cnormal_vec(p.b_x, p.sigma2), 0};
    };
    MetricProvider metric;
    if (o.metric == "opt") {
        metric = [p](const Observation& obs) {
            return bnc_optimal_metric(obs.y, p, kDefaultEps);
        };
    } else if (o.metric == "id") {
        metric = [p](const Observation& obs) {
            return MetricFactors{obs.y, MatrixXcd::Identity(p.b_x, p.b_x)};
        };
    } else {
        throw std::invalid_argument("decode-sim: metric must be opt or id");
    }

    std::vector<std::string> rows = {"L,trials,error_rate,ci"};
    std::cout << "rate " << fmt12(rate) << " nats/symbol (optimal GMI "
              << fmt12(bnc_optimal_gmi(p).value) << ")\n";
    int li = 0;
    for (const auto& ls : split_csv_list(o.lengths)) {
        const int l = std::stoi(ls);
        const ErrorRateResult r =
            block_error_rate(chan, metric, rate, l, p.b_x, p.power, o.trials,
                             mix_seed(o.seed, static_cast<std::uint64_t>(li++)),
                             o.threads);
        rows.push_back(std::to_string(l) + "," + std::to_string(r.trials) + "," +
                       fmt12(r.error_rate) + "," + fmt12(r.wilson_halfwidth));
        std::cout << "L=" << l << "  M=" << r.m << "  effective rate "
                  << fmt12(r.effective_rate) << "  error rate "
                  << fmt12(r.error_rate) << " +- " << fmt12(r.wilson_halfwidth)
                  << "\n";
    }
    write_lines(o.out, rows);
    if (o.gnuplot) write_gnuplot(o.out + ".dat", rows);
    return 0;
}

// ---------------------------------------------------------------------------
// codebook-opt
// ---------------------------------------------------------------------------

struct CodebookOptOptions {
    std::string gains = "1.5,0.6";
    double noise = 0.4;
    double power = 1.0;
    int iters = 20;
    double tol = 1e-3;
    std::int64_t n_samples = 40000;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out = "codebook_opt.csv";
    bool gnuplot = false;
};

int run_codebook_opt(const CodebookOptOptions& o) {
    const std::vector<std::string> gain_strs = split_csv_list(o.gains);
    const int bx = static_cast<int>(gain_strs.size());
    if (bx < 1) throw std::invalid_argument("codebook-opt: empty gain list");
    MatrixXcd a = MatrixXcd::Zero(bx, bx);
    for (int i = 0; i < bx; ++i) a(i, i) = std::stod(gain_strs[i]);
    const AcgncParams params{a, o.noise * MatrixXcd::Identity(bx, bx), o.power};
    const ColoredChannel ch = make_acgnc_colored_channel(params);

    const FixedPointTrace trace = fixed_point_iterate(
        ch, VectorXd::Ones(bx), o.iters, o.tol, o.n_samples, o.seed, o.threads);

    std::string header = "iter";
    for (int i = 0; i < bx; ++i) header += ",lambda_" + std::to_string(i + 1);
    header += ",trace,objective";
    std::vector<std::string> rows = {header};
    for (std::size_t it = 0; it < trace.iterates.size(); ++it) {
        std::string row = std::to_string(it);
        for (int i = 0; i < bx; ++i) row += "," + fmt12(trace.iterates[it][i]);
        row += "," + fmt12(trace.iterates[it].sum());
        row += "," + fmt12(trace.objective[it]);
        rows.push_back(row);
    }
    write_lines(o.out, rows);
    if (o.gnuplot) write_gnuplot(o.out + ".dat", rows);

    std::cout << (trace.converged ? "converged" : "iteration budget reached")
              << " after " << trace.iterates.size() - 1 << " steps; final lambda = [";
    for (int i = 0; i < bx; ++i)
        std::cout << (i ? ", " : "") << fmt12(trace.iterates.back()[i]);
    std::cout << "]\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GMI-optimal vectorized nearest-neighbor decoding metrics for "
                 "in-block-memory channels"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.option_defaults()->always_capture_default();

    std::string config_dummy;

    SweepOptions sw;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "GMI versus SNR for a set of decoder variants; CSV output");
    sweep->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sweep->option_defaults()->always_capture_default();
    sweep->add_option("--config", config_dummy, "JSON config file (flags override)");
    sweep->add_option("--channel", sw.channel, "bnc | pnc | acgnc")
        ->check(CLI::IsMember({"bnc", "pnc", "acgnc"}));
    sweep->add_option("--bx", sw.bx, "block length B_x")->check(CLI::PositiveNumber);
    sweep->add_option("--power", sw.power, "input power P (default 1)");
    sweep->add_option("--c", sw.c, "phase-noise diffusion intensity");
    sweep->add_option("--snr-start", sw.snr_start, "first SNR point (dB)");
    sweep->add_option("--snr-end", sw.snr_end, "last SNR point (dB)");
    sweep->add_option("--snr-step", sw.snr_step, "SNR step (dB)");
    sweep->add_option("--variants", sw.variants,
                      "comma list from opt,elem,cssf,cmsf,csi_ssf,csi_msf,lin,id");
    sweep->add_option("--n-samples", sw.n_samples,
                      "Monte Carlo samples per point (default 1e5)");
    sweep->add_option("--obs", sw.obs,
                      "outer observations per point for MCMC-driven variants");
    sweep->add_option("--mcmc-iters", sw.mcmc_iters, "MCMC iterations per chain");
    sweep->add_option("--mcmc-burnin", sw.mcmc_burnin, "MCMC burn-in steps");
    sweep->add_option("--mcmc-chains", sw.mcmc_chains, "MCMC chains");
    sweep->add_option("--mcmc-step", sw.mcmc_step, "MCMC proposal scale");
    sweep->add_option("--seed", sw.seed, "master seed (required)")->required();
    sweep->add_option("--threads", sw.threads,
                      "worker threads (0: VECGNNDR_THREADS or hardware)");
    sweep->add_option("--out", sw.out, "output CSV path");
    sweep->add_flag("--gnuplot", sw.gnuplot, "also write a gnuplot-style .dat file");

    McmcValidateOptions mv;
    CLI::App* mval = app.add_subcommand(
        "mcmc-validate", "compare MCMC posterior statistics with the quadrature oracle");
    mval->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    mval->option_defaults()->always_capture_default();
    mval->add_option("--config", config_dummy, "JSON config file (flags override)");
    mval->add_option("--bx", mv.bx, "block length (oracle columns need B_x <= 3)");
    mval->add_option("--power", mv.power, "input power");
    mval->add_option("--c", mv.c, "diffusion intensity");
    mval->add_option("--snr", mv.snr, "SNR in dB");
    mval->add_option("--obs", mv.obs, "number of random observations");
    mval->add_option("--iters", mv.iters, "iterations per chain");
    mval->add_option("--burnin", mv.burnin, "burn-in steps");
    mval->add_option("--chains", mv.chains, "number of chains");
    mval->add_option("--step", mv.step, "proposal scale");
    mval->add_flag("--no-adapt", mv.no_adapt, "disable burn-in step adaptation");
    mval->add_option("--tol-mu", mv.tol_mu, "per-entry |dmu| tolerance (times sqrt(P))");
    mval->add_option("--tol-sigma", mv.tol_sigma, "per-entry |dSigma| tolerance (times P)");
    mval->add_option("--acc-lo", mv.acc_lo, "acceptance-rate lower bound");
    mval->add_option("--acc-hi", mv.acc_hi, "acceptance-rate upper bound");
    mval->add_option("--seed", mv.seed, "master seed (required)")->required();

    DecodeSimOptions ds;
    CLI::App* dsim = app.add_subcommand(
        "decode-sim", "block-error-rate trend of a decoding metric on the "
                      "block noncoherent channel");
    dsim->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    dsim->option_defaults()->always_capture_default();
    dsim->add_option("--config", config_dummy, "JSON config file (flags override)");
    dsim->add_option("--bx", ds.bx, "block length");
    dsim->add_option("--power", ds.power, "input power");
    dsim->add_option("--snr", ds.snr, "SNR in dB");
    dsim->add_option("--rate", ds.rate, "absolute rate in nats/symbol");
    dsim->add_option("--rate-frac", ds.rate_frac,
                     "rate as a fraction of the optimal GMI (when --rate unset)");
    dsim->add_option("--metric", ds.metric, "opt | id");
    dsim->add_option("--lengths", ds.lengths, "comma list of codeword lengths L");
    dsim->add_option("--trials", ds.trials, "Monte Carlo trials per length");
    dsim->add_option("--seed", ds.seed, "master seed (required)")->required();
    dsim->add_option("--threads", ds.threads, "worker threads");
    dsim->add_option("--out", ds.out, "output CSV path");
    dsim->add_flag("--gnuplot", ds.gnuplot, "also write a gnuplot-style .dat file");

    CodebookOptOptions co;
    CLI::App* copt = app.add_subcommand(
        "codebook-opt", "diagonal input-covariance fixed-point iteration on a "
                        "diagonal-gain colored-noise toy channel");
    copt->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    copt->option_defaults()->always_capture_default();
    copt->add_option("--config", config_dummy, "JSON config file (flags override)");
    copt->add_option("--gains", co.gains, "comma list of per-component channel gains");
    copt->add_option("--noise", co.noise, "noise variance per component");
    copt->add_option("--power", co.power, "input power");
    copt->add_option("--iters", co.iters, "maximum fixed-point iterations");
    copt->add_option("--tol", co.tol, "stopping tolerance on the largest change");
    copt->add_option("--n-samples", co.n_samples, "Monte Carlo samples per step");
    copt->add_option("--seed", co.seed, "master seed (required)")->required();
    copt->add_option("--threads", co.threads, "worker threads");
    copt->add_option("--out", co.out, "output CSV path");
    copt->add_flag("--gnuplot", co.gnuplot, "also write a gnuplot-style .dat file");

    try {
        const std::vector<std::string> merged = merge_config_args(argc, argv);
        // CLI11's vector overload consumes arguments back to front.
        std::vector<std::string> rev(merged.rbegin(), merged.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*sweep) return run_sweep(sw);
        if (*mval) return run_mcmc_validate(mv);
        if (*dsim) return run_decode_sim(ds);
        if (*copt) return run_codebook_opt(co);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
