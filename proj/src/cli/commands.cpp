#include "dynamo/cli.hpp"

#include "dynamo/errors.hpp"
#include "dynamo/meansquare.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace dynamo::cli {

namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json params_json(const ModelParams& p) {
    return {{"g", p.g},           {"delta", p.delta},     {"eps", p.eps},
            {"sigma1", p.sigma1}, {"k_alpha", p.k_alpha}, {"k_beta", p.k_beta}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_csv(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

const char* bool_csv(bool b) { return b ? "true" : "false"; }

// Writes `body` to cfg.out ("-" is the supplied stream).
void emit(const RunConfig& cfg, const std::string& path, const std::string& body, std::ostream& out) {
    if (path == "-" || path.empty()) {
        out << body;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open output file '" + path + "'");
    file << body;
    if (!file) throw IoError("failed writing output file '" + path + "'");
    (void)cfg;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- equilibria -----------------------------------------------------------

std::string render_equilibria(const RunConfig& cfg) {
    const auto eqs = find_equilibria(cfg.params);
    if (cfg.format == OutputFormat::json) {
        json rows = json::array();
        for (const auto& e : eqs)
            rows.push_back({{"b_r", e.state.b_r}, {"b_phi", e.state.b_phi}, {"residual", e.residual}});
        return dump({{"params", params_json(cfg.params)}, {"equilibria", rows}});
    }
    std::ostringstream os;
    os << "b_r,b_phi,residual\n";
    for (const auto& e : eqs)
        os << format_double(e.state.b_r) << ',' << format_double(e.state.b_phi) << ','
           << format_double(e.residual) << '\n';
    return os.str();
}

// --- lyapunov -------------------------------------------------------------

std::string render_lyapunov(const RunConfig& cfg) {
    if (cfg.params.sigma1 < 0.0) throw ValidationError("sigma1 must be >= 0");
    std::vector<LyapunovResult> results;
    const bool all = cfg.method == "all";
    if (all) {
        for (auto m : {LyapunovMethod::quadrature, LyapunovMethod::series,
                       LyapunovMethod::hypergeometric})
            results.push_back(lyapunov(cfg.params, m));
    } else {
        const LyapunovMethod m = parse_lyapunov_method(cfg.method);
        if (m == LyapunovMethod::montecarlo) {
            SimConfig sim = cfg.sim;
            sim.workers = cfg.workers;
            const McEstimate mc =
                mc_lyapunov(linearize(cfg.params), sim, RngSpec{cfg.seed, cfg.stream});
            LyapunovResult r;
            r.value = mc.value;
            r.method = m;
            r.error_estimate = mc.std_error;
            r.meta.samples = mc.n_samples;
            results.push_back(r);
        } else {
            results.push_back(lyapunov(cfg.params, m));
        }
    }
    double max_disc = 0.0;
    for (const auto& a : results)
        for (const auto& b : results) max_disc = std::max(max_disc, std::abs(a.value - b.value));

    if (cfg.format == OutputFormat::json) {
        json rows = json::array();
        for (const auto& r : results)
            rows.push_back({{"method", to_string(r.method)},
                            {"lambda", r.value},
                            {"error_estimate", r.error_estimate},
                            {"terms", r.meta.terms},
                            {"samples", r.meta.samples},
                            {"deterministic", r.meta.deterministic},
                            {"stability_in_probability",
                             stability_in_probability(classify_lambda(r.value))}});
        json doc{{"params", params_json(cfg.params)}, {"results", rows}};
        if (all) doc["max_discrepancy"] = max_disc;
        return dump(doc);
    }
    std::ostringstream os;
    os << "method,lambda,error_estimate,terms,deterministic\n";
    for (const auto& r : results)
        os << to_string(r.method) << ',' << format_double(r.value) << ','
           << format_double(r.error_estimate) << ',' << (r.meta.terms + r.meta.samples) << ','
           << bool_csv(r.meta.deterministic) << '\n';
    if (all) os << "max_discrepancy," << format_double(max_disc) << ",,,\n";
    return os.str();
}

// --- meansquare -----------------------------------------------------------

std::string render_meansquare(const RunConfig& cfg) {
    const MsReport r = ms_report(cfg.params);
    if (cfg.format == OutputFormat::json) {
        return dump({{"params", params_json(cfg.params)},
                     {"abscissa", r.abscissa},
                     {"ms_stable", r.ms_stable},
                     {"criticality", to_string(r.criticality)},
                     {"threshold_sigma", optional_json(r.threshold_sigma)},
                     {"ryashko_trace", optional_json(r.ryashko_trace)}});
    }
    std::ostringstream os;
    os << "abscissa,ms_stable,criticality,threshold_sigma,ryashko_trace\n"
       << format_double(r.abscissa) << ',' << bool_csv(r.ms_stable) << ','
       << to_string(r.criticality) << ',' << optional_csv(r.threshold_sigma) << ','
       << optional_csv(r.ryashko_trace) << '\n';
    return os.str();
}

// --- simulate -------------------------------------------------------------

std::string render_simulate(const RunConfig& cfg) {
    SimConfig sim = cfg.sim;
    sim.workers = cfg.workers;
    const RngSpec rng{cfg.seed, cfg.stream};
    const LinearSystem sys = linearize(cfg.params);

    if (cfg.mode == SimulateMode::angular) {
        const AngularHistogram h = angular_density(sys, sim, rng, cfg.bins);
        if (cfg.format == OutputFormat::json) {
            return dump({{"params", params_json(cfg.params)},
                         {"lower", h.lower},
                         {"bin_width", h.bin_width},
                         {"samples", h.samples},
                         {"density", h.density}});
        }
        std::ostringstream os;
        os << "bin_lower,bin_upper,density\n";
        for (std::size_t b = 0; b < h.density.size(); ++b) {
            const double lo = h.lower + static_cast<double>(b) * h.bin_width;
            os << format_double(lo) << ',' << format_double(lo + h.bin_width) << ','
               << format_double(h.density[b]) << '\n';
        }
        return os.str();
    }

    const bool lyap = cfg.mode == SimulateMode::lyapunov;
    if (lyap && sim.x0.b_r == 0.0 && sim.x0.b_phi == 0.0)
        throw ValidationError("x0 must be nonzero for Lyapunov estimation");
    const McEstimate est = lyap ? mc_lyapunov(sys, sim, rng) : mc_second_moment(sys, sim, rng);
    double reference = 0.0;
    std::string verdict;
    if (lyap) {
        reference = cfg.params.sigma1 > 0.0 ? lyapunov_hypergeometric(cfg.params).value
                                            : deterministic_abscissa(cfg.params);
        // Noise-free runs have zero spread across paths; fall back to the
        // O(dt) discretisation bias as the tolerance.
        const double tol = est.std_error > 0.0 ? 3.0 * est.std_error : 10.0 * sim.dt;
        verdict = std::abs(est.value - reference) <= tol ? "AGREE" : "DISAGREE";
    } else {
        reference = spectral_abscissa(build_stability_matrix(cfg.params));
        verdict = (est.value < 0.0) == (reference < 0.0) ? "SIGN_AGREE" : "SIGN_DISAGREE";
    }
    const char* mode = lyap ? "lyapunov" : "second-moment";
    if (cfg.format == OutputFormat::json) {
        return dump({{"params", params_json(cfg.params)},
                     {"mode", mode},
                     {"estimate", est.value},
                     {"std_error", est.std_error},
                     {"n_samples", est.n_samples},
                     {"reference", reference},
                     {"verdict", verdict}});
    }
    std::ostringstream os;
    os << "mode,estimate,std_error,n_samples,reference,verdict\n"
       << mode << ',' << format_double(est.value) << ',' << format_double(est.std_error) << ','
       << est.n_samples << ',' << format_double(reference) << ',' << verdict << '\n';
    return os.str();
}

// --- scan -----------------------------------------------------------------

std::string render_records(const RunConfig& cfg, const std::vector<RegionRecord>& recs) {
    if (cfg.format == OutputFormat::json) {
        json rows = json::array();
        for (const auto& r : recs) {
            json row{{"eps", r.eps},
                     {"sigma1", r.sigma1},
                     {"lambda", r.ok() ? json(r.lambda) : json(nullptr)},
                     {"lambda_sign", r.ok() ? std::string(to_string(r.lambda_sign)) : "error"},
                     {"ms_abscissa", r.ms_abscissa},
                     {"ms_stable", r.ms_stable},
                     {"criticality", to_string(r.criticality)},
                     {"dep_f", r.dep_f}};
            if (!r.ok()) row["error"] = r.error;
            rows.push_back(std::move(row));
        }
        return dump(rows);
    }
    std::string s = "eps,sigma1,lambda,lambda_sign,ms_abscissa,ms_stable,criticality,dep_f\n";
    for (const auto& r : recs) {
        s += format_double(r.eps) + ',' + format_double(r.sigma1) + ',' +
             (r.ok() ? format_double(r.lambda) : "nan") + ',' +
             (r.ok() ? std::string(to_string(r.lambda_sign)) : "error") + ',' +
             format_double(r.ms_abscissa) + ',' + bool_csv(r.ms_stable) + ',' +
             std::string(to_string(r.criticality)) + ',' + format_double(r.dep_f) + '\n';
    }
    return s;
}

std::string render_boundaries(const RunConfig& cfg, const std::vector<BoundaryPoint>& pts) {
    if (cfg.format == OutputFormat::json) {
        json rows = json::array();
        for (const auto& p : pts)
            rows.push_back({{"eps", p.eps}, {"sigma1", p.sigma1}, {"boundary_kind", to_string(p.kind)}});
        return dump(rows);
    }
    std::string s = "eps,sigma1,boundary_kind\n";
    for (const auto& p : pts)
        s += format_double(p.eps) + ',' + format_double(p.sigma1) + ',' +
             std::string(to_string(p.kind)) + '\n';
    return s;
}

void run_scan(RunConfig cfg, std::ostream& out) {
    cfg.scan.g = cfg.params.g;
    cfg.scan.delta = cfg.params.delta;
    cfg.scan.k_alpha = cfg.params.k_alpha;
    cfg.scan.k_beta = cfg.params.k_beta;
    cfg.scan.method = parse_lyapunov_method(cfg.method);
    cfg.scan.workers = cfg.workers;
    std::vector<BoundaryKind> kinds;
    for (const auto& k : cfg.boundary_kinds) kinds.push_back(parse_boundary_kind(k));
    cfg.scan.validate();

    const auto records = scan(cfg.scan);
    emit(cfg, cfg.out, render_records(cfg, records), out);
    if (!cfg.boundaries_out.empty()) {
        std::vector<BoundaryPoint> pts;
        for (auto k : kinds) {
            const auto b = trace_boundary(cfg.scan, k);
            pts.insert(pts.end(), b.begin(), b.end());
        }
        emit(cfg, cfg.boundaries_out, render_boundaries(cfg, pts), out);
    }
}

// --- argument plumbing ----------------------------------------------------

void add_common(CLI::App& app, RunConfig& cfg, std::string& format, std::string& config_path) {
    app.add_option("--g", cfg.params.g, "shear parameter g")->capture_default_str();
    app.add_option("--delta", cfg.params.delta, "alpha-effect parameter delta")->capture_default_str();
    app.add_option("--eps", cfg.params.eps, "diffusivity parameter eps")->capture_default_str();
    app.add_option("--sigma1", cfg.params.sigma1, "noise intensity sigma1")->capture_default_str();
    app.add_option("--k-alpha", cfg.params.k_alpha, "alpha-quenching constant")->capture_default_str();
    app.add_option("--k-beta", cfg.params.k_beta, "beta-quenching constant")->capture_default_str();
    app.add_option("--out", cfg.out, "output path, - for stdout")->capture_default_str();
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--config", config_path, "flat key=value file; flags override it");
    app.add_option("--workers", cfg.workers, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
}

// Config values are spliced in right after the subcommand name so that
// explicit flags, which come later, take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    const auto extra = read_config_file(path);
    std::vector<std::string> out;
    auto sub = std::find_if(args.begin(), args.end(),
                            [](const std::string& a) { return !a.empty() && a.front() != '-'; });
    out.insert(out.end(), args.begin(), sub == args.end() ? sub : sub + 1);
    out.insert(out.end(), extra.begin(), extra.end());
    if (sub != args.end()) out.insert(out.end(), sub + 1, args.end());
    return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string format = "csv";
    std::string config_path;
    std::string mode = "lyapunov";

    CLI::App app{"Stochastic stability analysis of a reduced alpha-Omega dynamo", "dynamo-stab"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    auto* eq = app.add_subcommand("equilibria", "equilibria of the noise-free nonlinear system");
    auto* ly = app.add_subcommand("lyapunov", "top Lyapunov exponent of the linearisation");
    auto* ms = app.add_subcommand("meansquare", "exponential mean-square stability report");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates");
    auto* sc = app.add_subcommand("scan", "stability regions in the (eps, sigma1) plane");
    for (auto* s : {eq, ly, ms, sim, sc}) add_common(*s, cfg, format, config_path);

    for (auto* s : {ly, sc}) {
        s->add_option("--method", cfg.method,
                      "quadrature, series, hypergeometric, montecarlo" +
                          std::string(s == ly ? " or all" : ""))
            ->capture_default_str();
    }
    for (auto* s : {ly, sim}) {
        s->add_option("--dt", cfg.sim.dt, "Euler-Maruyama step")->capture_default_str();
        s->add_option("--t-final", cfg.sim.t_final, "simulation horizon")->capture_default_str();
        s->add_option("--paths", cfg.sim.n_paths, "number of paths")->capture_default_str();
        s->add_option("--renorm-every", cfg.sim.renorm_every, "steps between renormalisations")
            ->capture_default_str();
        s->add_option("--x0-r", cfg.sim.x0.b_r, "initial radial field")->capture_default_str();
        s->add_option("--x0-phi", cfg.sim.x0.b_phi, "initial azimuthal field")->capture_default_str();
        s->add_option("--stream", cfg.stream, "base random stream")->capture_default_str();
    }
    sim->add_option("--mode", mode, "lyapunov, second-moment or angular")
        ->check(CLI::IsMember({"lyapunov", "second-moment", "angular"}))
        ->capture_default_str();
    sim->add_option("--bins", cfg.bins, "angular histogram bins")->capture_default_str();

    sc->add_option("--eps-min", cfg.scan.eps.min)->capture_default_str();
    sc->add_option("--eps-max", cfg.scan.eps.max)->capture_default_str();
    sc->add_option("--eps-n", cfg.scan.eps.n)->capture_default_str();
    sc->add_option("--sigma1-min", cfg.scan.sigma1.min)->capture_default_str();
    sc->add_option("--sigma1-max", cfg.scan.sigma1.max)->capture_default_str();
    sc->add_option("--sigma1-n", cfg.scan.sigma1.n)->capture_default_str();
    sc->add_option("--boundaries", cfg.boundaries_out, "boundary CSV/JSON output path");
    sc->add_option("--boundary-kinds", cfg.boundary_kinds, "subset of criticality,meansquare,lyapunov")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
        ->capture_default_str();

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    cfg.mode = mode == "angular"         ? SimulateMode::angular
               : mode == "second-moment" ? SimulateMode::second_moment
                                         : SimulateMode::lyapunov;
    try {
        if (cfg.params.sigma1 < 0.0) throw ValidationError("sigma1 must be >= 0");
        cfg.params.validate();
        if (*eq) emit(cfg, cfg.out, render_equilibria(cfg), out);
        if (*ly) emit(cfg, cfg.out, render_lyapunov(cfg), out);
        if (*ms) emit(cfg, cfg.out, render_meansquare(cfg), out);
        if (*sim) emit(cfg, cfg.out, render_simulate(cfg), out);
        if (*sc) run_scan(cfg, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NonConvergenceError& e) {
        err << "non-convergence: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace dynamo::cli
