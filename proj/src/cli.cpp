#include "srr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "srr/calibration.hpp"
#include "srr/csv.hpp"
#include "srr/fredholm.hpp"
#include "srr/simulator.hpp"
#include "srr/specfun.hpp"
#include "srr/stream.hpp"

namespace srr::cli {
namespace {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return ".";
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream file(dir / name);
    if (!file) throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
    return file;
}

std::string fmt(double v, int precision = 8) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

// ---- calibrate ----------------------------------------------------------

struct CalibrateOptions {
    ExperimentConfig exp;
    double tol = 1e-6;
    bool fig1 = false, fig2 = false;
};

int cmd_calibrate(CalibrateOptions opt, std::ostream& out) {
    const auto out_dir = opt.exp.out_dir;
    if (opt.fig1) opt.exp = ExperimentConfig::paper_fig1();
    if (opt.fig2) opt.exp = ExperimentConfig::paper_fig2();
    opt.exp.out_dir = out_dir;
    opt.exp.validate();
    if (!(opt.tol > 0.0)) throw UsageError("--tol must be positive");

    const CalibrationResult res = calibrate(opt.exp.gamma, opt.exp.n_quad, opt.tol);
    auto file = open_output(opt.exp.out_dir, "calibration.csv");
    CsvWriter csv(file, {"gamma", "r_star", "residual", "iterations"});
    csv.row(res.gamma, res.r_star, res.residual, res.iterations);
    out << "gamma = " << fmt(res.gamma) << "  r_star = " << fmt(res.r_star, 10) << "  residual = " << fmt(res.residual, 3)
        << "  iterations = " << res.iterations << '\n';
    return kOk;
}

// ---- verify -------------------------------------------------------------

struct VerifyOptions {
    ExperimentConfig exp;
    double tol = 1e-10;
    bool include_zero = false;
    std::size_t scan_points = 226;
    bool fig1 = false, fig2 = false;
};

int cmd_verify(VerifyOptions opt, std::ostream& out) {
    const auto out_dir = opt.exp.out_dir;
    if (opt.fig1) opt.exp = ExperimentConfig::paper_fig1();
    if (opt.fig2) opt.exp = ExperimentConfig::paper_fig2();
    opt.exp.out_dir = out_dir;
    opt.exp.validate();
    if (opt.scan_points < 2) throw UsageError("--scan-points must be at least 2");

    const ExperimentConfig& e = opt.exp;
    const CalibrationResult cal = calibrate(e.gamma, e.n_quad, opt.tol);
    if (!(e.r_min < cal.r_star)) throw UsageError("--r-min must be below the calibrated r_star " + fmt(cal.r_star));
    const Grid grid = make_grid(e.r_min, cal.r_star, e.gamma, e.grid_n);

    std::vector<double> lambdas = canonical_lambdas(e.lambda_count, e.lambda_max);
    if (opt.include_zero) lambdas.insert(lambdas.begin(), 0.0);
    const LambdaSweep sweep = sweep_lambda(grid, cal.r_star, e.gamma, lambdas, e.n_quad);

    {
        auto file = open_output(e.out_dir, "lambda_sweep.csv");
        CsvWriter csv(file, {"lambda", "f_lambda_rstar"});
        for (const auto& row : sweep.rows) csv.row(row.lambda, row.f_lambda_at_rstar.value_or(NAN));
    }
    {
        const auto [lo, hi] = kCalibrationBracket;
        std::vector<double> rs(opt.scan_points);
        for (std::size_t k = 0; k < rs.size(); ++k) rs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(rs.size() - 1);
        auto file = open_output(e.out_dir, "f0_scan.csv");
        CsvWriter csv(file, {"r", "f0_r"});
        for (const auto& [r, f] : calibration_curve(e.gamma, rs, e.n_quad)) csv.row(r, f);
    }

    std::size_t failed_solves = 0, violations = 0;
    double worst = -INFINITY;
    for (const auto& row : sweep.rows) {
        if (!row.f_lambda_at_rstar) {
            ++failed_solves;
            out << "lambda = " << fmt(row.lambda) << ": solve failed: " << row.error << '\n';
            continue;
        }
        if (row.lambda > 0.0) {
            worst = std::max(worst, *row.f_lambda_at_rstar);
            if (!(*row.f_lambda_at_rstar < 0.0)) ++violations;
        }
    }
    out << "gamma = " << fmt(e.gamma) << "  r_star = " << fmt(cal.r_star, 10) << "  grid = " << grid.size()
        << "  lambdas = " << lambdas.size() << "  max f_lambda(r*) = " << fmt(worst, 6) << '\n';
    if (failed_solves) return kRuntimeError;
    out << (violations ? "FAIL" : "PASS") << ": f_lambda(r*) < 0 for all lambda in (0, " << fmt(e.lambda_max) << "]";
    if (violations) out << " (" << violations << " violations)";
    out << '\n';
    return violations ? kConjectureViolated : kOk;
}

// ---- simulate -----------------------------------------------------------

struct SimulateOptions {
    ExperimentConfig exp;
    double r_star = NAN;
    std::string regime = "pre";
    std::vector<double> rs;
    std::vector<double> lambdas;
    std::vector<std::string> checks;
    unsigned workers = 0;
};

struct CheckRow {
    std::string name;
    sim::McEstimate est;
    double target;
    bool pass;
};

std::string label(const std::string& check, const std::vector<std::pair<std::string, double>>& params) {
    if (params.empty()) return check;
    std::string s = check + "[";
    bool first = true;
    for (const auto& [k, v] : params) {
        if (!first) s += ";";
        s += k + "=" + fmt(v, 6);
        first = false;
    }
    return s + "]";
}

int cmd_simulate(SimulateOptions opt, std::ostream& out) {
    const ExperimentConfig& e = opt.exp;
    e.validate();
    static const std::vector<std::string> known{"stoptime", "martingale", "flambda", "equalizer", "delay"};
    if (opt.checks.empty()) opt.checks = {"stoptime"};
    for (const auto& c : opt.checks) {
        if (std::find(known.begin(), known.end(), c) == known.end()) throw UsageError("unknown check '" + c + "'");
    }
    const bool pre = opt.regime == "pre", post = opt.regime == "post", prior = opt.regime == "prior";
    if (!pre && !post && !prior) throw UsageError("--regime must be pre, post or prior");

    const double r_star = std::isnan(opt.r_star) ? calibrate(e.gamma, e.n_quad).r_star : opt.r_star;
    if (!(r_star > 0.0)) throw UsageError("--r-star must be positive");
    const double g_star = specfun::g(r_star, r_star, e.gamma);
    if (opt.rs.empty()) opt.rs = {0.0, r_star, 3.0};
    for (double r : opt.rs) {
        if (!(r >= 0.0)) throw UsageError("--r values must be non-negative");
    }
    for (double l : opt.lambdas) {
        if (!(l >= 0.0)) throw UsageError("--lambda values must be non-negative");
    }
    auto wants = [&](const char* c) { return std::find(opt.checks.begin(), opt.checks.end(), c) != opt.checks.end(); };
    if ((wants("flambda") || wants("delay")) && opt.lambdas.empty()) throw UsageError("--lambda is required for flambda/delay checks");

    if (prior) {
        if (opt.lambdas.empty() || !(opt.lambdas.front() > 0.0)) throw UsageError("--regime prior needs a positive --lambda");
        if (opt.rs.front() * opt.lambdas.front() > 1.0) throw UsageError("--regime prior needs r*lambda <= 1");
    }

    sim::SimConfig base;
    base.dt = e.dt;
    base.t_max = e.t_max;
    base.seed = e.seed;
    base.n_paths = e.n_paths;
    base.workers = opt.workers;

    // One pre-change batch serves every P_inf check; discount 0 sits at index 0.
    sim::SimConfig pre_cfg = base;
    if (wants("flambda") || wants("equalizer") || wants("delay") || prior) {
        pre_cfg.discounts = {0.0};
        pre_cfg.discounts.insert(pre_cfg.discounts.end(), opt.lambdas.begin(), opt.lambdas.end());
    }
    const bool need_pre = (pre && (wants("stoptime") || wants("martingale"))) || wants("flambda") ||
                          wants("equalizer") || wants("delay") || (prior && wants("stoptime"));
    std::optional<sim::PathBatch> pre_batch;
    if (need_pre) pre_batch = sim::run_batch(pre_cfg, r_star, e.gamma);

    std::vector<CheckRow> rows;
    if (wants("stoptime")) {
        if (pre) {
            const auto est = sim::stop_time_estimate(*pre_batch);
            const bool capped_ok = static_cast<double>(pre_batch->capped()) <= sim::kMaxCapFraction * static_cast<double>(e.n_paths);
            rows.push_back({"stoptime", est, e.gamma,
                            capped_ok && std::abs(est.mean - e.gamma) <= std::max(3.0 * est.std_err, 0.05 * e.gamma)});
        } else if (post) {
            sim::SimConfig cfg = base;
            cfg.regime = sim::PostChange{};
            const auto est = sim::stop_time_estimate(sim::run_batch(cfg, r_star, e.gamma));
            rows.push_back({"stoptime[regime=post]", est, g_star,
                            std::abs(est.mean - g_star) <= std::max(3.0 * est.std_err, 0.02 * g_star)});
        } else {
            const double r = opt.rs.front(), lambda = opt.lambdas.front();
            sim::SimConfig cfg = base;
            cfg.regime = sim::RandomPrior{r, lambda};
            const auto direct = sim::conditional_delay_estimate(sim::run_batch(cfg, r_star, e.gamma));
            const auto via_pre = sim::delay_ratio_estimate(*pre_batch, r, 1);
            const double se = std::hypot(direct.std_err, via_pre.std_err);
            rows.push_back({"stoptime[regime=prior;r=" + fmt(r, 6) + ";lambda=" + fmt(lambda, 6) + "]", direct, via_pre.mean,
                            std::abs(direct.mean - via_pre.mean) <= 3.0 * se});
        }
    }
    if (wants("martingale")) {
        if (!pre) throw UsageError("the martingale check runs under --regime pre");
        const auto m = sim::martingale_estimate(*pre_batch);
        rows.push_back({"martingale", m.difference, 0.0,
                        std::abs(m.difference.mean) <= 3.0 * m.difference.std_err + m.overshoot.mean});
    }
    if (wants("flambda")) {
        const Grid grid = make_grid(e.r_min, r_star, e.gamma, e.grid_n);
        const auto f0 = assemble_f0_vector(grid, r_star, e.gamma, e.n_quad);
        const auto kernel = assemble_kernel(grid, r_star, e.gamma);
        for (std::size_t k = 0; k < opt.lambdas.size(); ++k) {
            const double target = solve_f_lambda(kernel, f0, opt.lambdas[k])[grid.r_star_index];
            const auto est = sim::f_lambda_estimate(*pre_batch, k + 1);
            rows.push_back({label("flambda", {{"lambda", opt.lambdas[k]}}), est, target,
                            std::abs(est.mean - target) <= 2.5758293035489 * est.std_err});
        }
    }
    if (wants("equalizer")) {
        for (double r : opt.rs) {
            const auto est = sim::delay_ratio_estimate(*pre_batch, r, 0);
            rows.push_back({label("equalizer", {{"r", r}}), est, g_star, std::abs(est.mean - g_star) <= 3.0 * est.std_err});
        }
    }
    if (wants("delay")) {
        for (std::size_t k = 0; k < opt.lambdas.size(); ++k) {
            for (double r : opt.rs) {
                if (r * opt.lambdas[k] > 1.0) continue;
                const auto est = sim::delay_ratio_estimate(*pre_batch, r, k + 1);
                rows.push_back({label("delay", {{"r", r}, {"lambda", opt.lambdas[k]}}), est, g_star,
                                est.mean <= g_star + 3.0 * est.std_err});
            }
        }
    }

    auto file = open_output(e.out_dir, "simulate.csv");
    CsvWriter csv(file, {"check", "mean", "std_err", "n_paths", "target", "pass"});
    bool all = true;
    for (const auto& row : rows) {
        csv.row(row.name, row.est.mean, row.est.std_err, row.est.n_paths, row.target, row.pass ? 1 : 0);
        out << (row.pass ? "PASS " : "FAIL ") << row.name << ": mean = " << fmt(row.est.mean) << " +- "
            << fmt(row.est.std_err, 3) << "  target = " << fmt(row.target) << '\n';
        all = all && row.pass;
    }
    return all ? kOk : kCheckFailed;
}

// ---- detect -------------------------------------------------------------

struct DetectOptions {
    std::filesystem::path input;
    double gamma = NAN;
    double r_star = NAN;
    double mu = std::sqrt(2.0);
    std::size_t n_quad = 501;
    std::filesystem::path out_dir;
};

int cmd_detect(const DetectOptions& opt, std::ostream& out, std::ostream& err) {
    if (!(opt.gamma > 0.0)) throw UsageError("--gamma must be positive");
    if (opt.mu == 0.0 || !std::isfinite(opt.mu)) throw UsageError("--mu must be nonzero");
    std::ifstream in(opt.input);
    if (!in) {
        err << "error: cannot open input '" << opt.input.string() << "'\n";
        return kBadInput;
    }
    std::vector<sim::Increment> records;
    try {
        records = sim::read_increments(in);
    } catch (const sim::MalformedRecordError& e) {
        err << "error: " << opt.input.string() << ": " << e.what() << '\n';
        return kBadInput;
    }
    // gamma is given in observation time; the statistic runs on the mu = sqrt(2) clock.
    const double gamma_norm = sim::time_scale(opt.mu) * opt.gamma;
    const double r_star = std::isnan(opt.r_star) ? calibrate(gamma_norm, opt.n_quad).r_star : opt.r_star;
    if (!(r_star > 0.0)) throw UsageError("--r-star must be positive");

    const auto outcome = sim::detect_stream(records, r_star, gamma_norm, opt.mu);
    auto file = open_output(opt.out_dir, "detect.csv");
    sim::write_outcome_csv(file, outcome, r_star, gamma_norm);
    if (outcome.stopped) {
        out << "alarm at t = " << fmt(outcome.stop_time) << "  R = " << fmt(outcome.r_at_stop) << "  (threshold "
            << fmt(r_star + gamma_norm) << ", " << records.size() << " records)\n";
    } else {
        out << "no alarm after t = " << fmt(outcome.stop_time) << "  final R = " << fmt(outcome.r_at_stop) << "  ("
            << records.size() << " records)\n";
    }
    return kOk;
}

void add_experiment_flags(CLI::App* sub, ExperimentConfig& e) {
    sub->add_option("--gamma", e.gamma, "Mean false-alarm period")->capture_default_str();
    sub->add_option("--n-quad", e.n_quad, "Quadrature points for f0")->capture_default_str();
}

}  // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw UsageError(what); };
    if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("--gamma must be positive");
    if (n_quad < 3) fail("--n-quad must be at least 3");
    if (grid_n < 3) fail("--grid-n must be at least 3");
    if (!(r_min > 0.0)) fail("--r-min must be positive");
    if (lambda_count == 0) fail("--lambda-count must be positive");
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) fail("--lambda-max must be positive (empty sweep)");
    if (!(dt > 0.0)) fail("--dt must be positive");
    if (n_paths == 0) fail("--n-paths must be positive");
    if (t_max < 0.0) fail("--t-max must be non-negative");
}

ExperimentConfig ExperimentConfig::paper_fig1() {
    ExperimentConfig e;
    e.gamma = 5.0;
    e.n_quad = 501;
    e.grid_n = 2001;
    e.r_min = 2e-3;
    e.lambda_count = 100;
    e.lambda_max = 10.0;
    return e;
}

ExperimentConfig ExperimentConfig::paper_fig2() {
    ExperimentConfig e = paper_fig1();
    e.gamma = 20.0;
    e.n_quad = 1001;
    e.grid_n = 4001;
    e.lambda_count = 200;
    return e;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"SR-r change detection: calibration, conjecture verification, simulation and detection", "srr"};
    app.require_subcommand(1);

    const auto out_dir = default_out_dir();

    CalibrateOptions cal;
    cal.exp.out_dir = out_dir;
    auto* c = app.add_subcommand("calibrate", "Solve for the starting point r*");
    add_experiment_flags(c, cal.exp);
    c->add_option("--tol", cal.tol, "Bisection tolerance on |f0(r*)|")->capture_default_str();
    c->add_option("--out", cal.exp.out_dir, "Output directory");
    c->add_flag("--paper-fig1", cal.fig1, "gamma = 5, 501 quadrature points");
    c->add_flag("--paper-fig2", cal.fig2, "gamma = 20, 1001 quadrature points");

    VerifyOptions ver;
    ver.exp.out_dir = out_dir;
    auto* v = app.add_subcommand("verify", "Sweep f_lambda(r*) over lambda and check its sign");
    add_experiment_flags(v, ver.exp);
    v->add_option("--grid-n", ver.exp.grid_n, "Grid nodes on [r_min, r*+gamma]")->capture_default_str();
    v->add_option("--r-min", ver.exp.r_min, "Lower cutoff of the grid")->capture_default_str();
    v->add_option("--lambda-count", ver.exp.lambda_count, "Number of lambda samples")->capture_default_str();
    v->add_option("--lambda-max", ver.exp.lambda_max, "Sweep covers (0, lambda-max]")->capture_default_str();
    v->add_option("--scan-points", ver.scan_points, "Points of the f0(r) calibration curve")->capture_default_str();
    v->add_flag("--include-zero", ver.include_zero, "Prepend lambda = 0 to the sweep");
    v->add_option("--out", ver.exp.out_dir, "Output directory");
    v->add_flag("--paper-fig1", ver.fig1, "gamma = 5, 2001 nodes, 100 lambdas");
    v->add_flag("--paper-fig2", ver.fig2, "gamma = 20, 4001 nodes, 200 lambdas");

    SimulateOptions simo;
    simo.exp.out_dir = out_dir;
    auto* s = app.add_subcommand("simulate", "Monte Carlo checks of the SR-r procedure");
    add_experiment_flags(s, simo.exp);
    s->add_option("--r-star", simo.r_star, "Starting point (default: calibrated)");
    s->add_option("--regime", simo.regime, "pre | post | prior")->capture_default_str();
    s->add_option("--r", simo.rs, "Prior atom parameter r (repeatable)");
    s->add_option("--lambda", simo.lambdas, "Discount / prior rate (repeatable)");
    s->add_option("--checks", simo.checks, "stoptime | martingale | flambda | equalizer | delay (repeatable)");
    s->add_option("--n-paths", simo.exp.n_paths, "Paths per batch")->capture_default_str();
    s->add_option("--dt", simo.exp.dt, "Time step")->capture_default_str();
    s->add_option("--seed", simo.exp.seed, "RNG seed")->capture_default_str();
    s->add_option("--t-max", simo.exp.t_max, "Horizon cap (0: 100 gamma)")->capture_default_str();
    s->add_option("--grid-n", simo.exp.grid_n, "Grid nodes for the flambda target")->capture_default_str();
    s->add_option("--r-min", simo.exp.r_min, "Grid cutoff for the flambda target")->capture_default_str();
    s->add_option("--workers", simo.workers, "Worker threads (0: all cores)");
    s->add_option("--out", simo.exp.out_dir, "Output directory");

    DetectOptions det;
    det.out_dir = out_dir;
    auto* d = app.add_subcommand("detect", "Run the detector over an increment stream");
    d->add_option("--input", det.input, "CSV with header t,dxi or dt,dxi")->required();
    d->add_option("--gamma", det.gamma, "Mean false-alarm period")->required();
    d->add_option("--r-star", det.r_star, "Starting point (default: calibrated from gamma)");
    d->add_option("--mu", det.mu, "Post-change drift")->capture_default_str();
    d->add_option("--n-quad", det.n_quad, "Quadrature points when calibrating")->capture_default_str();
    d->add_option("--out", det.out_dir, "Output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (*c) return cmd_calibrate(cal, out);
        if (*v) return cmd_verify(ver, out);
        if (*s) return cmd_simulate(simo, out);
        if (*d) return cmd_detect(det, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const BracketError& e) {
        err << "error: calibration failed: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}

}  // namespace srr::cli
