// Acceptance suite: one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "srr/calibration.hpp"
#include "srr/fredholm.hpp"
#include "srr/simulator.hpp"
#include "srr/specfun.hpp"

using namespace srr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& what) {
    std::printf("%s [%2d] %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Tolerances.
constexpr double kRootTol = 5e-3;
constexpr double kCalibrationSeconds = 5.0;
constexpr double kAsymptoticTarget = 2.299812;
constexpr double kAsymptoticTol = 1e-5;
constexpr double kAsymptoticSeconds = 1.0;
constexpr double kSweep1Seconds = 120.0;
constexpr double kSweep2Seconds = 600.0;
constexpr double kOdeRatioLo = 3.0, kOdeRatioHi = 5.0;
constexpr double kStopTimeRelTol = 0.05;
constexpr double kPostChangeRelTol = 0.02;
constexpr double kZ99 = 2.5758293035489004;
constexpr double kE1RelTol = 1e-12;
constexpr double kEiRelTol = 1e-10, kEiAbsTol = 1e-12;

// Settings.
constexpr double kRMin = 2e-3;
constexpr double kDt = 1e-3;
constexpr std::size_t kPaths = 100000;
constexpr std::uint64_t kSeed = 20240601;

}  // namespace

int main() {
    std::printf("srr acceptance suite: dt = %g, %zu paths per Monte Carlo batch, seed %llu\n", kDt, kPaths,
                static_cast<unsigned long long>(kSeed));

    // 1, 2: calibration
    auto t0 = Clock::now();
    const CalibrationResult c5 = calibrate(5.0, 501, 1e-6);
    double secs = seconds_since(t0);
    report(1, std::abs(c5.r_star - 1.0707) <= kRootTol && secs < kCalibrationSeconds,
           fmt("calibration gamma=5, 501 points: r* = %.7f (target 1.0707 +- %g), %.3f s (limit %g s)", c5.r_star,
               kRootTol, secs, kCalibrationSeconds));

    t0 = Clock::now();
    const CalibrationResult c20 = calibrate(20.0, 1001, 1e-6);
    secs = seconds_since(t0);
    report(2, std::abs(c20.r_star - 1.5240) <= kRootTol && secs < kCalibrationSeconds,
           fmt("calibration gamma=20, 1001 points: r* = %.7f (target 1.5240 +- %g), %.3f s (limit %g s)", c20.r_star,
               kRootTol, secs, kCalibrationSeconds));

    // 3: asymptotic root
    t0 = Clock::now();
    const double r_inf = asymptotic_r_star(1e-10);
    secs = seconds_since(t0);
    report(3, std::abs(r_inf - kAsymptoticTarget) <= kAsymptoticTol && secs < kAsymptoticSeconds,
           fmt("asymptotic root: %.8f (target %.6f +- %g), %.4f s (limit %g s)", r_inf, kAsymptoticTarget,
               kAsymptoticTol, secs, kAsymptoticSeconds));

    // 4, 5: conjecture sweeps
    const auto sweep_line = [](const LambdaSweep& s, std::size_t count, double elapsed, double limit) {
        double worst = -INFINITY;
        std::size_t bad = 0;
        for (const auto& row : s.rows) {
            if (!row.f_lambda_at_rstar) {
                ++bad;
                continue;
            }
            worst = std::max(worst, *row.f_lambda_at_rstar);
            if (!(*row.f_lambda_at_rstar < 0.0)) ++bad;
        }
        return std::make_pair(s.conjecture_holds() && s.rows.size() == count && elapsed < limit,
                              fmt("%zu nodes, %zu lambdas in (0, 10]: max f_lambda(r*) = %.6g, %zu non-negative, "
                                  "%.1f s (limit %g s)",
                                  s.grid_size, s.rows.size(), worst, bad, elapsed, limit));
    };
    t0 = Clock::now();
    const Grid grid5 = make_grid(kRMin, c5.r_star, 5.0, 2001);
    const LambdaSweep s5 = sweep_lambda(grid5, c5.r_star, 5.0, canonical_lambdas(100, 10.0), 501);
    auto [ok4, line4] = sweep_line(s5, 100, seconds_since(t0), kSweep1Seconds);
    report(4, ok4, "conjecture sweep gamma=5: " + line4);

    t0 = Clock::now();
    const Grid grid20 = make_grid(kRMin, c20.r_star, 20.0, 4001);
    const LambdaSweep s20 = sweep_lambda(grid20, c20.r_star, 20.0, canonical_lambdas(200, 10.0), 1001);
    auto [ok5, line5] = sweep_line(s20, 200, seconds_since(t0), kSweep2Seconds);
    report(5, ok5, "conjecture sweep gamma=20: " + line5);

    // 6: ODE residual under refinement, lambda = 1
    {
        const auto residual_on = [&](std::size_t n) {
            const Grid g = make_grid(kRMin, c5.r_star, 5.0, n);
            const auto f0 = assemble_f0_vector(g, c5.r_star, 5.0, 501);
            const auto f = solve_f_lambda(assemble_kernel(g, c5.r_star, 5.0), f0, 1.0);
            return ode_residual(f, g, 1.0, c5.r_star, 5.0);
        };
        const OdeResidual coarse = residual_on(2001);
        const OdeResidual fine = residual_on(4001);
        const double ratio = coarse.max_residual / fine.max_residual;
        report(6, ratio >= kOdeRatioLo && ratio <= kOdeRatioHi && !coarse.too_coarse && !fine.too_coarse,
               fmt("ODE residual lambda=1, gamma=5: %.3e (2001 nodes) -> %.3e (4001 nodes), ratio %.3f (range [%g, %g])",
                   coarse.max_residual, fine.max_residual, ratio, kOdeRatioLo, kOdeRatioHi));
    }

    // Monte Carlo batches
    const std::vector<double> oracle_lambdas{0.5, 2.0, 8.0};
    sim::SimConfig cfg;
    cfg.dt = kDt;
    cfg.n_paths = kPaths;
    cfg.seed = kSeed;
    cfg.discounts = {0.0};
    cfg.discounts.insert(cfg.discounts.end(), oracle_lambdas.begin(), oracle_lambdas.end());
    t0 = Clock::now();
    const sim::PathBatch pre5 = sim::run_batch(cfg, c5.r_star, 5.0);
    const double pre5_secs = seconds_since(t0);

    sim::SimConfig cfg20 = cfg;
    cfg20.discounts.clear();
    t0 = Clock::now();
    const sim::PathBatch pre20 = sim::run_batch(cfg20, c20.r_star, 20.0);
    const double pre20_secs = seconds_since(t0);

    sim::SimConfig post_cfg = cfg20;
    post_cfg.regime = sim::PostChange{};
    const sim::PathBatch post5 = sim::run_batch(post_cfg, c5.r_star, 5.0);

    // 7: false-alarm identity
    {
        bool ok = true;
        std::string detail;
        for (const auto* b : {&pre5, &pre20}) {
            const auto est = sim::stop_time_estimate(*b);
            const double tol = std::max(3.0 * est.std_err, kStopTimeRelTol * b->gamma);
            const double cap_frac = static_cast<double>(b->capped()) / static_cast<double>(b->paths.size());
            ok = ok && std::abs(est.mean - b->gamma) <= tol && cap_frac < sim::kMaxCapFraction;
            detail += fmt("gamma=%g: E[T] = %.4f +- %.4f (tol %.4f, capped %.2g%%); ", b->gamma, est.mean, est.std_err,
                          tol, 100 * cap_frac);
        }
        report(7, ok, "false-alarm identity E_inf[T] = gamma: " + detail +
                          fmt("%.0f s + %.0f s simulated", pre5_secs, pre20_secs));
    }

    // 8: martingale identity
    {
        const auto m = sim::martingale_estimate(pre5);
        const double tol = 3.0 * m.difference.std_err + m.overshoot.mean;
        report(8, std::abs(m.difference.mean) <= tol,
               fmt("martingale gamma=5: E[R_T] - r* - E[T] = %.5f +- %.5f, mean overshoot %.5f (tol %.5f)",
                   m.difference.mean, m.difference.std_err, m.overshoot.mean, tol));
    }

    // 9: equalizer and post-change delay
    {
        const double g_star = specfun::g(c5.r_star, c5.r_star, 5.0);
        const std::vector<double> rs{0.0, c5.r_star, 3.0};
        std::vector<sim::McEstimate> d;
        bool ok = true;
        std::string detail;
        for (double r : rs) {
            d.push_back(sim::delay_ratio_estimate(pre5, r, 0));
            ok = ok && std::abs(d.back().mean - g_star) <= 3.0 * d.back().std_err;
            detail += fmt("r=%.4g: %.5f +- %.5f; ", r, d.back().mean, d.back().std_err);
        }
        for (std::size_t i = 0; i < d.size(); ++i) {
            for (std::size_t j = i + 1; j < d.size(); ++j) {
                ok = ok && std::abs(d[i].mean - d[j].mean) <= 3.0 * std::hypot(d[i].std_err, d[j].std_err);
            }
        }
        const auto post = sim::stop_time_estimate(post5);
        const double rel = std::abs(post.mean - g_star) / g_star;
        ok = ok && rel <= kPostChangeRelTol;
        report(9, ok, fmt("equalizer g(r*) = %.5f: ", g_star) + detail +
                          fmt("E_0[T] = %.5f +- %.5f (rel. err %.3f%%, tol %g%%)", post.mean, post.std_err, 100 * rel,
                              100 * kPostChangeRelTol));
    }

    // 10: Fredholm solution inside the Monte Carlo 99% interval
    {
        const auto f0 = assemble_f0_vector(grid5, c5.r_star, 5.0, 501);
        const KernelMatrix kernel = assemble_kernel(grid5, c5.r_star, 5.0);
        bool ok = true;
        std::string detail;
        for (std::size_t k = 0; k < oracle_lambdas.size(); ++k) {
            const double target = solve_f_lambda(kernel, f0, oracle_lambdas[k])[grid5.r_star_index];
            const auto est = sim::f_lambda_estimate(pre5, k + 1);
            const bool in = std::abs(est.mean - target) <= kZ99 * est.std_err;
            ok = ok && in;
            if (k) detail += "; ";
            detail += fmt("lambda=%g: linear system %.6f, MC %.6f +- %.6f (%.2f se)", oracle_lambdas[k], target,
                          est.mean, est.std_err, std::abs(est.mean - target) / est.std_err);
        }
        report(10, ok, "oracle equivalence, 99% interval: " + detail);
    }

    // 11: special functions on 10^4 log-spaced points
    {
        const int n = 10000;
        const double lo = 1e-8, hi = 1e3;
        double e1_err = 0.0, ei_rel = 0.0, ei_abs = 0.0;
        int bracket_fail = 0, monotone_fail = 0;
        double prev = INFINITY;
        for (int i = 0; i < n; ++i) {
            const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
            if (x <= 2.0) {
                e1_err = std::max(e1_err, std::abs(specfun::e1(x) / static_cast<double>(oracle::e1_series(x)) - 1.0));
            } else {
                e1_err = std::max(e1_err, std::abs(specfun::e1_scaled(x) /
                                                       static_cast<double>(oracle::e1_scaled_fraction(x)) - 1.0));
            }
            const double ei_ref = static_cast<double>(oracle::ei_scaled_series(x));
            if (x >= 1.0) {
                ei_rel = std::max(ei_rel, std::abs(specfun::ei_scaled(x) / ei_ref - 1.0));
            } else {
                ei_abs = std::max(ei_abs, std::abs(specfun::ei_scaled(x) - ei_ref));
            }
            const double v = specfun::e1_scaled(x);
            if (x >= 1e-3 && !(x / (x + 1.0) < x * v && x * v < 1.0)) ++bracket_fail;
            if (!(v < prev)) ++monotone_fail;
            prev = v;
        }
        report(11, e1_err <= kE1RelTol && ei_rel <= kEiRelTol && ei_abs <= kEiAbsTol && bracket_fail == 0 &&
                       monotone_fail == 0,
               fmt("special functions, %d points on [%g, %g]: E1 rel err %.2e (tol %g), e^-x Ei rel err %.2e (tol %g, "
                   "x >= 1), abs err %.2e (tol %g, x < 1), bracketing failures %d, monotonicity failures %d",
                   n, lo, hi, e1_err, kE1RelTol, ei_rel, kEiRelTol, ei_abs, kEiAbsTol, bracket_fail, monotone_fail));
    }

    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
