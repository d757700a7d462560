#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace srr::sim {

/// No change ever occurs (P_inf).
struct PreChange {};
/// Drift present from time zero (P_0).
struct PostChange {};
/// Deterministic change time.
struct ChangeAt {
    double tau;
};
/// Zero-modified exponential prior: P(tau <= 0) = r*lambda, otherwise tau ~ Exp(lambda).
/// lambda must be positive; the lambda = 0 limit has no proper prior to sample from.
struct RandomPrior {
    double r;
    double lambda;
};

using Regime = std::variant<PreChange, PostChange, ChangeAt, RandomPrior>;

struct SimConfig {
    double dt = 1e-3;
    double t_max = 0.0;  // horizon cap; 0 selects 100 * gamma
    std::uint64_t seed = 20240601;
    std::size_t n_paths = 100000;
    double drift_mu = std::sqrt(2.0);
    Regime regime = PreChange{};
    /// Discount rates lambda for the per-path accumulators int e^{-lambda t} g(R_t) dt and
    /// int e^{-lambda t} dt. Non-empty implies accumulate_g.
    std::vector<double> discounts;
    bool accumulate_g = false;
    /// Zero Brownian increments; the statistic then follows its drift alone.
    bool noiseless = false;
    /// Between grid points, stop with the probability that a Brownian bridge in log R joining
    /// the two endpoints touches log A. Removes the O(sqrt dt) bias of grid-only monitoring.
    bool bridge_correction = true;
    unsigned workers = 0;  // 0 selects std::thread::hardware_concurrency()

    double horizon(double gamma) const { return t_max > 0.0 ? t_max : 100.0 * gamma; }
    /// Throws std::invalid_argument on inconsistent settings.
    void validate(double gamma) const;
};

struct PathOutcome {
    double stop_time = 0.0;  // first grid time with R >= A, or the horizon when not stopped
    bool stopped = false;
    double r_at_stop = 0.0;  // R at stop_time; below A after a bridge crossing
    bool bridge_crossing = false;  // stopped by the bridge test with R below A at the grid time
    double integral_r = 0.0;  // int_0^T R_t dt
    double integral_g = 0.0;  // int_0^T g(R_t) dt
    std::vector<double> discounted_g;     // int_0^T e^{-lambda t} g(R_t) dt, one per discount
    std::vector<double> discounted_time;  // int_0^T e^{-lambda t} dt, one per discount
    double change_time = INFINITY;  // tau^+ for this path
    double delay = 0.0;             // (T - tau^+)^+
    bool alarm_after_change = false;  // T > tau
};

/// Time-change factor mu^2/2 mapping user time onto the mu = sqrt(2) normalization.
inline double time_scale(double drift_mu) { return 0.5 * drift_mu * drift_mu; }

/// Log-likelihood-ratio increment of the simulated model, du = mu dxi - (mu^2/2) qv, where qv is
/// the quadratic variation of the noise over the step: dt for Brownian paths, 0 for noiseless
/// ones. At mu = sqrt(2) in normalized time this is du = sqrt(2) dxi - dt.
inline double model_log_likelihood_increment(double dxi, double qv, double drift_mu = std::sqrt(2.0)) {
    return drift_mu * dxi - 0.5 * drift_mu * drift_mu * qv;
}

/// Log-likelihood-ratio increment for an observed increment dxi over dt whose noise level is
/// not known in advance:
///   du = mu dxi - (mu^2/2) dxi^2 + c(dt),
/// i.e. the model increment with the quadratic variation replaced by the realized dxi^2. The
/// constant c(dt) = ln(1 + mu^2 dt)/2 - (mu^2 dt/2)/(1 + mu^2 dt) makes E_inf[e^du] = 1 exactly
/// for Brownian data, and a flat record (dxi = 0) leaves u essentially unchanged.
double log_likelihood_increment(double dxi, double dt, double drift_mu = std::sqrt(2.0));

/// One step of R_t = e^{u_t}(r + int_0^t e^{-u_s} ds) given du over a step of normalized
/// length dt: R' = e^du R + dt (e^du + 1)/2. Exact in u, trapezoidal in the additive term.
double step_statistic(double R, double du, double dt);

/// Piecewise cubic Hermite table of g(R) = e1s(1/A) - e1s(1/R) on [0, A], built from exact
/// values and the analytic slope g'(R) = x^2 e1s(x) - x, x = 1/R. Absolute error is below 1e-10
/// for the default size; arguments above A fall back to the exact function.
class GTable {
public:
    GTable(double r_star, double gamma, std::size_t intervals = 4096);
    double operator()(double R) const {
        if (R >= threshold_) return exact(R);
        const double s = R * inv_h_;
        const auto i = static_cast<std::size_t>(s);
        const double u = s - static_cast<double>(i);
        const double v = 1.0 - u;
        return v * v * ((1.0 + 2.0 * u) * value_[i] + u * h_ * slope_[i]) +
               u * u * ((3.0 - 2.0 * u) * value_[i + 1] - v * h_ * slope_[i + 1]);
    }

private:
    double exact(double R) const;

    double r_star_, threshold_, h_, inv_h_;
    std::vector<double> value_, slope_;
};

/// Simulates a single path; `path_index` selects its random stream.
PathOutcome run_path(const SimConfig& config, double r_star, double gamma, std::uint64_t path_index = 0);
/// Same, reusing a prebuilt table of g for the accumulators.
PathOutcome run_path(const SimConfig& config, double r_star, double gamma, std::uint64_t path_index, const GTable& g);

struct PathBatch {
    SimConfig config;
    double r_star = 0.0;
    double gamma = 0.0;
    std::vector<PathOutcome> paths;

    std::size_t capped() const;
};

/// Simulates config.n_paths paths across worker threads. Path i always uses stream i,
/// so the batch is bit-identical for any worker count.
PathBatch run_batch(const SimConfig& config, double r_star, double gamma);

struct McEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

McEstimate estimate_mean(std::span<const double> values, std::uint64_t seed);
/// Ratio of means with a delta-method standard error.
McEstimate estimate_ratio(std::span<const double> numer, std::span<const double> denom, std::uint64_t seed);

class HorizonCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximum fraction of pre-change paths allowed to reach the horizon cap.
inline constexpr double kMaxCapFraction = 1e-3;

struct MartingaleCheck {
    McEstimate r_at_stop;          // E_inf[R_T]
    McEstimate r_star_plus_time;   // r* + E_inf[T] (time in normalized units)
    McEstimate difference;         // paired per-path R_T - r* - T
    McEstimate overshoot;          // (R_T - A)^+ on stopped paths
};

// Estimators over an already simulated batch.
McEstimate stop_time_estimate(const PathBatch& batch);
MartingaleCheck martingale_estimate(const PathBatch& batch);
/// int_0^T e^{-lambda t}(g(R_t) - g(r*)) dt for the discount at `discount_index`.
McEstimate f_lambda_estimate(const PathBatch& batch, std::size_t discount_index);
/// [r g(r*) + (1 - lambda r) E int e^{-lambda t} g] / [r + (1 - lambda r) E int e^{-lambda t} dt].
McEstimate delay_ratio_estimate(const PathBatch& batch, double r, std::size_t discount_index);
/// E int_0^T R_t dt / (r* + E T).
McEstimate delay_ratio_from_statistic(const PathBatch& batch);
/// E[T - tau^+ | T > tau] from paths with sampled change times.
McEstimate conditional_delay_estimate(const PathBatch& batch);

// Simulate-and-estimate entry points.

/// Pre-change mean stopping time; throws HorizonCapError when more than
/// kMaxCapFraction of paths hit the horizon.
McEstimate mc_mean_stop_time(const SimConfig& config, double r_star, double gamma);
MartingaleCheck mc_martingale_check(const SimConfig& config, double r_star, double gamma);
McEstimate mc_f_lambda(double r_star, double gamma, double lambda, const SimConfig& config);
/// Throws std::invalid_argument when r * lambda > 1 or either is negative.
McEstimate mc_delay_ratio(double r, double lambda, double r_star, double gamma, const SimConfig& config);

}  // namespace srr::sim
