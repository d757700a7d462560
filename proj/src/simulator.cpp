#include "srr/simulator.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <thread>

#include "srr/rng.hpp"
#include "srr/specfun.hpp"

namespace srr::sim {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Samples tau^+ for the path (the prior draws come first in the path's stream).
double draw_change_time(const Regime& regime, Philox4x32& rng) {
    return std::visit(Overloaded{
                          [](const PreChange&) { return static_cast<double>(INFINITY); },
                          [](const PostChange&) { return 0.0; },
                          [](const ChangeAt& c) { return std::max(c.tau, 0.0); },
                          [&rng](const RandomPrior& p) {
                              std::uniform_real_distribution<double> unif(0.0, 1.0);
                              if (unif(rng) < p.r * p.lambda) return 0.0;
                              std::exponential_distribution<double> expo(p.lambda);
                              return expo(rng);
                          },
                      },
                      regime);
}

}  // namespace

void SimConfig::validate(double gamma) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(horizon(gamma) > dt)) throw std::invalid_argument("t_max must exceed dt");
    if (n_paths == 0) throw std::invalid_argument("n_paths must be positive");
    if (drift_mu == 0.0 || !std::isfinite(drift_mu)) throw std::invalid_argument("drift_mu must be nonzero");
    for (double l : discounts) {
        if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("discount rates must be non-negative");
    }
    if (const auto* c = std::get_if<ChangeAt>(&regime); c && !(c->tau >= 0.0)) {
        throw std::invalid_argument("change time must be non-negative");
    }
    if (const auto* p = std::get_if<RandomPrior>(&regime)) {
        if (!(p->lambda > 0.0)) throw std::invalid_argument("random prior needs lambda > 0");
        if (!(p->r >= 0.0) || p->r * p->lambda > 1.0) throw std::invalid_argument("random prior needs 0 <= r*lambda <= 1");
    }
}

double log_likelihood_increment(double dxi, double dt, double drift_mu) {
    const double m2dt = drift_mu * drift_mu * dt;
    const double compensator = 0.5 * std::log1p(m2dt) - 0.5 * m2dt / (1.0 + m2dt);
    return drift_mu * dxi - 0.5 * drift_mu * drift_mu * dxi * dxi + compensator;
}

double step_statistic(double R, double du, double dt) {
    const double growth = std::exp(du);
    return growth * R + 0.5 * dt * (growth + 1.0);
}

GTable::GTable(double r_star, double gamma, std::size_t intervals)
    : r_star_(r_star), threshold_(r_star + gamma), h_(threshold_ / static_cast<double>(intervals)), inv_h_(1.0 / h_) {
    if (!(threshold_ > 0.0) || intervals < 2) throw std::invalid_argument("GTable needs r_star + gamma > 0");
    value_.resize(intervals + 1);
    slope_.resize(intervals + 1);
    const double base = specfun::e1_scaled(1.0 / threshold_);
    value_[0] = base;
    slope_[0] = -1.0;
    for (std::size_t i = 1; i <= intervals; ++i) {
        const double R = static_cast<double>(i) * h_;
        const double x = 1.0 / R;
        const double e = specfun::e1_scaled(x);
        value_[i] = base - e;
        slope_[i] = x * x * e - x;
    }
    value_[intervals] = 0.0;
}

double GTable::exact(double R) const { return specfun::g(R, r_star_, threshold_ - r_star_); }

PathOutcome run_path(const SimConfig& config, double r_star, double gamma, std::uint64_t path_index) {
    const bool track_g = config.accumulate_g || !config.discounts.empty();
    // A two-interval table is cheap to build and never consulted when g is not tracked.
    return run_path(config, r_star, gamma, path_index, GTable(r_star, gamma, track_g ? 4096 : 2));
}

PathOutcome run_path(const SimConfig& config, double r_star, double gamma, std::uint64_t path_index,
                     const GTable& g_table) {
    Philox4x32 rng(config.seed, path_index);
    std::normal_distribution<double> normal(0.0, 1.0);

    const double threshold = r_star + gamma;
    const double dt = config.dt;
    const double ds = time_scale(config.drift_mu) * dt;
    const double sqrt_dt = std::sqrt(dt);
    const double qv = config.noiseless ? 0.0 : dt;
    const double mu = config.drift_mu;
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(config.horizon(gamma) / dt - 1e-9));
    const bool track_g = config.accumulate_g || !config.discounts.empty();

    PathOutcome out;
    out.change_time = draw_change_time(config.regime, rng);
    const std::size_t n_disc = config.discounts.size();
    out.discounted_g.assign(n_disc, 0.0);
    out.discounted_time.assign(n_disc, 0.0);
    std::vector<double> weight(n_disc, 1.0), decay(n_disc);
    for (std::size_t k = 0; k < n_disc; ++k) decay[k] = std::exp(-config.discounts[k] * dt);

    const bool bridge = config.bridge_correction && !config.noiseless;
    const double log_a = std::log(threshold);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double R = r_star;
    double log_r = std::log(r_star);
    std::uint64_t step = 0;
    while (true) {
        const double t = static_cast<double>(step) * dt;
        out.integral_r += R * dt;
        if (track_g) {
            const double gv = g_table(R);
            out.integral_g += gv * dt;
            for (std::size_t k = 0; k < n_disc; ++k) {
                out.discounted_g[k] += weight[k] * gv * dt;
                out.discounted_time[k] += weight[k] * dt;
                weight[k] *= decay[k];
            }
        }

        const double noise = config.noiseless ? 0.0 : sqrt_dt * normal(rng);
        const double dxi = (t >= out.change_time ? mu * dt : 0.0) + noise;
        R = step_statistic(R, model_log_likelihood_increment(dxi, qv, mu), ds);
        ++step;

        if (R >= threshold) {
            out.stopped = true;
            break;
        }
        if (bridge) {
            // log R has variance 2 ds per step
            const double log_next = std::log(R);
            const double gap = (log_a - log_r) * (log_a - log_next);
            log_r = log_next;
            if (gap < 40.0 * ds && unif(rng) < std::exp(-gap / ds)) {
                out.stopped = true;
                out.bridge_crossing = true;
                break;
            }
        }
        if (step >= max_steps) break;
    }
    out.stop_time = static_cast<double>(step) * dt;
    out.r_at_stop = R;
    out.alarm_after_change = out.stop_time > out.change_time;
    out.delay = out.alarm_after_change ? out.stop_time - out.change_time : 0.0;
    return out;
}

std::size_t PathBatch::capped() const {
    return static_cast<std::size_t>(
        std::count_if(paths.begin(), paths.end(), [](const PathOutcome& p) { return !p.stopped; }));
}

PathBatch run_batch(const SimConfig& config, double r_star, double gamma) {
    config.validate(gamma);
    if (!(r_star >= 0.0)) throw std::invalid_argument("r_star must be non-negative");

    PathBatch batch{config, r_star, gamma, std::vector<PathOutcome>(config.n_paths)};
    unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.n_paths));

    const bool track_g = config.accumulate_g || !config.discounts.empty();
    const GTable g_table(r_star, gamma, track_g ? 4096 : 2);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) batch.paths[i] = run_path(config, r_star, gamma, i, g_table);
    };
    if (workers <= 1) {
        work(0, config.n_paths);
        return batch;
    }
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (config.n_paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(config.n_paths, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
    }
    return batch;
}

McEstimate estimate_mean(std::span<const double> values, std::uint64_t seed) {
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("estimate_mean: no samples");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n)), n, seed};
}

McEstimate estimate_ratio(std::span<const double> numer, std::span<const double> denom, std::uint64_t seed) {
    if (numer.size() != denom.size()) throw std::length_error("estimate_ratio: size mismatch");
    const McEstimate a = estimate_mean(numer, seed);
    const McEstimate b = estimate_mean(denom, seed);
    if (b.mean == 0.0) throw std::domain_error("estimate_ratio: zero denominator");
    const double ratio = a.mean / b.mean;
    std::vector<double> linear(numer.size());
    for (std::size_t i = 0; i < numer.size(); ++i) linear[i] = numer[i] - ratio * denom[i];
    const McEstimate lin = estimate_mean(linear, seed);
    return {ratio, lin.std_err / std::abs(b.mean), numer.size(), seed};
}

McEstimate stop_time_estimate(const PathBatch& batch) {
    std::vector<double> v;
    v.reserve(batch.paths.size());
    for (const auto& p : batch.paths) v.push_back(p.stop_time);
    return estimate_mean(v, batch.config.seed);
}

MartingaleCheck martingale_estimate(const PathBatch& batch) {
    const double c = time_scale(batch.config.drift_mu);
    const double threshold = batch.r_star + batch.gamma;
    std::vector<double> r_stop, shifted_time, diff, overshoot;
    for (const auto& p : batch.paths) {
        r_stop.push_back(p.r_at_stop);
        shifted_time.push_back(batch.r_star + c * p.stop_time);
        diff.push_back(p.r_at_stop - batch.r_star - c * p.stop_time);
        overshoot.push_back(p.stopped ? std::max(p.r_at_stop - threshold, 0.0) : 0.0);
    }
    const auto seed = batch.config.seed;
    return {estimate_mean(r_stop, seed), estimate_mean(shifted_time, seed), estimate_mean(diff, seed),
            estimate_mean(overshoot, seed)};
}

namespace {

void check_discount(const PathBatch& batch, std::size_t k) {
    if (k >= batch.config.discounts.size()) throw std::out_of_range("discount index out of range");
}

}  // namespace

McEstimate f_lambda_estimate(const PathBatch& batch, std::size_t k) {
    check_discount(batch, k);
    const double g_star = specfun::g(batch.r_star, batch.r_star, batch.gamma);
    std::vector<double> v;
    v.reserve(batch.paths.size());
    for (const auto& p : batch.paths) v.push_back(p.discounted_g[k] - g_star * p.discounted_time[k]);
    return estimate_mean(v, batch.config.seed);
}

McEstimate delay_ratio_estimate(const PathBatch& batch, double r, std::size_t k) {
    check_discount(batch, k);
    const double lambda = batch.config.discounts[k];
    if (!(r >= 0.0) || r * lambda > 1.0) throw std::invalid_argument("delay ratio needs r >= 0 and r*lambda <= 1");
    const double g_star = specfun::g(batch.r_star, batch.r_star, batch.gamma);
    const double w = 1.0 - lambda * r;
    std::vector<double> numer, denom;
    for (const auto& p : batch.paths) {
        numer.push_back(r * g_star + w * p.discounted_g[k]);
        denom.push_back(r + w * p.discounted_time[k]);
    }
    return estimate_ratio(numer, denom, batch.config.seed);
}

McEstimate delay_ratio_from_statistic(const PathBatch& batch) {
    std::vector<double> numer, denom;
    for (const auto& p : batch.paths) {
        numer.push_back(p.integral_r);
        denom.push_back(batch.r_star + p.stop_time);
    }
    return estimate_ratio(numer, denom, batch.config.seed);
}

McEstimate conditional_delay_estimate(const PathBatch& batch) {
    std::vector<double> numer, denom;
    for (const auto& p : batch.paths) {
        numer.push_back(p.delay);
        denom.push_back(p.alarm_after_change ? 1.0 : 0.0);
    }
    return estimate_ratio(numer, denom, batch.config.seed);
}

namespace {

void require_pre_change(const SimConfig& config, const char* what) {
    if (!std::holds_alternative<PreChange>(config.regime)) {
        throw std::invalid_argument(std::string(what) + " requires the pre-change regime");
    }
}

}  // namespace

McEstimate mc_mean_stop_time(const SimConfig& config, double r_star, double gamma) {
    require_pre_change(config, "mc_mean_stop_time");
    const PathBatch batch = run_batch(config, r_star, gamma);
    const std::size_t capped = batch.capped();
    if (static_cast<double>(capped) > kMaxCapFraction * static_cast<double>(batch.paths.size())) {
        throw HorizonCapError(std::to_string(capped) + " of " + std::to_string(batch.paths.size()) +
                              " paths reached the horizon cap");
    }
    return stop_time_estimate(batch);
}

MartingaleCheck mc_martingale_check(const SimConfig& config, double r_star, double gamma) {
    require_pre_change(config, "mc_martingale_check");
    return martingale_estimate(run_batch(config, r_star, gamma));
}

McEstimate mc_f_lambda(double r_star, double gamma, double lambda, const SimConfig& config) {
    require_pre_change(config, "mc_f_lambda");
    SimConfig cfg = config;
    cfg.discounts = {lambda};
    return f_lambda_estimate(run_batch(cfg, r_star, gamma), 0);
}

McEstimate mc_delay_ratio(double r, double lambda, double r_star, double gamma, const SimConfig& config) {
    if (!(lambda >= 0.0) || !(r >= 0.0) || r * lambda > 1.0) {
        throw std::invalid_argument("mc_delay_ratio needs lambda >= 0, r >= 0 and r*lambda <= 1");
    }
    require_pre_change(config, "mc_delay_ratio");
    SimConfig cfg = config;
    cfg.discounts = {lambda};
    return delay_ratio_estimate(run_batch(cfg, r_star, gamma), r, 0);
}

}  // namespace srr::sim
