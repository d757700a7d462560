#include "srr/calibration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "srr/quadrature.hpp"
#include "srr/specfun.hpp"

namespace srr {
namespace {

// e^{1/p} E1(1/p) / p and its derivative in p.
double f0_integrand(double p) {
    const double x = 1.0 / p;
    return x * specfun::e1_scaled(x);
}

double f0_integrand_slope(double p) {
    const double x = 1.0 / p;
    return -x * x * ((1.0 + x) * specfun::e1_scaled(x) - 1.0);
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::domain_error("gamma must be positive and finite, got " + std::to_string(gamma));
    }
}

}  // namespace

double f0_at(double R, double r_star, double gamma, std::size_t n_quad) {
    check_gamma(gamma);
    if (!(r_star > 0.0)) throw std::domain_error("f0_at: r_star must be positive");
    if (n_quad < 3) throw std::invalid_argument("f0_at: need at least 3 quadrature points");
    const double A = r_star + gamma;
    if (!(R > 0.0) || R > A) {
        throw std::domain_error("f0_at: R = " + std::to_string(R) + " outside (0, " + std::to_string(A) + "]");
    }
    const double linear = (1.0 - specfun::e1_scaled(1.0 / r_star)) * (R - A);
    if (R == A) return 0.0;

    std::vector<double> p(n_quad), psi(n_quad);
    const double h = (A - R) / static_cast<double>(n_quad - 1);
    for (std::size_t k = 0; k < n_quad; ++k) {
        p[k] = k + 1 == n_quad ? A : R + h * static_cast<double>(k);
        psi[k] = f0_integrand(p[k]);
    }
    const double trapezoid = integrate(psi, diff_weights(p, "R"));
    const double endpoint = h * h / 12.0 * (f0_integrand_slope(A) - f0_integrand_slope(R));
    return linear + trapezoid - endpoint;
}

CalibrationResult calibrate(double gamma, std::size_t n_quad, double tol) {
    check_gamma(gamma);
    if (!(tol > 0.0)) throw std::invalid_argument("calibrate: tol must be positive");
    const auto [lo, hi] = kCalibrationBracket;
    const auto root = bisect([&](double r) { return f0_at(r, r, gamma, n_quad); }, lo, hi,
                             {.x_tol = 0.0, .f_tol = tol, .max_iterations = 200});
    if (std::abs(root.residual) > tol) {
        throw std::runtime_error("calibrate: bisection stalled with |f0(r*)| = " +
                                 std::to_string(std::abs(root.residual)) + " above tol");
    }
    return {gamma, root.root, root.residual, root.iterations, {root.lo, root.hi}};
}

double asymptotic_r_star(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("asymptotic_r_star: tol must be positive");
    const auto root = bisect([](double r) { return 1.0 - specfun::e1_scaled(1.0 / r); }, 2.0, 3.0,
                             {.x_tol = tol, .f_tol = 0.0, .max_iterations = 200});
    return root.root;
}

std::vector<std::pair<double, double>> calibration_curve(double gamma, std::span<const double> r_values,
                                                         std::size_t n_quad) {
    std::vector<std::pair<double, double>> out;
    out.reserve(r_values.size());
    for (double r : r_values) out.emplace_back(r, f0_at(r, r, gamma, n_quad));
    return out;
}

}  // namespace srr
