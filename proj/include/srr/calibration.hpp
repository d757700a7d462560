#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "srr/roots.hpp"

namespace srr {

struct CalibrationResult {
    double gamma;
    double r_star;
    double residual;  // f0 at r_star, evaluated with r_star as its own starting point
    int iterations;
    std::pair<double, double> bracket;
};

inline constexpr std::pair<double, double> kCalibrationBracket{0.05, 2.3};
inline constexpr std::size_t kDefaultQuadraturePoints = 501;

/// Bounded solution of f0' + R^2 f0'' = e^{1/R}E1(1/R) - e^{1/r*}E1(1/r*) with f0(A) = 0:
///   f0(R) = (1 - e^{1/r*}E1(1/r*)) (R - A) + int_{1/A}^{1/R} E1(x) dEi(x).
///
/// The integral is taken in R-space, where it reads int_R^A e^{1/p}E1(1/p)/p dp and the
/// integrand stays bounded (it tends to 1 as p -> 0). It is sampled at n_quad uniform points
/// on [R, A] with the trapezoidal rule plus the h^2/12 endpoint-derivative correction, so
/// the error is O(h^4) and varies smoothly with R.
///
/// Throws std::domain_error unless 0 < R <= A, and std::invalid_argument for n_quad < 3.
double f0_at(double R, double r_star, double gamma, std::size_t n_quad = kDefaultQuadraturePoints);

/// Solves f0(r; r, gamma) = 0 for the starting point r* by bisection on
/// kCalibrationBracket, stopping once |f0| <= tol. Throws BracketError if the
/// bracket holds no sign change.
CalibrationResult calibrate(double gamma, std::size_t n_quad = kDefaultQuadraturePoints,
                            double tol = 1e-6);

/// Large-gamma limit of the calibration equation: root of 1 - e^{1/r}E1(1/r) = 0
/// (about 2.299812), located to within tol.
double asymptotic_r_star(double tol = 1e-10);

/// (r, f0(r; r, gamma)) over the given starting points, i.e. the curve whose zero is r*.
std::vector<std::pair<double, double>> calibration_curve(double gamma, std::span<const double> r_values,
                                                         std::size_t n_quad = kDefaultQuadraturePoints);

}  // namespace srr
