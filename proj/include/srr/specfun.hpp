#pragma once

namespace srr::specfun {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

/// Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
/// Underflows to 0 for large x. Throws std::domain_error for x <= 0 or non-finite x.
double e1(double x);

/// e^x E1(x), computed without forming e^x on its own for x > 1.
double e1_scaled(double x);

/// e^-x Ei(x), x > 0. Ei is the principal-value integral int_-inf^x e^t / t dt.
/// Ei itself overflows near x = 710; only the scaled product is exposed.
double ei_scaled(double x);

/// Mean-delay function of the SR-r stopping rule with threshold A = r_star + gamma:
///   g(R) = e^{1/A} E1(1/A) - e^{1/R} E1(1/R).
/// Strictly decreasing in R, g(A) = 0 and g(0+) = e^{1/A} E1(1/A).
double g(double R, double r_star, double gamma);

struct ScaledExpIntegrals {
    double x;
    double e1_scaled;  // e^x E1(x)
    double ei_scaled;  // e^-x Ei(x)

    static ScaledExpIntegrals at(double x);
};

}  // namespace srr::specfun
