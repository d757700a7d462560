#include "srr/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace srr::specfun {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxTerms = 1000;

// Ei's series is summed directly up to here; beyond it the asymptotic
// expansion reaches full precision before its terms start to grow.
constexpr double kEiSeriesLimit = 40.0;

void require_positive(double x, const char* what) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw std::domain_error(std::string(what) + ": argument must be positive and finite, got " +
                                std::to_string(x));
    }
}

// E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n n!), for 0 < x <= 1.
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;  // (-x)^n / n!
    for (int n = 1; n <= kMaxTerms; ++n) {
        term *= -x / n;
        const double contrib = term / n;
        sum += contrib;
        if (std::abs(contrib) < kEps * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(x) - sum;
}

// e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz; x > 1.
double e1_scaled_cf(double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxTerms; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) <= kEps) return h;
    }
    throw std::runtime_error("e1_scaled: continued fraction failed to converge at x = " +
                             std::to_string(x));
}

// Ei(x) = gamma + ln x + sum_{n>=1} x^n / (n n!).
double ei_series(double x) {
    double sum = 0.0;
    double term = 1.0;  // x^n / n!
    for (int n = 1; n <= kMaxTerms; ++n) {
        term *= x / n;
        const double contrib = term / n;
        sum += contrib;
        if (contrib < kEps * std::abs(sum)) break;
    }
    return euler_gamma + std::log(x) + sum;
}

// e^-x Ei(x) ~ (1/x) sum_k k! / x^k, truncated at the smallest term.
double ei_scaled_asymptotic(double x) {
    double sum = 1.0;
    double term = 1.0;
    for (int k = 1; k <= kMaxTerms; ++k) {
        const double next = term * k / x;
        if (next >= term) break;
        term = next;
        sum += term;
        if (term < kEps * sum) break;
    }
    return sum / x;
}

}  // namespace

double e1(double x) {
    require_positive(x, "e1");
    if (x <= 1.0) return e1_series(x);
    return std::exp(-x) * e1_scaled_cf(x);
}

double e1_scaled(double x) {
    require_positive(x, "e1_scaled");
    if (x <= 1.0) return std::exp(x) * e1_series(x);
    return e1_scaled_cf(x);
}

double ei_scaled(double x) {
    require_positive(x, "ei_scaled");
    if (x <= kEiSeriesLimit) return std::exp(-x) * ei_series(x);
    return ei_scaled_asymptotic(x);
}

double g(double R, double r_star, double gamma) {
    if (!(R > 0.0)) throw std::domain_error("g: R must be positive, got " + std::to_string(R));
    const double A = r_star + gamma;
    if (!(A > 0.0)) throw std::domain_error("g: threshold r_star + gamma must be positive");
    const double inv_r = 1.0 / R;
    const double tail = std::isfinite(inv_r) ? e1_scaled(inv_r) : 0.0;
    return e1_scaled(1.0 / A) - tail;
}

ScaledExpIntegrals ScaledExpIntegrals::at(double x) {
    return {x, specfun::e1_scaled(x), specfun::ei_scaled(x)};
}

}  // namespace srr::specfun
