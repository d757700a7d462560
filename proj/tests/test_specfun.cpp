#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "srr/specfun.hpp"

#ifdef SRR_HAVE_BOOST_MATH
#include <boost/math/special_functions/expint.hpp>
#endif

using namespace srr::specfun;

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return xs;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("e1 reference values") {
    CHECK(std::abs(e1(1.0) - 0.21938393439552) <= 1e-12);
    CHECK(std::abs(e1(0.1) - 1.82292395841939) <= 1e-11);
    const double x = 1000.0;
    const double v = e1(x) == 0.0 ? x * e1_scaled(x) : e1(x) * std::exp(x) * x;
    CHECK(v > 0.999);
    CHECK(v < 1.0);
    CHECK(e1(800.0) == 0.0);
}

TEST_CASE("e1 matches the series oracle below 2") {
    for (double x : log_spaced(1e-8, 2.0, 2000)) {
        INFO("x = " << x);
        CHECK(rel(e1(x), static_cast<double>(oracle::e1_series(x))) <= 1e-12);
    }
}

TEST_CASE("e1_scaled matches the continued-fraction oracle above 0.5") {
    for (double x : log_spaced(0.5, 1e3, 2000)) {
        INFO("x = " << x);
        CHECK(rel(e1_scaled(x), static_cast<double>(oracle::e1_scaled_fraction(x))) <= 1e-12);
    }
}

TEST_CASE("series and fraction agree across the switch at x = 1") {
    for (double x : {0.9, 0.99, 0.999999, 1.0, 1.000001, 1.01, 1.1}) {
        INFO("x = " << x);
        CHECK(rel(e1_scaled(x), std::exp(x) * e1(x)) <= 1e-12);
        CHECK(rel(static_cast<double>(std::exp(static_cast<long double>(x)) * oracle::e1_series(x)),
                  static_cast<double>(oracle::e1_scaled_fraction(x))) <= 1e-14);
    }
}

TEST_CASE("e1_scaled examples") {
    CHECK(std::abs(e1_scaled(1.0) - 0.59634736232319) <= 1e-12);
    const double v = e1_scaled(500.0);
    CHECK(v > 1.0 / 501.0);
    CHECK(v < 1.0 / 500.0);
    CHECK(rel(e1_scaled(1e-8), -std::log(1e-8) - euler_gamma) <= 0.01);
}

TEST_CASE("ei_scaled matches the positive series oracle") {
    for (double x : log_spaced(1e-6, 700.0, 3000)) {
        INFO("x = " << x);
        const double ref = static_cast<double>(oracle::ei_scaled_series(x));
        if (x >= 1.0) {
            CHECK(rel(ei_scaled(x), ref) <= 1e-10);
        } else {
            CHECK(std::abs(ei_scaled(x) - ref) <= 1e-12);
        }
    }
}

TEST_CASE("ei_scaled examples") {
    CHECK(std::abs(ei_scaled(1.0) - 0.69717488323506) <= 1e-12);
    const double d = ei_scaled(500.0) - 1.0 / 500.0;
    CHECK(d > 1.0 / (500.0 * 500.0));
    CHECK(d < 1.1 * 2.0 / (500.0 * 500.0));
    // e^-x Ei(x) - 1/x changes sign near x = 1.3472; positive beyond it
    CHECK(ei_scaled(1.0) - 1.0 < 0.0);
    CHECK(ei_scaled(1.34) - 1.0 / 1.34 < 0.0);
    for (double x : {1.35, 2.0, 10.0, 41.0, 100.0, 1e4}) CHECK(ei_scaled(x) - 1.0 / x > 0.0);
}

TEST_CASE("ei_scaled changes sign at the zero of Ei") {
    constexpr double x0 = 0.37250741078;
    CHECK(ei_scaled(x0 - 1e-9) < 0.0);
    CHECK(ei_scaled(x0 + 1e-9) > 0.0);
    CHECK(ei_scaled(0.1) < 0.0);
    CHECK(ei_scaled(0.5) > 0.0);
}

#ifdef SRR_HAVE_BOOST_MATH
TEST_CASE("agreement with boost expint") {
    for (double x : log_spaced(1e-6, 650.0, 1500)) {
        INFO("x = " << x);
        const double e1_ref = boost::math::expint(1, x);
        if (e1_ref > 1e-290) CHECK(rel(e1(x), e1_ref) <= 1e-12);
        if (x >= 1.0) CHECK(rel(ei_scaled(x), std::exp(-x) * boost::math::expint(x)) <= 1e-10);
    }
}
#endif

TEST_CASE("bracketing and monotonicity on 10^4 log-spaced points") {
    const auto xs = log_spaced(1e-8, 1e3, 10000);
    double prev = std::numeric_limits<double>::infinity();
    int violations = 0;
    for (double x : xs) {
        const double v = e1_scaled(x);
        if (!(v > 0.0) || !(v < prev)) ++violations;
        if (x >= 1e-3 && !(x / (x + 1.0) < x * v && x * v < 1.0)) ++violations;
        prev = v;
    }
    CHECK(violations == 0);
}

TEST_CASE("derivative identities by central differences") {
    for (double x : log_spaced(0.1, 50.0, 200)) {
        INFO("x = " << x);
        const double h = 1e-5 * x;
        const double d1 = (e1_scaled(x + h) - e1_scaled(x - h)) / (2 * h);
        CHECK(std::abs(d1 - (e1_scaled(x) - 1.0 / x)) <= 1e-6 * std::max(1.0, std::abs(d1)));
        const double d2 = (ei_scaled(x + h) - ei_scaled(x - h)) / (2 * h);
        CHECK(std::abs(d2 - (1.0 / x - ei_scaled(x))) <= 1e-6 * std::max(1.0, std::abs(d2)));
    }
}

TEST_CASE("g") {
    const double rs = 1.0707, gam = 5.0, A = rs + gam;
    CHECK(g(A, rs, gam) == 0.0);
    CHECK(std::abs(g(1e-6, rs, gam) - e1_scaled(1.0 / A)) <= 1e-4);
    CHECK(g(1.0, rs, gam) == doctest::Approx(e1_scaled(1.0 / A) - e1_scaled(1.0)).epsilon(1e-14));
    CHECK(std::abs(g(1.0, rs, gam) - static_cast<double>(oracle::e1_scaled(1.0L / A) - oracle::e1_scaled(1.0L))) <= 1e-12);
    const auto rs_grid = log_spaced(1e-4, A, 500);
    for (std::size_t i = 1; i < rs_grid.size(); ++i) CHECK(g(rs_grid[i - 1], rs, gam) > g(rs_grid[i], rs, gam));
    CHECK(g(1e-300, rs, gam) == doctest::Approx(e1_scaled(1.0 / A)));
}

TEST_CASE("ScaledExpIntegrals bundles both functions") {
    const auto s = ScaledExpIntegrals::at(2.5);
    CHECK(s.x == 2.5);
    CHECK(s.e1_scaled == e1_scaled(2.5));
    CHECK(s.ei_scaled == ei_scaled(2.5));
}

TEST_CASE("domain errors") {
    for (double bad : {0.0, -1.0, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()}) {
        CHECK_THROWS_AS(e1(bad), std::domain_error);
        CHECK_THROWS_AS(e1_scaled(bad), std::domain_error);
        CHECK_THROWS_AS(ei_scaled(bad), std::domain_error);
    }
    CHECK_THROWS_AS(g(0.0, 1.0, 5.0), std::domain_error);
    CHECK_THROWS_AS(g(-2.0, 1.0, 5.0), std::domain_error);
}
