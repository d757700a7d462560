#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "srr/rng.hpp"
#include "srr/simulator.hpp"
#include "srr/specfun.hpp"
#include "srr/stream.hpp"

using namespace srr::sim;

namespace {

std::size_t error_line(const std::string& text) {
    std::istringstream in(text);
    try {
        read_increments(in);
    } catch (const MalformedRecordError& e) {
        return e.line;
    }
    return 0;
}

std::vector<Increment> zeros(double dt, double duration) {
    return std::vector<Increment>(static_cast<std::size_t>(std::llround(duration / dt)), Increment{dt, 0.0});
}

}  // namespace

TEST_CASE("parses both header styles") {
    std::istringstream a("dt,dxi\n0.01,0.1\n0.02,-0.2\n");
    const auto ra = read_increments(a);
    REQUIRE(ra.size() == 2);
    CHECK(ra[1].dt == 0.02);
    CHECK(ra[1].dxi == -0.2);

    std::istringstream b("t,dxi\r\n0.5,1e-3\r\n\r\n 1.25 , -2E-3\r\n");
    const auto rb = read_increments(b);
    REQUIRE(rb.size() == 2);
    CHECK(rb[0].dt == 0.5);
    CHECK(rb[1].dt == doctest::Approx(0.75));
    CHECK(rb[1].dxi == -2e-3);

    std::istringstream header_only("dt,dxi\n");
    CHECK(read_increments(header_only).empty());
}

TEST_CASE("malformed records carry their line number") {
    CHECK(error_line("") == 1);
    CHECK(error_line("time,dxi\n1,2\n") == 1);
    CHECK(error_line("dt,dxi\n0.1,0\n0.1\n") == 3);
    CHECK(error_line("dt,dxi\n0.1,0,5\n") == 2);
    CHECK(error_line("dt,dxi\n0.1,abc\n") == 2);
    CHECK(error_line("dt,dxi\n0.1,1x\n") == 2);
    CHECK(error_line("dt,dxi\n0,1\n") == 2);
    CHECK(error_line("dt,dxi\n-0.1,1\n") == 2);
    CHECK(error_line("dt,dxi\n0.1,nan\n") == 2);
    CHECK(error_line("t,dxi\n0.1,0\n\n0.1,0\n") == 4);
}

TEST_CASE("a zero stream alarms near gamma") {
    const double rs = 1.0707, gam = 5.0;
    const auto out = detect_stream(zeros(1e-3, 10.0), rs, gam);
    CHECK(out.stopped);
    CHECK(std::abs(out.stop_time - gam) <= 0.05);
    CHECK(out.r_at_stop >= rs + gam);
}

TEST_CASE("other drifts rescale time") {
    // with mu = 1 the normalized clock runs at half speed; gamma is given in normalized units
    const double rs = 1.0707, gam = 5.0, mu = 1.0;
    const auto out = detect_stream(zeros(1e-3, 20.0), rs, time_scale(mu) * gam, mu);
    CHECK(out.stopped);
    CHECK(std::abs(out.stop_time - gam) <= 0.05);
}

TEST_CASE("empty and short streams do not alarm") {
    const auto empty = detect_stream({}, 1.0707, 5.0);
    CHECK_FALSE(empty.stopped);
    CHECK(empty.stop_time == 0.0);
    CHECK(empty.r_at_stop == 1.0707);
    const auto short_run = detect_stream(zeros(1e-3, 1.0), 1.0707, 5.0);
    CHECK_FALSE(short_run.stopped);
    CHECK(short_run.stop_time == doctest::Approx(1.0));
}

TEST_CASE("drifted streams alarm early, like the post-change simulation") {
    const double rs = 1.0707, gam = 5.0, dt = 1e-3;
    double total = 0.0;
    const int n = 400;
    for (int k = 0; k < n; ++k) {
        srr::Philox4x32 rng(2024, static_cast<std::uint64_t>(k));
        std::normal_distribution<double> nd;
        std::vector<Increment> inc;
        for (int i = 0; i < 20000; ++i) inc.push_back({dt, std::sqrt(2.0) * dt + std::sqrt(dt) * nd(rng)});
        const auto out = detect_stream(inc, rs, gam);
        CHECK(out.stopped);
        total += out.stop_time;
    }
    const double g_star = srr::specfun::g(rs, rs, gam);
    // grid-only monitoring stops a little late; 400 paths give a standard error near 0.03
    CHECK(std::abs(total / n - g_star) <= 0.15);
}

TEST_CASE("outcome csv") {
    PathOutcome o;
    o.stopped = true;
    o.stop_time = 4.25;
    o.r_at_stop = 6.5;
    std::ostringstream os;
    write_outcome_csv(os, o, 1.5, 5.0);
    CHECK(os.str() == "stopped,stop_time,r_at_stop,threshold,r_star,gamma\n1,4.25,6.5,6.5,1.5,5\n");
}
