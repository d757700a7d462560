#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srr/simulator.hpp"

namespace srr::sim {

struct Increment {
    double dt;
    double dxi;
};

class MalformedRecordError : public std::runtime_error {
public:
    MalformedRecordError(std::size_t line, const std::string& reason);

    std::size_t line;  // 1-based, header included
};

/// Reads increment records from CSV. The header selects the time column:
///   dt,dxi   each record carries its own step length
///   t,dxi    each record carries the (increasing) observation time; steps are
///            differences with t = 0 as the origin
/// Blank lines are skipped and trailing '\r' is tolerated.
std::vector<Increment> read_increments(std::istream& in);

/// Runs the SR-r recursion over observed increments, starting at r_star and alarming at
/// the first record after which R >= r_star + gamma. An exhausted stream yields an
/// outcome with stopped = false and stop_time equal to the observed duration.
PathOutcome detect_stream(std::span<const Increment> increments, double r_star, double gamma,
                          double drift_mu = std::sqrt(2.0));

/// Header plus one row: stopped,stop_time,r_at_stop,threshold,r_star,gamma
void write_outcome_csv(std::ostream& out, const PathOutcome& outcome, double r_star, double gamma);

}  // namespace srr::sim
