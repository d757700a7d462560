#include "srr/stream.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

#include "srr/csv.hpp"

namespace srr::sim {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_field(std::string_view field, std::size_t line, const char* name) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw MalformedRecordError(line, std::string("cannot parse ") + name + " from '" + std::string(field) + "'");
    }
    if (!std::isfinite(value)) throw MalformedRecordError(line, std::string(name) + " is not finite");
    return value;
}

}  // namespace

MalformedRecordError::MalformedRecordError(std::size_t line_, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line_) + ": " + reason), line(line_) {}

std::vector<Increment> read_increments(std::istream& in) {
    std::string raw;
    std::size_t line = 0;
    bool absolute_time = false;
    bool have_header = false;
    double last_t = 0.0;
    std::vector<Increment> out;

    while (std::getline(in, raw)) {
        ++line;
        const std::string_view text = trim(raw);
        if (text.empty()) continue;
        const auto comma = text.find(',');
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
            throw MalformedRecordError(line, "expected exactly two comma-separated fields");
        }
        const std::string_view first = trim(text.substr(0, comma));
        const std::string_view second = trim(text.substr(comma + 1));
        if (!have_header) {
            if (second != "dxi" || (first != "t" && first != "dt")) {
                throw MalformedRecordError(line, "header must be 't,dxi' or 'dt,dxi'");
            }
            absolute_time = first == "t";
            have_header = true;
            continue;
        }
        const double time = parse_field(first, line, absolute_time ? "t" : "dt");
        const double dxi = parse_field(second, line, "dxi");
        const double dt = absolute_time ? time - last_t : time;
        if (!(dt > 0.0)) {
            throw MalformedRecordError(line, absolute_time ? "times must be strictly increasing from 0"
                                                           : "dt must be positive");
        }
        last_t = time;
        out.push_back({dt, dxi});
    }
    if (!have_header) throw MalformedRecordError(line == 0 ? 1 : line, "missing header row");
    return out;
}

PathOutcome detect_stream(std::span<const Increment> increments, double r_star, double gamma, double drift_mu) {
    if (!(r_star >= 0.0)) throw std::invalid_argument("detect_stream: r_star must be non-negative");
    if (!(gamma > 0.0)) throw std::invalid_argument("detect_stream: gamma must be positive");
    if (drift_mu == 0.0 || !std::isfinite(drift_mu)) throw std::invalid_argument("detect_stream: drift must be nonzero");

    const double threshold = r_star + gamma;
    const double c = time_scale(drift_mu);
    PathOutcome out;
    double R = r_star;
    double t = 0.0;
    for (const Increment& inc : increments) {
        out.integral_r += R * inc.dt;
        R = step_statistic(R, log_likelihood_increment(inc.dxi, inc.dt, drift_mu), c * inc.dt);
        t += inc.dt;
        if (R >= threshold) {
            out.stopped = true;
            break;
        }
    }
    out.stop_time = t;
    out.r_at_stop = R;
    return out;
}

void write_outcome_csv(std::ostream& out, const PathOutcome& outcome, double r_star, double gamma) {
    CsvWriter csv(out, {"stopped", "stop_time", "r_at_stop", "threshold", "r_star", "gamma"});
    csv.row(outcome.stopped ? 1 : 0, outcome.stop_time, outcome.r_at_stop, r_star + gamma, r_star, gamma);
}

}  // namespace srr::sim
