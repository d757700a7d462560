#include "srr/roots.hpp"

#include <cmath>
#include <sstream>

namespace srr {
namespace {

std::string bracket_message(double lo, double hi, double f_lo, double f_hi) {
    std::ostringstream os;
    os.precision(10);
    os << "no sign change on [" << lo << ", " << hi << "]: f(lo) = " << f_lo << ", f(hi) = " << f_hi;
    return os.str();
}

}  // namespace

BracketError::BracketError(double lo_, double hi_, double f_lo_, double f_hi_)
    : std::runtime_error(bracket_message(lo_, hi_, f_lo_, f_hi_)), lo(lo_), hi(hi_), f_lo(f_lo_), f_hi(f_hi_) {}

BisectionResult bisect(const std::function<double(double)>& f, double lo, double hi,
                       const BisectionOptions& options) {
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return {lo, 0.0, 0, lo, hi};
    if (f_hi == 0.0) return {hi, 0.0, 0, lo, hi};
    if (std::signbit(f_lo) == std::signbit(f_hi) || std::isnan(f_lo) || std::isnan(f_hi)) {
        throw BracketError(lo, hi, f_lo, f_hi);
    }

    double mid = 0.5 * (lo + hi);
    double f_mid = f(mid);
    int it = 1;
    while (it < options.max_iterations) {
        if (std::abs(f_mid) <= options.f_tol || hi - lo <= options.x_tol) break;
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        const double next = 0.5 * (lo + hi);
        if (next == lo || next == hi) break;  // bracket exhausted at double resolution
        mid = next;
        f_mid = f(mid);
        ++it;
    }
    return {mid, f_mid, it, lo, hi};
}

}  // namespace srr
