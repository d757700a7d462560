#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace srr {

/// Raised when a bracket does not straddle a sign change.
class BracketError : public std::runtime_error {
public:
    BracketError(double lo, double hi, double f_lo, double f_hi);

    double lo, hi, f_lo, f_hi;
};

struct BisectionOptions {
    double x_tol = 0.0;   // stop once the bracket is narrower than this
    double f_tol = 0.0;   // stop once |f(mid)| is at or below this
    int max_iterations = 200;
};

struct BisectionResult {
    double root;
    double residual;
    int iterations;
    double lo, hi;  // final bracket
};

BisectionResult bisect(const std::function<double(double)>& f, double lo, double hi,
                       const BisectionOptions& options);

}  // namespace srr
