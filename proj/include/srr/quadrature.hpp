#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace srr {

/// Sample points of the detection statistic on [r_min, A], A = r_star + gamma.
/// Uniform in R, with the node nearest r_star moved onto r_star exactly.
struct Grid {
    std::vector<double> nodes;
    std::size_t r_star_index = 0;
    double threshold = 0.0;
    double r_min = 0.0;

    std::size_t size() const { return nodes.size(); }
    double r_star() const { return nodes[r_star_index]; }
};

/// Throws std::invalid_argument unless 0 < r_min < r_star and n >= 3.
Grid make_grid(double r_min, double r_star, double gamma, std::size_t n);

/// Weights turning sum_n w_n a(x_n) into the trapezoidal approximation of
/// int a db over the nodes that produced `b_values`:
///   w_0 = (b_1 - b_0)/2,  w_n = (b_{n+1} - b_{n-1})/2,  w_N = (b_N - b_{N-1})/2.
struct DiffWeights {
    std::vector<double> w;
    std::string measure;
};

/// Throws std::length_error for fewer than 3 samples.
DiffWeights diff_weights(std::span<const double> b_values, std::string measure = {});

/// Inner product of the weights with samples of the integrand.
double integrate(std::span<const double> a_values, const DiffWeights& weights);

namespace detail {
// Adds scale * diff_weights(b) into out[0..b.size()). Accepts two samples
// (single trapezoid) and is a no-op for fewer; used for kernel sub-ranges.
void add_diff_weights(std::span<const double> b, double scale, std::span<double> out);
}  // namespace detail

}  // namespace srr
