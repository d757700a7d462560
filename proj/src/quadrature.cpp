#include "srr/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace srr {

Grid make_grid(double r_min, double r_star, double gamma, std::size_t n) {
    if (n < 3) throw std::invalid_argument("make_grid: need at least 3 nodes, got " + std::to_string(n));
    if (!(r_min > 0.0)) throw std::invalid_argument("make_grid: r_min must be positive");
    if (!(r_min < r_star)) throw std::invalid_argument("make_grid: r_min must be below r_star");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("make_grid: gamma must be positive");

    Grid grid;
    grid.r_min = r_min;
    grid.threshold = r_star + gamma;
    grid.nodes.resize(n);
    const double h = (grid.threshold - r_min) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) grid.nodes[i] = r_min + h * static_cast<double>(i);
    grid.nodes.back() = grid.threshold;

    // Endpoints stay put; r_star lies strictly inside so an interior node always exists.
    auto nearest = static_cast<std::size_t>(std::llround((r_star - r_min) / h));
    if (nearest < 1) nearest = 1;
    if (nearest > n - 2) nearest = n - 2;
    grid.nodes[nearest] = r_star;
    grid.r_star_index = nearest;
    return grid;
}

namespace detail {

void add_diff_weights(std::span<const double> b, double scale, std::span<double> out) {
    const std::size_t n = b.size();
    if (n < 2) return;
    out[0] += scale * 0.5 * (b[1] - b[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] += scale * 0.5 * (b[i + 1] - b[i - 1]);
    out[n - 1] += scale * 0.5 * (b[n - 1] - b[n - 2]);
}

}  // namespace detail

DiffWeights diff_weights(std::span<const double> b_values, std::string measure) {
    if (b_values.size() < 3) {
        throw std::length_error("diff_weights: need at least 3 samples, got " +
                                std::to_string(b_values.size()));
    }
    DiffWeights out{std::vector<double>(b_values.size(), 0.0), std::move(measure)};
    detail::add_diff_weights(b_values, 1.0, out.w);
    return out;
}

double integrate(std::span<const double> a_values, const DiffWeights& weights) {
    if (a_values.size() != weights.w.size()) {
        throw std::length_error("integrate: " + std::to_string(a_values.size()) + " samples vs " +
                                std::to_string(weights.w.size()) + " weights");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a_values.size(); ++i) sum += weights.w[i] * a_values[i];
    return sum;
}

}  // namespace srr
