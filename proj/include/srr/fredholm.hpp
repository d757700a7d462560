#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srr/calibration.hpp"
#include "srr/quadrature.hpp"

namespace srr {

/// An exponential with argument above kMaxExpArgument was requested during kernel assembly.
class OverflowGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, std::size_t pivot_index, double pivot_value)
        : std::runtime_error(what), pivot_index(pivot_index), pivot_value(pivot_value) {}

    std::size_t pivot_index;
    double pivot_value;
};

inline constexpr double kMaxExpArgument = 50.0;

/// Discretization P of the lambda-dependent part of the integral equation
///   f_lambda = f0 - lambda * P f_lambda
/// on a grid. Rows and columns are indexed like grid.nodes.
struct KernelMatrix {
    Eigen::MatrixXd P;
    Grid grid;
    double r_star = 0.0;
    double gamma = 0.0;
};

/// f0 at every grid node (via f0_at); the entry at the threshold is exactly 0.
std::vector<double> assemble_f0_vector(const Grid& grid, double r_star, double gamma,
                                       std::size_t n_quad = kDefaultQuadraturePoints);

/// Row i of P, with x = 1/R_i, a = 1/A and K(x) = Ei(x) - e^x/x, is the trapezoidal
/// (differential-form) discretization on the z-nodes 1/R_j of
///
///   K(a) int_a^{zmax} f(1/z) d(e^-z)
///     - (e^-x Ei(x) - 1/x) int_x^{zmax} f(1/z) d(e^-(z-x))
///     - int_a^x f(1/z) d(e^-z Ei(z)),         zmax = 1/r_min.
///
/// This is the printed three-integral form with the two K(x) terms merged into a single
/// tail integral; the e^x factor is absorbed into shifted weights so that no factor grows
/// like e^{1/R}. The row at R = A is identically zero.
KernelMatrix assemble_kernel(const Grid& grid, double r_star, double gamma);

/// Solves (I + lambda P) f = f0 with a dense partial-pivoting LU. lambda = 0 returns f0.
/// Throws SingularMatrixError if the factorization breaks down or the residual
/// ||(I + lambda P) f - f0||_inf exceeds 1e-8 ||f0||_inf.
std::vector<double> solve_f_lambda(const KernelMatrix& kernel, std::span<const double> f0, double lambda);

/// Reduces P = Q H Q^T once so that each shifted system I + lambda P costs O(n^2):
/// (I + lambda H) y = Q^T f0 is solved by Gaussian elimination with partial pivoting on
/// the Hessenberg matrix, then f = Q y.
class ShiftedKernelSolver {
public:
    explicit ShiftedKernelSolver(const KernelMatrix& kernel);

    std::vector<double> solve(std::span<const double> f0, double lambda) const;

    /// ||(I + lambda P) f - f0||_inf against the original (unreduced) kernel.
    double residual(std::span<const double> f, std::span<const double> f0, double lambda) const;

private:
    const KernelMatrix* kernel_;
    Eigen::MatrixXd q_;
    Eigen::MatrixXd h_;
};

struct LambdaRow {
    double lambda = 0.0;
    std::optional<double> f_lambda_at_rstar;  // empty when the solve failed
    double residual = 0.0;
    std::string error;
};

struct LambdaSweep {
    std::vector<LambdaRow> rows;
    std::size_t grid_size = 0;
    double r_min = 0.0;
    double threshold = 0.0;
    double gamma = 0.0;
    double r_star = 0.0;

    /// True when every row solved and every row with lambda > 0 has f_lambda(r*) < 0.
    bool conjecture_holds() const;
};

/// lambda_k = k * lambda_max / count, k = 1..count: `count` uniform samples of (0, lambda_max].
std::vector<double> canonical_lambdas(std::size_t count, double lambda_max);

/// Assembles f0 and P once and reads off f_lambda(r*) for every lambda. A failing solve
/// is recorded in its row and does not abort the sweep.
LambdaSweep sweep_lambda(const Grid& grid, double r_star, double gamma, std::span<const double> lambdas,
                         std::size_t n_quad = kDefaultQuadraturePoints);

struct OdeResidual {
    double max_residual = 0.0;
    std::size_t nodes_checked = 0;
    bool too_coarse = false;  // fewer than 100 nodes were checked
};

/// max |-lambda f + f' + R^2 f'' - (e^{1/R}E1(1/R) - e^{1/r*}E1(1/r*))| over interior nodes,
/// with central differences. The 5% of nodes nearest each end are skipped, as are nodes
/// whose three-point stencil is not evenly spaced (the neighbourhood of the snapped r* node).
OdeResidual ode_residual(std::span<const double> f, const Grid& grid, double lambda, double r_star, double gamma);

}  // namespace srr
