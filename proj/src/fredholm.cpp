#include "srr/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srr/specfun.hpp"

namespace srr {
namespace {

double guarded_exp(double arg) {
    if (arg > kMaxExpArgument) {
        throw OverflowGuardError("kernel assembly requested exp(" + std::to_string(arg) + ")");
    }
    return std::exp(arg);
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void check_grid(const Grid& grid, double r_star, double gamma) {
    if (grid.size() < 3) throw std::invalid_argument("grid needs at least 3 nodes");
    if (grid.nodes.back() != r_star + gamma) {
        throw std::invalid_argument("grid threshold does not match r_star + gamma");
    }
}

}  // namespace

std::vector<double> assemble_f0_vector(const Grid& grid, double r_star, double gamma, std::size_t n_quad) {
    check_grid(grid, r_star, gamma);
    std::vector<double> f0(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) f0[i] = f0_at(grid.nodes[i], r_star, gamma, n_quad);
    f0.back() = 0.0;
    return f0;
}

KernelMatrix assemble_kernel(const Grid& grid, double r_star, double gamma) {
    check_grid(grid, r_star, gamma);
    const std::size_t n = grid.size();

    // z-nodes in ascending order: z[j] = 1 / R[n-1-j], z[0] = 1/A, z[n-1] = 1/r_min.
    std::vector<double> z(n), exp_neg_z(n), ei_scaled_z(n);
    for (std::size_t j = 0; j < n; ++j) {
        z[j] = 1.0 / grid.nodes[n - 1 - j];
        exp_neg_z[j] = std::exp(-z[j]);
        ei_scaled_z[j] = specfun::ei_scaled(z[j]);
    }
    const double a = z[0];
    const double k_a = guarded_exp(a) * (ei_scaled_z[0] - 1.0 / a);

    std::vector<double> head(n, 0.0);  // K(a) * weights of d(e^-z) over the full range
    detail::add_diff_weights(exp_neg_z, k_a, head);

    KernelMatrix kernel{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                        grid, r_star, gamma};
    std::vector<double> row(n), shifted(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t jx = n - 1 - i;  // z-index of x = 1/R_i, always >= 1 here
        const double x = z[jx];
        std::copy(head.begin(), head.end(), row.begin());

        // Tail over [x, zmax] with the e^x factor folded into the measure.
        const std::size_t tail = n - jx;
        for (std::size_t j = jx; j < n; ++j) shifted[j - jx] = guarded_exp(-(z[j] - x));
        detail::add_diff_weights(std::span(shifted).first(tail), -(ei_scaled_z[jx] - 1.0 / x),
                                 std::span(row).subspan(jx, tail));

        detail::add_diff_weights(std::span(ei_scaled_z).first(jx + 1), -1.0, std::span(row).first(jx + 1));

        for (std::size_t j = 0; j < n; ++j) {
            kernel.P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1 - j)) = row[j];
        }
    }
    if (!kernel.P.allFinite()) throw std::runtime_error("assemble_kernel: non-finite kernel entry");
    return kernel;
}

std::vector<double> solve_f_lambda(const KernelMatrix& kernel, std::span<const double> f0, double lambda) {
    const auto n = kernel.P.rows();
    if (static_cast<Eigen::Index>(f0.size()) != n) throw std::length_error("solve_f_lambda: size mismatch");
    if (!(lambda >= 0.0)) throw std::domain_error("solve_f_lambda: lambda must be non-negative");
    if (lambda == 0.0) return {f0.begin(), f0.end()};

    Eigen::MatrixXd system = lambda * kernel.P;
    system.diagonal().array() += 1.0;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);

    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    Eigen::Index worst = 0;
    const double min_pivot = diag.minCoeff(&worst);
    if (!(min_pivot > 0.0) || !std::isfinite(min_pivot)) {
        throw SingularMatrixError("I + lambda P is singular at lambda = " + std::to_string(lambda) +
                                      " (pivot " + std::to_string(worst) + " = " + std::to_string(min_pivot) + ")",
                                  static_cast<std::size_t>(worst), min_pivot);
    }

    const Eigen::Map<const Eigen::VectorXd> rhs(f0.data(), n);
    const Eigen::VectorXd f = lu.solve(rhs);
    const double residual = (system * f - rhs).lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-8 * std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300))) {
        throw SingularMatrixError("I + lambda P is numerically singular at lambda = " + std::to_string(lambda) +
                                      " (residual " + std::to_string(residual) + ")",
                                  static_cast<std::size_t>(worst), min_pivot);
    }
    return {f.data(), f.data() + n};
}

ShiftedKernelSolver::ShiftedKernelSolver(const KernelMatrix& kernel) : kernel_(&kernel) {
    const Eigen::HessenbergDecomposition<Eigen::MatrixXd> hess(kernel.P);
    q_ = hess.matrixQ();
    h_ = hess.matrixH();
}

std::vector<double> ShiftedKernelSolver::solve(std::span<const double> f0, double lambda) const {
    const auto n = h_.rows();
    if (static_cast<Eigen::Index>(f0.size()) != n) throw std::length_error("ShiftedKernelSolver: size mismatch");
    if (!(lambda >= 0.0)) throw std::domain_error("ShiftedKernelSolver: lambda must be non-negative");
    if (lambda == 0.0) return {f0.begin(), f0.end()};

    Eigen::MatrixXd m = lambda * h_;
    m.diagonal().array() += 1.0;
    Eigen::VectorXd y = q_.transpose() * Eigen::Map<const Eigen::VectorXd>(f0.data(), n);

    // Forward elimination: only the subdiagonal entry m(k+1, k) is nonzero below the pivot.
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (std::abs(m(k + 1, k)) > std::abs(m(k, k))) {
            for (Eigen::Index j = k; j < n; ++j) std::swap(m(k, j), m(k + 1, j));
            std::swap(y(k), y(k + 1));
        }
        const double pivot = m(k, k);
        if (pivot == 0.0) {
            throw SingularMatrixError("zero pivot in shifted Hessenberg solve at lambda = " + std::to_string(lambda),
                                      static_cast<std::size_t>(k), pivot);
        }
        const double factor = m(k + 1, k) / pivot;
        if (factor != 0.0) {
            m.row(k + 1).segment(k + 1, n - k - 1) -= factor * m.row(k).segment(k + 1, n - k - 1);
            y(k + 1) -= factor * y(k);
        }
        m(k + 1, k) = 0.0;
    }
    if (m(n - 1, n - 1) == 0.0) {
        throw SingularMatrixError("zero pivot in shifted Hessenberg solve at lambda = " + std::to_string(lambda),
                                  static_cast<std::size_t>(n - 1), 0.0);
    }
    m.triangularView<Eigen::Upper>().solveInPlace(y);

    const Eigen::VectorXd f = q_ * y;
    return {f.data(), f.data() + n};
}

double ShiftedKernelSolver::residual(std::span<const double> f, std::span<const double> f0, double lambda) const {
    const auto n = kernel_->P.rows();
    const Eigen::Map<const Eigen::VectorXd> fv(f.data(), n), rhs(f0.data(), n);
    return (fv + lambda * (kernel_->P * fv) - rhs).lpNorm<Eigen::Infinity>();
}

bool LambdaSweep::conjecture_holds() const {
    return std::all_of(rows.begin(), rows.end(), [](const LambdaRow& row) {
        return row.f_lambda_at_rstar.has_value() && (row.lambda == 0.0 || *row.f_lambda_at_rstar < 0.0);
    });
}

std::vector<double> canonical_lambdas(std::size_t count, double lambda_max) {
    if (count == 0) throw std::invalid_argument("canonical_lambdas: count must be positive");
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw std::invalid_argument("canonical_lambdas: lambda_max must be positive");
    }
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = lambda_max * static_cast<double>(k + 1) / static_cast<double>(count);
    return out;
}

LambdaSweep sweep_lambda(const Grid& grid, double r_star, double gamma, std::span<const double> lambdas,
                         std::size_t n_quad) {
    const std::vector<double> f0 = assemble_f0_vector(grid, r_star, gamma, n_quad);
    const KernelMatrix kernel = assemble_kernel(grid, r_star, gamma);
    const ShiftedKernelSolver solver(kernel);

    LambdaSweep sweep{{}, grid.size(), grid.r_min, grid.threshold, gamma, r_star};
    sweep.rows.reserve(lambdas.size());
    const double scale = std::max(inf_norm(f0), 1e-300);
    for (double lambda : lambdas) {
        LambdaRow row{lambda, std::nullopt, 0.0, {}};
        try {
            const std::vector<double> f = solver.solve(f0, lambda);
            row.residual = solver.residual(f, f0, lambda);
            if (!(row.residual <= 1e-8 * scale)) {
                row.error = "residual " + std::to_string(row.residual) + " above tolerance";
            } else {
                row.f_lambda_at_rstar = f[grid.r_star_index];
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        sweep.rows.push_back(std::move(row));
    }
    return sweep;
}

OdeResidual ode_residual(std::span<const double> f, const Grid& grid, double lambda, double r_star, double gamma) {
    const std::size_t n = grid.size();
    if (f.size() != n) throw std::length_error("ode_residual: size mismatch");
    const std::size_t margin = std::max<std::size_t>(1, n / 20);
    if (std::abs(grid.threshold - (r_star + gamma)) > 1e-12 * grid.threshold) {
        throw std::invalid_argument("ode_residual: grid threshold does not match r_star + gamma");
    }
    const double rhs_shift = specfun::e1_scaled(1.0 / r_star);

    OdeResidual out;
    for (std::size_t i = margin; i + margin < n; ++i) {
        const double r = grid.nodes[i];
        const double h_lo = r - grid.nodes[i - 1];
        const double h_hi = grid.nodes[i + 1] - r;
        if (std::abs(h_hi - h_lo) > 1e-9 * h_lo) continue;
        const double h = 0.5 * (h_lo + h_hi);
        const double d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
        const double d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
        const double rhs = specfun::e1_scaled(1.0 / r) - rhs_shift;
        out.max_residual = std::max(out.max_residual, std::abs(-lambda * f[i] + d1 + r * r * d2 - rhs));
        ++out.nodes_checked;
    }
    out.too_coarse = out.nodes_checked < 100;
    return out;
}

}  // namespace srr
