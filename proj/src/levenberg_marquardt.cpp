#include "spskit/levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "spskit/error.hpp"

namespace spskit::fit {

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd p, const LmOptions& options)
{
    if (options.lower) {
        p = p.cwiseMax(*options.lower);
    }
    if (options.upper) {
        p = p.cwiseMin(*options.upper);
    }
    return p;
}

std::vector<double> to_std(const Eigen::VectorXd& v)
{
    return {v.data(), v.data() + v.size()};
}

double squared_norm_checked(const Eigen::VectorXd& r)
{
    const double s = r.squaredNorm();
    if (!std::isfinite(s)) {
        throw NumericalError("residuals became non-finite during the fit");
    }
    return s;
}

}  // namespace

Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residual, const Eigen::VectorXd& p)
{
    const Eigen::VectorXd r0 = residual(p);
    Eigen::MatrixXd jac(r0.size(), p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const double h = 1e-6 * std::max(std::abs(p[k]), 1e-6);
        Eigen::VectorXd plus = p;
        Eigen::VectorXd minus = p;
        plus[k] += h;
        minus[k] -= h;
        jac.col(k) = (residual(plus) - residual(minus)) / (2.0 * h);
    }
    return jac;
}

LmResult levenberg_marquardt(const ResidualFunction& residual, const Eigen::VectorXd& start,
                             const LmOptions& options, const JacobianFunction& jacobian)
{
    const auto jac_of = [&](const Eigen::VectorXd& p) {
        return jacobian ? jacobian(p) : numeric_jacobian(residual, p);
    };

    Eigen::VectorXd p = clamp_to_box(start, options);
    Eigen::VectorXd r = residual(p);
    const Eigen::Index n = r.size();
    const Eigen::Index m = p.size();
    if (n < m) {
        throw ValidationError(fmt::format("fit needs at least {} points, got {}", m, n));
    }
    double cost = squared_norm_checked(r);
    double damping = options.initial_damping;
    bool converged = false;
    int iter = 0;

    for (; iter < options.max_iterations && !converged; ++iter) {
        const Eigen::MatrixXd jac = jac_of(p);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += damping * diag;
            const Eigen::VectorXd step = a.ldlt().solve(-grad);
            const Eigen::VectorXd trial = clamp_to_box(p + step, options);
            const Eigen::VectorXd actual_step = trial - p;
            const Eigen::VectorXd r_trial = residual(trial);
            const double s = r_trial.squaredNorm();
            if (std::isfinite(s) && s <= cost) {
                const double rel = actual_step.norm() / (p.norm() + options.relative_step_tolerance);
                const double drop = cost - s;
                p = trial;
                r = r_trial;
                cost = s;
                damping = std::max(damping / 3.0, 1e-15);
                accepted = true;
                if (rel < options.relative_step_tolerance || drop <= 1e-15 * std::max(cost, 1e-300)) {
                    converged = true;
                }
            } else {
                damping *= 4.0;
                if (damping > 1e16) {
                    // No downhill direction left: p is a local minimum to
                    // machine precision.
                    converged = true;
                    break;
                }
            }
        }
    }
    if (!converged) {
        throw NonConvergenceError(
            fmt::format("fit did not converge in {} iterations", options.max_iterations), to_std(p));
    }

    LmResult out;
    out.parameters = p;
    out.iterations = iter;
    out.chi_squared = cost;
    out.reduced_chi_squared = n > m ? cost / static_cast<double>(n - m) : 0.0;
    const Eigen::MatrixXd jac = jac_of(p);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jtj);
    out.covariance = cod.pseudoInverse();
    if (options.scale_covariance) {
        out.covariance *= out.reduced_chi_squared;
    }
    out.standard_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return out;
}

}  // namespace spskit::fit
