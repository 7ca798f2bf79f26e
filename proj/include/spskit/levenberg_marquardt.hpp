#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace spskit::fit {

// Residual vector r(p); the solver minimizes |r|^2. Weights are folded into
// the residuals by the caller.
using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFunction = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct LmOptions
{
    int max_iterations = 200;
    double relative_step_tolerance = 1e-10;
    double initial_damping = 1e-3;
    // Optional box bounds; steps are clamped into the box.
    std::optional<Eigen::VectorXd> lower;
    std::optional<Eigen::VectorXd> upper;
    // Scale the covariance by the reduced chi^2 (unknown noise level). Turn
    // off when residuals are already divided by their standard deviation.
    bool scale_covariance = true;
};

struct LmResult
{
    Eigen::VectorXd parameters;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd standard_errors;
    double chi_squared = 0.0;
    double reduced_chi_squared = 0.0;
    int iterations = 0;
};

// Central-difference Jacobian of r at p.
Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residual, const Eigen::VectorXd& p);

// Throws NonConvergenceError with the last iterate when the iteration budget
// runs out, NumericalError when residuals turn non-finite.
LmResult levenberg_marquardt(const ResidualFunction& residual, const Eigen::VectorXd& start,
                             const LmOptions& options = {}, const JacobianFunction& jacobian = nullptr);

}  // namespace spskit::fit
