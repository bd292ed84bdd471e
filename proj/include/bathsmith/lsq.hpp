// lsq.hpp - Box-constrained Levenberg-Marquardt with infeasible-step rejection

#pragma once

#include <functional>

#include <Eigen/Dense>

namespace bathsmith {

struct LsqProblem {
    // Fills r for parameters x; returns false if x is infeasible (the step is
    // rejected and the damping increased).
    std::function<bool(const Eigen::VectorXd& x, Eigen::VectorXd& r)> residuals;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct LsqOptions {
    int max_iterations = 200;
    double ftol = 1e-12;   // relative decrease of the cost
    double xtol = 1e-10;   // relative step size
    double fd_step = 1e-7; // relative forward-difference step
};

struct LsqResult {
    Eigen::VectorXd x;
    double cost = 0.0;         // sum of squared residuals
    double initial_cost = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Throws NumericError if the starting point itself is infeasible.
LsqResult levenberg_marquardt(const LsqProblem& problem, Eigen::VectorXd x0,
                              const LsqOptions& options = {});

} // namespace bathsmith
