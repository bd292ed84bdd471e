// lsq.cpp - Levenberg-Marquardt with Marquardt scaling and projection onto the box

#include "bathsmith/lsq.hpp"

#include <cmath>

#include "bathsmith/error.hpp"

namespace bathsmith {

LsqResult levenberg_marquardt(const LsqProblem& pb, Eigen::VectorXd x, const LsqOptions& opt) {
    const Eigen::Index n = x.size();
    auto clamp = [&](Eigen::VectorXd v) {
        for (Eigen::Index i = 0; i < n; ++i) v[i] = std::min(pb.upper[i], std::max(pb.lower[i], v[i]));
        return v;
    };
    x = clamp(x);
    LsqResult res;
    Eigen::VectorXd r;
    if (!pb.residuals(x, r)) throw NumericError("levenberg_marquardt: infeasible starting point");
    ++res.evaluations;
    double cost = r.squaredNorm();
    res.initial_cost = cost;
    double lambda = 1e-3;
    Eigen::MatrixXd J(r.size(), n);
    Eigen::VectorXd rt;
    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it + 1;
        // forward-difference Jacobian, stepping inward at the upper bound
        for (Eigen::Index k = 0; k < n; ++k) {
            double h = opt.fd_step * std::max(std::abs(x[k]), 1e-3);
            if (x[k] + h > pb.upper[k]) h = -h;
            Eigen::VectorXd xp = x;
            xp[k] += h;
            if (!pb.residuals(xp, rt)) {
                xp[k] = x[k] - h;
                h = -h;
                if (!pb.residuals(xp, rt)) throw NumericError("levenberg_marquardt: infeasible Jacobian probe");
            }
            ++res.evaluations;
            J.col(k) = (rt - r) / h;
        }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        Eigen::VectorXd D = A.diagonal().cwiseMax(1e-300);
        bool improved = false;
        for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
            Eigen::MatrixXd M = A;
            M.diagonal() += lambda * D;
            const Eigen::VectorXd step = M.ldlt().solve(-g);
            const Eigen::VectorXd xn = clamp(x + step);
            if ((xn - x).norm() <= opt.xtol * (x.norm() + opt.xtol)) {
                res.converged = true;
                break;
            }
            if (pb.residuals(xn, rt)) {
                ++res.evaluations;
                const double cn = rt.squaredNorm();
                if (cn < cost) {
                    const double rel = (cost - cn) / std::max(cost, 1e-300);
                    x = xn;
                    r = rt;
                    cost = cn;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    improved = true;
                    if (rel < opt.ftol) res.converged = true;
                    break;
                }
            } else {
                ++res.evaluations;
            }
            lambda *= 4.0;
        }
        if (res.converged || !improved) {
            res.converged = true;
            break;
        }
    }
    res.x = x;
    res.cost = cost;
    return res;
}

} // namespace bathsmith
