#pragma once

#include <functional>

#include "qmem/common.hpp"

namespace qmem {

struct FitResult {
    std::string model;
    std::vector<double> params;
    std::vector<double> std_errs;
    double residual_norm = 0.0;
    bool converged = false;
    std::vector<std::string> flags;  // e.g. "infinite-lifetime", "poor-fit"

    bool has_flag(const std::string& f) const;
};

// Residual function: fills r (fixed length) from parameters p.
using ResidualFn =
    std::function<void(const std::vector<double>& p, std::vector<double>& r)>;

struct FitOptions {
    int max_iterations = 200;
    double rel_tolerance = 1e-10;  // relative change in sum of squares
};

// Damped Gauss-Newton least squares with a numeric Jacobian, run from each
// start and keeping the best. Standard errors come from the usual linearized
// covariance s^2 (J^T J)^-1.
FitResult fit_nonlinear(const std::string& model, const ResidualFn& residuals,
                        int n_residuals, const std::vector<std::vector<double>>& starts,
                        const FitOptions& options = {});

// Ordinary least-squares line y = a + b x. params = {a, b}.
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares polynomial fit, lowest order first.
std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y,
                            int degree);

}  // namespace qmem
