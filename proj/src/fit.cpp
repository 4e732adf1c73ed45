#include "qmem/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>

namespace qmem {

bool FitResult::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

double sum_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const std::vector<double>& p,
                                 int n_residuals) {
    const int np = static_cast<int>(p.size());
    Eigen::MatrixXd jac(n_residuals, np);
    std::vector<double> rp(static_cast<std::size_t>(n_residuals));
    std::vector<double> rm(static_cast<std::size_t>(n_residuals));
    for (int j = 0; j < np; ++j) {
        std::vector<double> q = p;
        const double h = 1e-7 * std::max(1.0, std::abs(p[static_cast<std::size_t>(j)]));
        q[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(j)] + h;
        f(q, rp);
        q[static_cast<std::size_t>(j)] = p[static_cast<std::size_t>(j)] - h;
        f(q, rm);
        for (int i = 0; i < n_residuals; ++i)
            jac(i, j) = (rp[static_cast<std::size_t>(i)] - rm[static_cast<std::size_t>(i)]) /
                        (2.0 * h);
    }
    return jac;
}

struct LocalFit {
    std::vector<double> params;
    double ssr = 0.0;
    bool converged = false;
    Eigen::MatrixXd jac;
};

LocalFit run_from(const ResidualFn& f, int n_residuals, std::vector<double> p,
                  const FitOptions& opt) {
    std::vector<double> r(static_cast<std::size_t>(n_residuals));
    f(p, r);
    double ssr = sum_sq(r);
    double lambda = 1e-3;
    LocalFit out{p, ssr, false, {}};

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        const Eigen::MatrixXd jac = numeric_jacobian(f, p, n_residuals);
        Eigen::VectorXd rv(n_residuals);
        for (int i = 0; i < n_residuals; ++i) rv(i) = r[static_cast<std::size_t>(i)];
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * rv;

        bool accepted = false;
        for (int attempt = 0; attempt < 25 && !accepted; ++attempt) {
            Eigen::MatrixXd m = jtj;
            for (int k = 0; k < m.rows(); ++k)
                m(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Eigen::VectorXd step = m.ldlt().solve(-g);
            std::vector<double> q = p;
            for (std::size_t k = 0; k < q.size(); ++k) q[k] += step(static_cast<int>(k));
            std::vector<double> rq(static_cast<std::size_t>(n_residuals));
            f(q, rq);
            const double ssr_q = sum_sq(rq);
            if (std::isfinite(ssr_q) && ssr_q <= ssr) {
                const double rel = (ssr - ssr_q) / std::max(ssr, 1e-300);
                p = std::move(q);
                r = std::move(rq);
                ssr = ssr_q;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (rel < opt.rel_tolerance) {
                    out.params = p;
                    out.ssr = ssr;
                    out.converged = true;
                    out.jac = numeric_jacobian(f, p, n_residuals);
                    return out;
                }
            } else {
                lambda *= 4.0;
            }
        }
        if (!accepted) break;  // stuck; damping saturated
    }
    out.params = p;
    out.ssr = ssr;
    out.jac = numeric_jacobian(f, p, n_residuals);
    return out;
}

}  // namespace

FitResult fit_nonlinear(const std::string& model, const ResidualFn& residuals,
                        int n_residuals, const std::vector<std::vector<double>>& starts,
                        const FitOptions& options) {
    if (starts.empty()) throw NumericalError("fit_nonlinear: no starting points");
    std::optional<LocalFit> best;
    for (const auto& s : starts) {
        LocalFit lf = run_from(residuals, n_residuals, s, options);
        if (!best || lf.ssr < best->ssr || (lf.converged && !best->converged && lf.ssr <= best->ssr * (1 + 1e-12)))
            best = std::move(lf);
    }

    FitResult out;
    out.model = model;
    out.params = best->params;
    out.residual_norm = std::sqrt(best->ssr);
    out.converged = best->converged;

    const int np = static_cast<int>(best->params.size());
    out.std_errs.assign(static_cast<std::size_t>(np), 0.0);
    if (n_residuals > np) {
        const double s2 = best->ssr / (n_residuals - np);
        const Eigen::MatrixXd jtj = best->jac.transpose() * best->jac;
        const Eigen::MatrixXd cov = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
        for (int k = 0; k < np; ++k)
            out.std_errs[static_cast<std::size_t>(k)] =
                cov(k, k) > 0.0 ? std::sqrt(cov(k, k)) : 0.0;
    }
    return out;
}

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DataError("fit_line: need at least 2 (x, y) points");
    const double xmin = *std::min_element(x.begin(), x.end());
    const double xmax = *std::max_element(x.begin(), x.end());
    if (xmax - xmin < 1e-12 * std::max(1.0, std::abs(xmax)))
        throw DataError("fit_line: abscissae are rank-deficient (all equal)");

    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = x[static_cast<std::size_t>(i)];
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd p = (a.transpose() * a).ldlt().solve(a.transpose() * b);
    const Eigen::VectorXd r = a * p - b;
    const double ssr = r.squaredNorm();

    FitResult out;
    out.model = "line";
    out.params = {p(0), p(1)};
    out.residual_norm = std::sqrt(ssr);
    out.converged = true;
    out.std_errs = {0.0, 0.0};
    if (n > 2) {
        const double s2 = ssr / (n - 2);
        const Eigen::Matrix2d cov = s2 * (a.transpose() * a).inverse();
        out.std_errs = {std::sqrt(std::max(0.0, cov(0, 0))),
                        std::sqrt(std::max(0.0, cov(1, 1)))};
    }
    return out;
}

std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y,
                            int degree) {
    if (x.size() != y.size() || static_cast<int>(x.size()) < degree + 1)
        throw DataError("polyfit: not enough points for the requested degree");
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd a(n, degree + 1);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        double v = 1.0;
        for (int j = 0; j <= degree; ++j) {
            a(i, j) = v;
            v *= x[static_cast<std::size_t>(i)];
        }
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd p = a.colPivHouseholderQr().solve(b);
    std::vector<double> out(static_cast<std::size_t>(degree + 1));
    for (int j = 0; j <= degree; ++j) out[static_cast<std::size_t>(j)] = p(j);
    return out;
}

}  // namespace qmem
