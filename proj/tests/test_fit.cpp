#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qmem/fit.hpp"

using namespace qmem;

namespace {

std::vector<double> linspace_local(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

ResidualFn exp_decay_residuals(const std::vector<double>& t, const std::vector<double>& y) {
    return [&t, &y](const std::vector<double>& p, std::vector<double>& r) {
        for (std::size_t i = 0; i < t.size(); ++i)
            r[i] = p[0] * std::exp(-t[i] / p[1]) - y[i];
    };
}

}  // namespace

TEST_CASE("fit_nonlinear recovers exact exponential parameters") {
    const auto t = linspace_local(0.0, 10.0, 40);
    std::vector<double> y;
    for (double ti : t) y.push_back(0.8 * std::exp(-ti / 2.5));

    const FitResult fit = fit_nonlinear("exp", exp_decay_residuals(t, y),
                                        static_cast<int>(t.size()),
                                        {{1.0, 1.0}, {0.5, 5.0}});
    REQUIRE(fit.converged);
    CHECK(fit.params[0] == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(fit.params[1] == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(fit.residual_norm < 1e-8);
    CHECK(fit.model == "exp");
}

TEST_CASE("fit_nonlinear recovers an exact Gaussian peak") {
    const auto x = linspace_local(-5.0, 9.0, 60);
    std::vector<double> y;
    for (double xi : x) y.push_back(1.4 * std::exp(-(xi - 2.0) * (xi - 2.0) / (2.0 * 1.3 * 1.3)));

    auto resid = [&](const std::vector<double>& p, std::vector<double>& r) {
        for (std::size_t i = 0; i < x.size(); ++i)
            r[i] = p[0] * std::exp(-(x[i] - p[1]) * (x[i] - p[1]) / (2.0 * p[2] * p[2])) - y[i];
    };
    const FitResult fit =
        fit_nonlinear("gauss", resid, static_cast<int>(x.size()), {{1.0, 0.0, 1.0}});
    REQUIRE(fit.converged);
    CHECK(fit.params[0] == doctest::Approx(1.4).epsilon(1e-6));
    CHECK(fit.params[1] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(fit.params[2]) == doctest::Approx(1.3).epsilon(1e-6));
}

TEST_CASE("multi-start keeps the best basin and is order-invariant") {
    // A deliberately multimodal model: amplitude times cos(w x) with a decaying
    // envelope has spurious local minima in w.
    const auto x = linspace_local(0.0, 6.0, 80);
    std::vector<double> y;
    for (double xi : x) y.push_back(std::exp(-0.3 * xi) * std::cos(2.0 * xi));
    auto resid = [&](const std::vector<double>& p, std::vector<double>& r) {
        for (std::size_t i = 0; i < x.size(); ++i)
            r[i] = std::exp(-p[0] * x[i]) * std::cos(p[1] * x[i]) - y[i];
    };

    const std::vector<std::vector<double>> starts{{0.3, 0.4}, {0.3, 1.9}, {0.3, 5.0}};
    std::vector<std::vector<double>> reversed(starts.rbegin(), starts.rend());
    const FitResult a = fit_nonlinear("osc", resid, static_cast<int>(x.size()), starts);
    const FitResult b = fit_nonlinear("osc", resid, static_cast<int>(x.size()), reversed);

    REQUIRE(a.converged);
    CHECK(a.params[1] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(b.params[0] == doctest::Approx(a.params[0]).epsilon(1e-9));
    CHECK(b.params[1] == doctest::Approx(a.params[1]).epsilon(1e-9));
}

TEST_CASE("fit_nonlinear tolerates small deterministic noise") {
    const auto t = linspace_local(0.0, 12.0, 50);
    std::mt19937 rng(7);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> y;
    for (double ti : t) y.push_back(0.9 * std::exp(-ti / 3.0) * (1.0 + noise(rng)));

    const FitResult fit = fit_nonlinear("exp", exp_decay_residuals(t, y),
                                        static_cast<int>(t.size()), {{1.0, 1.0}});
    REQUIRE(fit.converged);
    CHECK(fit.params[0] == doctest::Approx(0.9).epsilon(0.02));
    CHECK(fit.params[1] == doctest::Approx(3.0).epsilon(0.02));
    // reported standard errors are positive and small relative to the estimates
    CHECK(fit.std_errs[1] > 0.0);
    CHECK(fit.std_errs[1] < 0.1 * fit.params[1]);
}

TEST_CASE("fit_nonlinear rejects an empty start list") {
    auto resid = [](const std::vector<double>&, std::vector<double>& r) { r[0] = 0.0; };
    CHECK_THROWS_AS(fit_nonlinear("none", resid, 1, {}), NumericalError);
}

TEST_CASE("fit_line is exact on a line and reports sane errors with noise") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> y;
    for (double xi : x) y.push_back(1.5 - 0.7 * xi);
    const FitResult exact = fit_line(x, y);
    CHECK(exact.params[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(exact.params[1] == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(exact.residual_norm < 1e-12);

    // perturbation symmetric about the abscissa mean shifts the intercept only
    std::vector<double> yp = y;
    yp[1] += 0.1;
    yp[3] += 0.1;
    const FitResult noisy = fit_line(x, yp);
    CHECK(noisy.params[1] == doctest::Approx(-0.7).epsilon(1e-9));
    CHECK(noisy.params[0] == doctest::Approx(1.5 + 0.04).epsilon(1e-9));
    CHECK(noisy.std_errs[0] > 0.0);
    CHECK(noisy.std_errs[1] > 0.0);

    CHECK_THROWS_AS(fit_line({1.0}, {2.0}), DataError);
    CHECK_THROWS_AS(fit_line({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}), DataError);
}

TEST_CASE("polyfit reproduces polynomial coefficients exactly") {
    const auto x = linspace_local(-2.0, 2.0, 9);
    std::vector<double> y;
    for (double xi : x) y.push_back(0.25 - 1.5 * xi + 0.5 * xi * xi * xi);
    const std::vector<double> c = polyfit(x, y, 3);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(-1.5).epsilon(1e-10));
    CHECK(std::abs(c[2]) < 1e-10);
    CHECK(c[3] == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(polyfit({0.0, 1.0}, {0.0, 1.0}, 2), DataError);
}

TEST_CASE("FitResult flag lookup") {
    FitResult r;
    r.flags = {"poor-fit"};
    CHECK(r.has_flag("poor-fit"));
    CHECK_FALSE(r.has_flag("infinite-lifetime"));
}
