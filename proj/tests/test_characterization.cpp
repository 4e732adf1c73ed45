#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qmem/characterization.hpp"
#include "qmem/io.hpp"

using namespace qmem;

namespace {

const std::string data_dir = QMEM_DATA_DIR;

DecayScan synthetic_decay(double t_e, bool gaussian, double pressure, double noise_frac,
                          unsigned seed) {
    std::vector<double> t, eta;
    std::mt19937 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_frac);
    for (int i = 0; i < 14; ++i) {
        const double ti = 0.25 * i;
        const double u = ti / t_e;
        const double m = gaussian ? std::exp(-u * u) : std::exp(-u);
        t.push_back(ti);
        eta.push_back(std::max(0.0, 100.0 * m * (1.0 + noise(rng))));
    }
    return DecayScan(std::move(t), std::move(eta), pressure, 900.0);
}

}  // namespace

TEST_CASE("fit_lifetime recovers an exponential 1/e time from noisy data") {
    const DecayScan scan = synthetic_decay(1.0, false, 216.0, 0.03, 5);
    const FitResult fit = fit_lifetime(scan);
    REQUIRE(fit.converged);
    CHECK(fit.model == "lifetime-exponential");  // auto picks exponential above 25 mbar
    CHECK(fit.params[1] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(fit.std_errs[1] > 0.0);
}

TEST_CASE("fit_lifetime auto model selection follows the pressure cutoff") {
    const DecayScan low = synthetic_decay(0.8, true, 13.0, 0.0, 1);
    const DecayScan high = synthetic_decay(0.8, false, 25.0, 0.0, 1);
    CHECK(fit_lifetime(low).model == "lifetime-gaussian");
    CHECK(fit_lifetime(high).model == "lifetime-exponential");

    // noiseless data is recovered to fitting precision with either model
    CHECK(fit_lifetime(low).params[1] == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(fit_lifetime(high).params[1] == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("fit_lifetime flags constant data as infinite lifetime") {
    const DecayScan flat({0.0, 0.5, 1.0, 1.5, 2.0}, {40.0, 40.0, 40.0, 40.0, 40.0}, 100.0,
                         900.0);
    const FitResult fit = fit_lifetime(flat);
    CHECK(fit.has_flag("infinite-lifetime"));
    CHECK(std::isinf(fit.params[1]));
}

TEST_CASE("Gaussian decay data prefers the Gaussian model") {
    const DecayScan scan = synthetic_decay(1.2, true, 13.0, 0.0, 2);
    const FitResult g = fit_lifetime(scan, DecayModel::Gaussian);
    const FitResult e = fit_lifetime(scan, DecayModel::Exponential);
    CHECK(g.residual_norm < e.residual_norm);
}

TEST_CASE("DecayScan validation") {
    CHECK_THROWS_AS(DecayScan({0.0, 1.0}, {1.0}, 10.0, 900.0), DataError);
    CHECK_THROWS_AS(DecayScan({0.0, 1.0, 0.5}, {3.0, 2.0, 1.0}, 10.0, 900.0), DataError);
    CHECK_THROWS_AS(DecayScan({-0.5, 0.0}, {1.0, 1.0}, 10.0, 900.0), DataError);
    CHECK_THROWS_AS(DecayScan({0.0, 1.0}, {1.0, -0.1}, 10.0, 900.0), DataError);
    CHECK_THROWS_AS(fit_lifetime(DecayScan({0.0, 1.0, 2.0}, {3.0, 2.0, 1.0}, 10.0, 900.0)),
                    DataError);
}

TEST_CASE("bundled decay scans give sub-nanosecond lifetimes in the right model") {
    const CsvTable low = read_csv(data_dir + "/fig5_decay_13mbar.csv");
    const DecayScan scan_low(low.column("storage_time_ns"), low.column("efficiency_pct"),
                             13.0, 900.0);
    const FitResult g = fit_lifetime(scan_low);
    CHECK(g.model == "lifetime-gaussian");
    CHECK(g.params[1] == doctest::Approx(0.74).epsilon(0.10));

    const CsvTable high = read_csv(data_dir + "/fig5_decay_216mbar.csv");
    const DecayScan scan_high(high.column("storage_time_ns"), high.column("efficiency_pct"),
                              216.0, 900.0);
    const FitResult e = fit_lifetime(scan_high);
    CHECK(e.model == "lifetime-exponential");
    CHECK(e.params[1] == doctest::Approx(0.74).epsilon(0.10));
}

TEST_CASE("fit_lifetime_vs_pressure recovers the inverse-pressure coefficient") {
    const std::vector<double> p{50, 110, 216, 430, 650, 900};
    std::vector<double> t;
    for (double pi_ : p) t.push_back(160.0 / pi_);
    const FitResult fit = fit_lifetime_vs_pressure(p, t);
    CHECK(fit.params[0] == doctest::Approx(160.0).epsilon(1e-9));
    CHECK_FALSE(fit.has_flag("poor-fit"));

    CHECK_THROWS_AS(fit_lifetime_vs_pressure({100, 100, 100}, {1, 1, 1}), DataError);
    CHECK_THROWS_AS(fit_lifetime_vs_pressure({-5, 10, 20}, {1, 1, 1}), DataError);
}

TEST_CASE("a low-pressure plateau is flagged as a poor inverse fit") {
    // Doppler-limited plateau at low pressure, collisional tail at high pressure
    const std::vector<double> p{5, 13, 27, 55, 110, 216, 430, 900};
    std::vector<double> t;
    for (double pi_ : p) t.push_back(std::min(0.74, 160.0 / pi_));
    const FitResult fit = fit_lifetime_vs_pressure(p, t);
    CHECK(fit.has_flag("poor-fit"));
}

TEST_CASE("doppler_lifetime formula and limits") {
    const PhysicalConstantsConfig c = barium_argon_defaults();

    // no wavelength mismatch means no spin-wave phase grating
    CHECK(std::isinf(doppler_lifetime(1173.0, c.mass_atom, 1e-6, 1e-6)));

    const double t1 = doppler_lifetime(1173.0, c.mass_atom, c.lambda_signal, c.lambda_control);
    const double t4 = doppler_lifetime(4.0 * 1173.0, c.mass_atom, c.lambda_signal,
                                       c.lambda_control);
    CHECK(t1 == doctest::Approx(2.0 * t4).epsilon(1e-12));

    // barium at operating temperature dephases on sub-nanosecond timescales
    CHECK(t1 > 0.1e-9);
    CHECK(t1 < 1.0e-9);

    CHECK_THROWS_AS(doppler_lifetime(-1.0, c.mass_atom, c.lambda_signal, c.lambda_control),
                    GridError);
}

TEST_CASE("fit_linewidth_vs_pressure is an exact line fit") {
    const std::vector<double> p{13, 100, 300, 670, 900};
    std::vector<double> g;
    for (double pi_ : p) g.push_back(300.0 + 0.1 * pi_);
    const FitResult fit = fit_linewidth_vs_pressure(p, g);
    CHECK(fit.params[0] == doctest::Approx(300.0).epsilon(1e-9));
    CHECK(fit.params[1] == doctest::Approx(0.1).epsilon(1e-9));

    const FitResult flat = fit_linewidth_vs_pressure(p, {350, 350, 350, 350, 350});
    CHECK(std::abs(flat.params[1]) < 1e-12);
    CHECK_THROWS_AS(fit_linewidth_vs_pressure({100, 100}, {1, 2}), DataError);
}

TEST_CASE("bundled linewidth data stays in the 300 to 400 GHz band") {
    const CsvTable tab = read_csv(data_dir + "/fig1c_linewidth_vs_pressure.csv");
    const auto p = tab.column("pressure_mbar");
    const auto g = tab.column("linewidth_GHz");
    const FitResult fit = fit_linewidth_vs_pressure(p, g);
    REQUIRE(fit.converged);
    for (double pi_ : p) {
        const double model = fit.params[0] + fit.params[1] * pi_;
        CHECK(model > 300.0);
        CHECK(model < 400.0);
    }
}

TEST_CASE("collision kinetics for barium in argon") {
    const PhysicalConstantsConfig c = barium_argon_defaults();
    const auto radii = std::make_pair(c.radius_atom, c.radius_perturber);
    const auto masses = std::make_pair(c.mass_atom, c.mass_perturber);

    // 100 mbar = 1e4 Pa; collisions every few nanoseconds at operating temperature
    const CollisionKinetics k = collision_kinetics(1e4, 1100.0, radii, masses);
    CHECK(k.collision_time > 0.5e-9);
    CHECK(k.collision_time < 10e-9);
    CHECK(k.diffusion_coefficient > 0.0);

    const CollisionKinetics k2 = collision_kinetics(2e4, 1100.0, radii, masses);
    CHECK(k2.collision_time == doctest::Approx(0.5 * k.collision_time).epsilon(1e-12));
    CHECK(k.mean_free_path == doctest::Approx(2.0 * k2.mean_free_path).epsilon(1e-12));

    CHECK_THROWS_AS(collision_kinetics(0.0, 1100.0, radii, masses), GridError);
}

TEST_CASE("snr_to_fidelity") {
    CHECK(snr_to_fidelity(0.0) == doctest::Approx(0.0));
    CHECK(snr_to_fidelity(1.0) == doctest::Approx(0.5));
    CHECK(snr_to_fidelity(1800.0) == doctest::Approx(0.999445).epsilon(5e-5));
    double prev = -1.0;
    for (double s : {0.0, 0.5, 2.0, 10.0, 1e4}) {
        const double f = snr_to_fidelity(s);
        CHECK(f > prev);
        CHECK(f <= 1.0);
        prev = f;
    }
    CHECK_THROWS_AS(snr_to_fidelity(-0.5), GridError);
}

TEST_CASE("fit_snr_linear evaluates the line at one photon") {
    std::vector<double> n{0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
    std::vector<double> snr;
    for (double ni : n) snr.push_back(1800.0 * ni);
    CHECK(fit_snr_linear(n, snr).snr_at_one_photon == doctest::Approx(1800.0).epsilon(1e-9));

    CHECK(fit_snr_linear({0.5, 2.0}, {900.0, 3600.0}).snr_at_one_photon ==
          doctest::Approx(1800.0).epsilon(1e-9));
    CHECK(fit_snr_linear(n, std::vector<double>(n.size(), 0.0)).snr_at_one_photon ==
          doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(fit_snr_linear({0.5, -1.0}, {1.0, 2.0}), DataError);

    const CsvTable tab = read_csv(data_dir + "/fig3a_snr_vs_photon_number.csv");
    const SnrFit bundled = fit_snr_linear(tab.column("mean_photon_number"), tab.column("snr"));
    CHECK(bundled.snr_at_one_photon == doctest::Approx(1800.0).epsilon(0.05));
}

TEST_CASE("figures of merit") {
    const FiguresOfMerit tbp = figures_of_merit(980.0 / 880e9, 880e9, 1e9, 1.0, 1e9, 1e9);
    CHECK(tbp.tbp == doctest::Approx(980.0).epsilon(1e-12));

    const FiguresOfMerit trp = figures_of_merit(0.25, 1e9, 2e9, 1.0, 1e9, 1e9);
    CHECK(trp.trp == doctest::Approx(5e8).epsilon(1e-12));

    const FiguresOfMerit cold = figures_of_merit(1.0, 1e9, 1e9, 50.0, 240e9, 120e6);
    CHECK(cold.cold_od == doctest::Approx(1e5).epsilon(1e-12));

    CHECK_THROWS_AS(figures_of_merit(0.0, 1.0, 1.0, 1.0, 1.0, 1.0), GridError);
}

TEST_CASE("fit_frequency_response recovers Gaussian spectra") {
    auto gauss = [](double x, double a, double x0, double w) {
        return a * std::exp(-4.0 * std::log(2.0) * (x - x0) * (x - x0) / (w * w));
    };
    std::vector<double> x, y;
    for (int k = -10; k <= 20; ++k) {
        x.push_back(0.5 * k);
        y.push_back(gauss(0.5 * k, 0.9, 5.0, 4.0));
    }
    const FitResult fit = fit_frequency_response(x, y);
    REQUIRE(fit.converged);
    CHECK(fit.params[1] == doctest::Approx(5.0).epsilon(0.02));
    CHECK(std::abs(fit.params[2]) == doctest::Approx(4.0).epsilon(0.02));

    // reordering the samples leaves the fit unchanged
    std::vector<double> xr(x.rbegin(), x.rend()), yr(y.rbegin(), y.rend());
    const FitResult rev = fit_frequency_response(xr, yr);
    CHECK(rev.params[1] == doctest::Approx(fit.params[1]).epsilon(1e-9));

    // a storage spectrum is wider than the two-pulse spectrum by sqrt(2)
    std::vector<double> y2;
    for (double xi : x) y2.push_back(gauss(xi, 0.9, 5.0, 4.0 / std::sqrt(2.0)));
    const FitResult narrow = fit_frequency_response(x, y2);
    CHECK(std::abs(fit.params[2] / narrow.params[2]) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(0.05));

    const FitResult flat = fit_frequency_response({0, 1, 2, 3}, {0.4, 0.4, 0.4, 0.4});
    CHECK(flat.has_flag("zero-amplitude"));
    CHECK_THROWS_AS(fit_frequency_response({0, 1, 2}, {0.1, 0.2, 0.1}), DataError);
}
