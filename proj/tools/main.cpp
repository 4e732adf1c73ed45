#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "qmem/characterization.hpp"
#include "qmem/interferometry.hpp"
#include "qmem/io.hpp"
#include "qmem/norm.hpp"
#include "qmem/solver.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace qmem;

namespace {

constexpr const char* tool_version = "1.0.0";

// Exit-code contract: 0 success, 1 numerical failure, 2 usage or config
// error, 3 data-quality rejection. Partial sweep success also maps to 1.
constexpr int exit_ok = 0;
constexpr int exit_numerical = 1;
constexpr int exit_usage = 2;
constexpr int exit_data = 3;

struct RunContext {
    std::string config_path;
    fs::path out_dir = ".";
    int jobs = 1;
    bool dump_fields = false;
    bool verify = false;

    Config config;
    std::vector<fs::path> inputs;   // config first, then data files
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    fs::path resolve_input(const std::string& key) {
        fs::path p = config.require(key);
        if (p.is_relative() && !config_path.empty())
            p = fs::path(config_path).parent_path() / p;
        if (!fs::exists(p)) throw ConfigError(key + ": file not found: " + p.string());
        inputs.push_back(p);
        return p;
    }

    void write_json(const std::string& name, const json& j) {
        fs::create_directories(out_dir);
        std::ofstream f(out_dir / name);
        f << j.dump(2) << "\n";
        outputs.push_back(name);
    }

    void write_table(const std::string& name, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
        fs::create_directories(out_dir);
        write_csv(out_dir / name, columns, rows);
        outputs.push_back(name);
    }

    void write_manifest() {
        json inputs_j = json::object();
        for (const auto& p : inputs) inputs_j[p.string()] = file_digest(p);
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);
        json m{{"tool_version", tool_version},
               {"config_digest", fnv1a_hex(config.serialize())},
               {"inputs", inputs_j},
               {"duration_ms", elapsed.count()},
               {"outputs", outputs}};
        // write to a temporary name first so a complete manifest always
        // implies complete outputs
        fs::create_directories(out_dir);
        const fs::path tmp = out_dir / "manifest.json.tmp";
        {
            std::ofstream f(tmp);
            f << m.dump(2) << "\n";
        }
        fs::rename(tmp, out_dir / "manifest.json");
    }

    // Digest-checks the inputs recorded by a previous run in this out dir.
    int verify_manifest() {
        const fs::path mp = out_dir / "manifest.json";
        if (!fs::exists(mp)) throw ConfigError("--verify: no manifest.json in " +
                                               out_dir.string());
        std::ifstream f(mp);
        json m = json::parse(f);
        bool ok = true;
        for (const auto& [path, digest] : m.at("inputs").items()) {
            if (!fs::exists(path)) {
                std::cerr << "missing input: " << path << "\n";
                ok = false;
                continue;
            }
            const std::string now = file_digest(path);
            if (now != digest.get<std::string>()) {
                std::cerr << "digest mismatch: " << path << " recorded " << digest
                          << " now " << now << "\n";
                ok = false;
            }
        }
        std::cout << (ok ? "verified: all input digests match\n" : "verification failed\n");
        return ok ? exit_ok : exit_data;
    }
};

MemoryParams memory_from_config(const Config& cfg) {
    return MemoryParams(cfg.require_double("memory.d"), cfg.require_double("memory.tau_gamma"),
                        cfg.get_double("memory.detuning", 0.0),
                        cfg.get_double("memory.gamma_b", 0.0));
}

ControlPulse control_from_config(const Config& cfg, const std::string& section) {
    return ControlPulse(cfg.require_double(section + ".area"),
                        cfg.require_double(section + ".delay"),
                        cfg.require_double(section + ".duration"));
}

GridConfig grid_from_config(const Config& cfg, const MemoryParams& memory,
                            const ControlPulse& storage,
                            const std::optional<ControlPulse>& retrieval,
                            double retrieval_delay) {
    if (cfg.has("grid.n_t"))
        return GridConfig(cfg.get_int("grid.n_z", 200), cfg.get_int("grid.n_t", 1024),
                          cfg.require_double("grid.t_start"), cfg.require_double("grid.t_end"));
    return default_grid(memory, storage, retrieval, retrieval_delay,
                        cfg.get_int("grid.n_z", 200));
}

json ledger_json(const EnergyLedger& l) {
    return json{{"e_in", l.e_in},           {"e_out", l.e_out},
                {"e_pol_final", l.e_pol_final}, {"e_spin_final", l.e_spin_final},
                {"e_pol_decay", l.e_pol_decay}, {"e_spin_decay", l.e_spin_decay},
                {"closure_error", l.closure_error()}};
}

json fit_json(const FitResult& fit) {
    return json{{"model", fit.model},
                {"params", fit.params},
                {"std_errs", fit.std_errs},
                {"residual_norm", fit.residual_norm},
                {"converged", fit.converged},
                {"flags", fit.flags}};
}

int cmd_simulate(RunContext& ctx, std::optional<double> control_area_override) {
    const MemoryParams memory = memory_from_config(ctx.config);
    ControlPulse storage = control_from_config(ctx.config, "control");
    if (control_area_override)
        storage = ControlPulse(*control_area_override, storage.delay, storage.duration);

    std::optional<ControlPulse> retrieval;
    double retrieval_delay = 0.0;
    if (ctx.config.has("retrieval.delay")) {
        retrieval_delay = ctx.config.require_double("retrieval.delay");
        retrieval = ControlPulse(ctx.config.get_double("retrieval.area", storage.area),
                                 storage.delay,
                                 ctx.config.get_double("retrieval.duration", storage.duration));
    }

    const GridConfig grid = grid_from_config(ctx.config, memory, storage, retrieval,
                                             retrieval_delay);
    const TemporalField signal = gaussian_signal(memory.tau_gamma, grid.time_grid(), 0.0);
    SolveOptions options;
    options.record_fields = ctx.dump_fields;
    const SolveResult r = solve(memory, signal, storage, retrieval, retrieval_delay, grid,
                                options);

    ctx.write_json("efficiencies.json",
                   json{{"eta_store", r.eta_store},
                        {"eta_ret", r.eta_ret},
                        {"eta_tot", r.eta_tot},
                        {"tau_mid", r.tau_mid},
                        {"ledger", ledger_json(r.ledger)}});

    if (ctx.dump_fields && r.fields) {
        const FieldHistory& h = *r.fields;
        const TimeGrid tg = grid.time_grid();
        std::vector<std::vector<double>> rows;
        rows.reserve(static_cast<std::size_t>(h.n_t) * h.n_z);
        for (int it = 0; it < h.n_t; ++it)
            for (int iz = 0; iz < h.n_z; ++iz) {
                const cplx a = h.at(h.a, it, iz), p = h.at(h.p, it, iz), b = h.at(h.b, it, iz);
                rows.push_back({r.z[static_cast<std::size_t>(iz)], tg.at(it), a.real(),
                                a.imag(), p.real(), p.imag(), b.real(), b.imag()});
            }
        ctx.write_table("fields.csv",
                        {"z", "tau", "re_a", "im_a", "re_p", "im_p", "re_b", "im_b"}, rows);
    }
    return exit_ok;
}

int sweep_detuning_cmd(RunContext& ctx) {
    const MemoryParams memory = memory_from_config(ctx.config);
    const ControlPulse control = control_from_config(ctx.config, "control");
    std::vector<double> deltas;
    if (ctx.config.has("sweep.delta_points")) {
        const int n = ctx.config.get_int("sweep.delta_points", 0);
        if (n < 2) throw ConfigError("sweep.delta_points: need at least 2 points");
        deltas = linspace(ctx.config.require_double("sweep.delta_min"),
                          ctx.config.require_double("sweep.delta_max"), n);
    } else {
        deltas = default_detunings(memory);
    }
    const double rd = ctx.config.get_double("sweep.retrieval_delay",
                                            default_retrieval_delay(memory));

    const DetuningSweep sweep = sweep_detuning(memory, control, deltas, rd, ctx.jobs);
    std::vector<std::vector<double>> rows;
    for (const auto& p : sweep.points)
        rows.push_back({p.delta, p.eta_store, p.eta_tot, p.ok ? 1.0 : 0.0});
    ctx.write_table("detuning_sweep.csv",
                    {"delta_over_gamma", "eta_store", "eta_tot", "ok"}, rows);

    json summary{{"kind", "detuning"}, {"complete", sweep.complete}};
    const DetuningOptimum opt = optimal_detuning(sweep);
    summary["delta_opt"] = opt.delta_opt;
    summary["eta_max"] = opt.eta_max;
    summary["degenerate"] = opt.degenerate;
    try {
        summary["norm_predicate"] = norm_predicate(memory, control);
    } catch (const UndefinedAdiabaticity&) {
        summary["norm_predicate"] = nullptr;
    }
    ctx.write_json("summary.json", summary);
    return sweep.complete ? exit_ok : exit_numerical;
}

int sweep_area_cmd(RunContext& ctx) {
    const MemoryParams memory = memory_from_config(ctx.config);
    const ControlPulse tmpl = control_from_config(ctx.config, "control");
    const int n = ctx.config.get_int("sweep.theta_points", 0);
    if (n < 2) throw ConfigError("sweep.theta_points: need at least 2 points");
    const std::vector<double> areas = linspace(ctx.config.require_double("sweep.theta_min"),
                                               ctx.config.require_double("sweep.theta_max"), n);

    // one grid wide enough for the largest pulse in the scan
    const GridConfig grid = grid_from_config(
        ctx.config, memory, ControlPulse(std::max(areas.back(), 1e-3), tmpl.delay,
                                         tmpl.duration),
        std::nullopt, 0.0);
    const AreaScan scan = sweep_pulse_area(memory, tmpl, areas, grid, ctx.jobs);

    std::vector<std::vector<double>> rows;
    for (const auto& p : scan.points)
        rows.push_back({p.theta, p.eta_store, p.ok ? 1.0 : 0.0});
    ctx.write_table("area_scan.csv", {"theta_over_pi", "eta_store", "ok"}, rows);

    json summary{{"kind", "area"}, {"complete", scan.complete}};
    if (scan.first_maximum) {
        summary["theta_argmax"] = scan.first_maximum->first;
        summary["eta_max"] = scan.first_maximum->second;
    }
    ctx.write_json("summary.json", summary);
    return scan.complete ? exit_ok : exit_numerical;
}

int sweep_matrix_cmd(RunContext& ctx) {
    bool all_complete = true;
    json cells = json::array();
    for (const auto& protocol : regime_presets())
        for (const auto& regime : regime_presets()) {
            const std::vector<double> deltas = default_detunings(regime.memory);
            const double rd = default_retrieval_delay(regime.memory);
            const DetuningSweep sweep =
                sweep_detuning(regime.memory, protocol.control, deltas, rd, ctx.jobs);
            all_complete = all_complete && sweep.complete;

            std::vector<std::vector<double>> rows;
            for (const auto& p : sweep.points)
                rows.push_back({p.delta, p.eta_store, p.eta_tot, p.ok ? 1.0 : 0.0});
            std::string name = "fig6_" + protocol.name + "_in_" + regime.name + ".csv";
            ctx.write_table(name, {"delta_over_gamma", "eta_store", "eta_tot", "ok"}, rows);

            const DetuningOptimum opt = optimal_detuning(sweep);
            cells.push_back(json{{"protocol", protocol.name},
                                 {"regime", regime.name},
                                 {"complete", sweep.complete},
                                 {"delta_opt", opt.delta_opt},
                                 {"eta_max", opt.eta_max},
                                 {"degenerate", opt.degenerate},
                                 {"off_resonant", std::abs(opt.delta_opt) > 0.5},
                                 {"predicate",
                                  norm_predicate(regime.memory, protocol.control)}});
        }
    ctx.write_json("fig6_summary.json",
                   json{{"kind", "fig6-matrix"}, {"complete", all_complete},
                        {"cells", cells}});
    return all_complete ? exit_ok : exit_numerical;
}

int cmd_sweep(RunContext& ctx) {
    const std::string kind = ctx.config.require("sweep.kind");
    if (kind == "detuning") return sweep_detuning_cmd(ctx);
    if (kind == "area") return sweep_area_cmd(ctx);
    if (kind == "fig6-matrix") return sweep_matrix_cmd(ctx);
    throw ConfigError("sweep.kind: expected detuning, area or fig6-matrix, got " + kind);
}

std::pair<std::vector<double>, std::vector<double>> two_columns(const CsvTable& tab,
                                                                const std::string& cx,
                                                                const std::string& cy) {
    const auto has = [&](const std::string& c) {
        return std::find(tab.columns.begin(), tab.columns.end(), c) != tab.columns.end();
    };
    if (!has(cx) || !has(cy))
        throw ConfigError("fit input must have columns: " + cx + ", " + cy);
    return {tab.column(cx), tab.column(cy)};
}

int cmd_fit(RunContext& ctx) {
    const std::string model = ctx.config.require("fit.model");
    const CsvTable tab = read_csv(ctx.resolve_input("fit.input"));

    FitResult fit;
    std::vector<double> x, y;
    json extra = json::object();

    if (model == "lifetime") {
        std::tie(x, y) = two_columns(tab, "storage_time_ns", "efficiency_pct");
        const DecayScan scan(x, y, ctx.config.get_double("fit.pressure_mbar", 100.0),
                             ctx.config.get_double("fit.temperature_c", 900.0));
        fit = fit_lifetime(scan);
    } else if (model == "lifetime-vs-pressure") {
        std::tie(x, y) = two_columns(tab, "pressure_mbar", "lifetime_ns");
        fit = fit_lifetime_vs_pressure(x, y);
    } else if (model == "linewidth") {
        std::tie(x, y) = two_columns(tab, "pressure_mbar", "linewidth_GHz");
        fit = fit_linewidth_vs_pressure(x, y);
    } else if (model == "snr") {
        std::tie(x, y) = two_columns(tab, "mean_photon_number", "snr");
        const SnrFit s = fit_snr_linear(x, y);
        fit = s.fit;
        extra["snr_at_one_photon"] = s.snr_at_one_photon;
        extra["fidelity_at_one_photon"] = snr_to_fidelity(std::max(0.0, s.snr_at_one_photon));
    } else if (model == "visibility") {
        std::tie(x, y) = two_columns(tab, "integration_time_s", "visibility");
        fit = fit_visibility(x, y);
    } else if (model == "frequency-response") {
        std::tie(x, y) = two_columns(tab, "detuning_over_gamma", "efficiency");
        fit = fit_frequency_response(x, y);
    } else {
        throw ConfigError("fit.model: expected lifetime, lifetime-vs-pressure, linewidth, "
                          "snr, visibility or frequency-response, got " + model);
    }

    json out = fit_json(fit);
    for (auto& [k, v] : extra.items()) out[k] = v;
    ctx.write_json("fit.json", out);

    // residuals against the fitted model, evaluated from the reported params
    auto predict = [&](double xi) -> double {
        const auto& p = fit.params;
        if (model == "lifetime")
            return fit.model == "lifetime-gaussian"
                       ? p[0] * std::exp(-(xi / p[1]) * (xi / p[1]))
                       : p[0] * std::exp(-xi / p[1]);
        if (model == "lifetime-vs-pressure") return p[0] / xi;
        if (model == "linewidth" || model == "snr") return p[0] + p[1] * xi;
        if (model == "visibility") {
            const double sigma = p[0] * std::pow(xi, p[1]);
            return std::exp(-2.0 * sigma * sigma);
        }
        const double u = xi - p[1];
        return p[0] * std::exp(-four_ln2 * u * u / (p[2] * p[2]));
    };
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double m = predict(x[i]);
        rows.push_back({x[i], y[i], m, y[i] - m});
    }
    ctx.write_table("residuals.csv", {"x", "y", "model", "residual"}, rows);
    return fit.converged ? exit_ok : exit_numerical;
}

int cmd_reconstruct(RunContext& ctx) {
    const CsvTable ig_tab = read_csv(ctx.resolve_input("reconstruct.interferogram"));
    const CsvTable ref_tab = read_csv(ctx.resolve_input("reconstruct.reference"));
    const CsvTable unk_tab = read_csv(ctx.resolve_input("reconstruct.unknown_magnitude"));
    const double delta_tau = ctx.config.require_double("reconstruct.delta_tau");

    const std::vector<double> omega = ig_tab.column("omega");
    double max_dw = 0.0;
    for (std::size_t i = 1; i < omega.size(); ++i)
        max_dw = std::max(max_dw, omega[i] - omega[i - 1]);
    if (max_dw * std::abs(delta_tau) > 0.5 * pi)
        throw DataError("reconstruct: fringes not resolvable, max d_omega * delta_tau = " +
                        std::to_string(max_dw * std::abs(delta_tau)) + " exceeds pi/2");

    const Interferogram ig(omega, ig_tab.column("counts"), delta_tau);
    const Reconstruction rec = reconstruct_phase(ig, ref_tab.column("amplitude"),
                                                 unk_tab.column("amplitude"),
                                                 ref_tab.column("phase"));

    std::size_t support_size = 0;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rec.a2.size(); ++i) {
        if (!rec.in_support[i]) continue;
        ++support_size;
        rows.push_back({rec.a2.omega[i], rec.a2.amplitude[i], rec.a2.phase[i], 1.0});
    }
    ctx.write_table("reconstruction.csv", {"omega", "magnitude", "phase_rad", "in_support"},
                    rows);

    const TimeGrid grid(ctx.config.get_double("reconstruct.t_start", -20.0),
                        ctx.config.get_double("reconstruct.t_end", 20.0),
                        ctx.config.get_int("reconstruct.n_t", 1024));
    const TimeDomainReport report = reconstruct_time_domain(rec.a2, grid);

    json out{{"support_size", support_size},
             {"clamp_fraction", rec.clamp_fraction},
             {"low_confidence", rec.low_confidence},
             {"c1", report.c1},
             {"c2", report.c2}};

    // optional known truth for synthetic bundles: report the phase error
    if (ctx.config.has("reconstruct.truth_phase")) {
        const CsvTable truth = read_csv(ctx.resolve_input("reconstruct.truth_phase"));
        const std::vector<double> phi = truth.column("phase");
        if (phi.size() != rec.a2.size())
            throw DataError("reconstruct.truth_phase: row count does not match interferogram");
        double s = 0.0;
        for (std::size_t i = 0; i < rec.a2.size(); ++i) {
            if (!rec.in_support[i]) continue;
            const double d = rec.a2.phase[i] - phi[i];
            s += d * d;
        }
        out["phase_rms_error"] = std::sqrt(s / support_size);
    }
    ctx.write_json("reconstruction.json", out);
    return exit_ok;
}

int cmd_metrics(RunContext& ctx) {
    const FiguresOfMerit fom = figures_of_merit(
        ctx.config.require_double("metrics.lifetime_s"),
        ctx.config.require_double("metrics.bandwidth_hz"),
        ctx.config.require_double("metrics.clock_rate_hz"),
        ctx.config.require_double("metrics.d"),
        ctx.config.require_double("metrics.linewidth_hz"),
        ctx.config.require_double("metrics.natural_linewidth_hz"));
    json out{{"tbp", fom.tbp}, {"trp", fom.trp}, {"cold_od", fom.cold_od}};
    if (ctx.config.has("metrics.snr"))
        out["fidelity"] = snr_to_fidelity(ctx.config.require_double("metrics.snr"));
    ctx.write_json("metrics.json", out);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lambda-system quantum memory simulation and analysis toolkit"};
    app.require_subcommand(1);

    RunContext ctx;
    app.add_option("--config", ctx.config_path, "configuration file (key=value sections)");
    app.add_option("--out", ctx.out_dir, "output directory");
    app.add_option("--jobs", ctx.jobs, "worker thread cap for sweeps")
        ->check(CLI::PositiveNumber);
    app.add_flag("--dump-fields", ctx.dump_fields, "write the full field history");
    app.add_flag("--verify", ctx.verify, "check input digests against the existing manifest");

    auto* simulate = app.add_subcommand("simulate", "single storage/retrieval solve");
    std::optional<double> control_area_override;
    simulate->add_option("--control-area", control_area_override,
                         "override the storage control pulse area");
    auto* sweep = app.add_subcommand("sweep", "detuning, area or fig6-matrix sweep");
    auto* fit = app.add_subcommand("fit", "fit an experimental CSV");
    auto* reconstruct = app.add_subcommand("reconstruct",
                                           "phase reconstruction from an interferogram");
    auto* metrics = app.add_subcommand("metrics", "figures of merit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (ctx.verify) return ctx.verify_manifest();

        if (ctx.config_path.empty()) throw ConfigError("--config is required");
        ctx.config = load_config(ctx.config_path);
        ctx.inputs.push_back(ctx.config_path);

        int code = exit_usage;
        if (simulate->parsed()) code = cmd_simulate(ctx, control_area_override);
        else if (sweep->parsed()) code = cmd_sweep(ctx);
        else if (fit->parsed()) code = cmd_fit(ctx);
        else if (reconstruct->parsed()) code = cmd_reconstruct(ctx);
        else if (metrics->parsed()) code = cmd_metrics(ctx);
        ctx.write_manifest();
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return exit_usage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}
