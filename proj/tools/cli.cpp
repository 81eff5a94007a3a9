#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numeric>

#include "CLI11.hpp"
#include "cascade_clock/angles.hpp"
#include "cascade_clock/errors.hpp"
#include "cascade_clock/measurement.hpp"
#include "cascade_clock/oscillator.hpp"
#include "json_config.hpp"
#include "output.hpp"
#include "version.hpp"

namespace cascade_clock::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::vector<SchemeSpec> select_curves(const std::string& scheme, const std::string& model, double ratio,
                                      std::optional<double> width, std::optional<TieRule> tie_rule) {
    std::vector<Scheme> schemes;
    if (scheme == "all") {
        schemes = {Scheme::reduced_frequency, Scheme::reduced_period};
    } else {
        schemes = {parse_scheme(scheme)};
    }
    std::vector<MeasurementKind> models;
    if (model == "all") {
        models = {MeasurementKind::ramsey, MeasurementKind::gaussian};
    } else {
        models = {parse_measurement_kind(model)};
    }
    std::vector<SchemeSpec> curves;
    for (auto m : models) {
        for (auto s : schemes) {
            SchemeSpec spec{s, m, ratio, std::nullopt, tie_rule};
            if (m == MeasurementKind::gaussian) {
                spec.gaussian_width =
                    width.value_or(s == Scheme::reduced_frequency ? kFig2WidthReducedFrequency : kFig2WidthReducedPeriod);
            }
            spec.validate();
            curves.push_back(spec);
        }
    }
    return curves;
}

std::vector<Fig2Curve> compute_fig2(const Fig2Options& options) {
    if (options.grid < 1) throw ValidationError("grid must be >= 1");
    if (!(options.fit_min_p > 0.0) || !(options.fit_max_p >= options.fit_min_p)) {
        throw ValidationError("fit window needs 0 < fit-min-p <= fit-max-p");
    }
    std::vector<Fig2Curve> curves;
    for (const auto& spec : options.curves) {
        const int first = options.n_min > 0 ? options.n_min : spec.smallest_atoms();
        const int last = options.n_max > 0 ? options.n_max : (spec.model == MeasurementKind::ramsey ? 60 : 32);
        if (first > last) throw ValidationError("n-min exceeds n-max");
        std::vector<int> atoms;
        for (int n = first; n <= last; ++n) {
            if (spec.accepts_atoms(n)) atoms.push_back(n);
        }
        if (atoms.empty()) throw ValidationError("no valid N in range for " + spec.label());
        Fig2Curve curve{spec, error_curve(spec, atoms, options.grid), {}, std::nullopt};
        for (const auto& point : curve.points) {
            if (point.probability >= options.fit_min_p && point.probability <= options.fit_max_p) {
                curve.fitted.push_back(point);
            }
        }
        if (curve.fitted.size() >= 3) curve.fit = fit_exponential(curve.fitted);
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<MinNRow> compute_min_n(double target_p, const std::vector<SchemeSpec>& curves, int grid) {
    std::vector<MinNRow> rows;
    for (const auto& spec : curves) rows.push_back({spec, min_ensemble_size_optimized(target_p, spec, grid)});
    return rows;
}

std::vector<Fig3Series> compute_fig3(int atoms, double width, const std::vector<double>& shifts) {
    const GaussianStateSpec spec{atoms, width};
    const auto amplitudes = gaussian_amplitudes(spec);
    std::vector<Fig3Series> series;
    Fig3Series initial{"initial", {}};
    for (double a : amplitudes) initial.probabilities.push_back(a * a);
    series.push_back(std::move(initial));
    const double delta = kTwoPi / (atoms + 1);
    for (double shift : shifts) {
        const auto dist = phase_state_distribution(amplitudes, shift * delta);
        Fig3Series s{"shift=" + format_number(shift), {}};
        for (const auto& o : dist.outcomes) s.probabilities.push_back(o.probability);
        series.push_back(std::move(s));
    }
    return series;
}

std::vector<DdRow> compute_dd_verify(double ratio, const std::vector<int>& levels, double cycle_length,
                                     const std::vector<double>& coefficients) {
    const PolynomialDetuning detuning{coefficients};
    const double full = detuning.integral(0.0, cycle_length);
    std::vector<DdRow> rows;
    for (int j : levels) {
        const auto seq = dd_pulse_times(cycle_length, ratio, j);
        DdRow row;
        row.level = j;
        row.t_a = seq.pulse_times[0];
        row.t_b = seq.pulse_times[1];
        row.phase = dd_accumulated_phase(detuning, seq);
        row.ideal = std::pow(ratio, -j) * full;
        const double error = row.phase - row.ideal;
        row.relative_error = row.ideal != 0.0 ? std::abs(error / row.ideal) : std::abs(error);
        rows.push_back(row);
    }
    return rows;
}

namespace {

struct Common {
    std::string out = ".";
};

std::optional<TieRule> tie_rule_from(const std::string& text) {
    if (text.empty() || text == "default") return std::nullopt;
    return parse_tie_rule(text);
}

Json optional_number(const std::optional<double>& value) { return value ? Json(*value) : Json(nullptr); }

void finish(RunManifest manifest, const fs::path& out_dir, std::vector<fs::path> artifacts) {
    const auto manifest_path = out_dir / (manifest.subcommand + ".manifest.json");
    for (const auto& a : artifacts) manifest.artifacts.push_back(a.generic_string());
    manifest.artifacts.push_back(manifest_path.generic_string());
    write_json(manifest_path, manifest.to_json());
    for (const auto& a : manifest.artifacts) std::cout << "wrote " << a << '\n';
}

struct Fig2Args {
    std::string scheme = "all";
    std::string model = "all";
    double ratio = 2.0;
    std::optional<double> width;
    int n_min = 0;
    int n_max = 0;
    double fit_min_p = 1e-9;
    double fit_max_p = 1e-2;
    int grid = kDefaultPhaseGrid;
    std::string tie_rule = "default";
};

void run_fig2(const Fig2Args& args, const Common& common) {
    Fig2Options options;
    options.curves = select_curves(args.scheme, args.model, args.ratio, args.width, tie_rule_from(args.tie_rule));
    options.n_min = args.n_min;
    options.n_max = args.n_max;
    options.fit_min_p = args.fit_min_p;
    options.fit_max_p = args.fit_max_p;
    options.grid = args.grid;
    const auto curves = compute_fig2(options);

    const fs::path out(common.out);
    const auto curve_path = out / "fig2.csv";
    const auto fit_path = out / "fig2_fit.csv";
    {
        CsvWriter csv(curve_path, {"scheme", "model", "N", "p"});
        for (const auto& c : curves) {
            for (const auto& p : c.points) {
                csv.field(to_string(c.spec.scheme)).field(to_string(c.spec.model)).field(p.atoms).field(p.probability);
                csv.end_row();
            }
        }
    }
    {
        CsvWriter csv(fit_path, {"scheme", "model", "A", "b", "residual", "points"});
        for (const auto& c : curves) {
            if (!c.fit) {
                std::cout << c.spec.label() << ": " << c.fitted.size() << " points in fit window, no fit\n";
                continue;
            }
            csv.field(to_string(c.spec.scheme)).field(to_string(c.spec.model));
            csv.field(c.fit->prefactor).field(c.fit->rate).field(c.fit->residual);
            csv.field(static_cast<long long>(c.fitted.size()));
            csv.end_row();
            std::cout << c.spec.label() << ": p = " << format_number(c.fit->prefactor) << " exp(-"
                      << format_number(c.fit->rate) << " N)\n";
        }
    }

    RunManifest manifest{"fig2"};
    manifest.parameters = {{"scheme", args.scheme},       {"model", args.model},
                           {"ratio", args.ratio},         {"width", optional_number(args.width)},
                           {"n-min", args.n_min},         {"n-max", args.n_max},
                           {"fit-min-p", args.fit_min_p}, {"fit-max-p", args.fit_max_p},
                           {"grid", args.grid},           {"tie-rule", args.tie_rule},
                           {"out", common.out}};
    finish(std::move(manifest), out, {curve_path, fit_path});
}

struct Fig3Args {
    int atoms = 20;
    double width = 0.7;
    std::vector<double> shifts = {-2.0, 0.0, 2.0, 2.5};
};

void run_fig3(const Fig3Args& args, const Common& common) {
    const auto series = compute_fig3(args.atoms, args.width, args.shifts);
    const fs::path out(common.out);
    const auto path = out / "fig3.csv";
    {
        CsvWriter csv(path, {"series", "index", "probability"});
        for (const auto& s : series) {
            for (std::size_t i = 0; i < s.probabilities.size(); ++i) {
                csv.field(s.name).field(static_cast<long long>(i)).field(s.probabilities[i]);
                csv.end_row();
            }
        }
    }
    RunManifest manifest{"fig3"};
    manifest.parameters = {
        {"atoms", args.atoms}, {"width", args.width}, {"shifts", args.shifts}, {"out", common.out}};
    finish(std::move(manifest), out, {path});
}

struct MinNArgs {
    double target_p = 2e-9;
    double ratio = 2.0;
    std::string scheme = "all";
    std::string model = "all";
    int grid = kDefaultPhaseGrid;
    std::string tie_rule = "default";
};

void run_min_n(const MinNArgs& args, const Common& common) {
    const auto curves = select_curves(args.scheme, args.model, args.ratio, std::nullopt, tie_rule_from(args.tie_rule));
    const auto rows = compute_min_n(args.target_p, curves, args.grid);
    const fs::path out(common.out);
    const auto path = out / "min_n.csv";
    {
        CsvWriter csv(path, {"scheme", "model", "N", "p", "width"});
        for (const auto& r : rows) {
            csv.field(to_string(r.spec.scheme)).field(to_string(r.spec.model));
            csv.field(r.result.atoms).field(r.result.probability);
            if (r.result.width) {
                csv.field(*r.result.width);
            } else {
                csv.empty();
            }
            csv.end_row();
            std::cout << r.spec.label() << ": N = " << r.result.atoms;
            if (r.result.width) std::cout << ", c = " << format_number(*r.result.width);
            std::cout << '\n';
        }
    }
    RunManifest manifest{"min-n"};
    manifest.parameters = {{"target-p", args.target_p}, {"ratio", args.ratio}, {"scheme", args.scheme},
                           {"model", args.model},       {"grid", args.grid},   {"tie-rule", args.tie_rule},
                           {"out", common.out}};
    finish(std::move(manifest), out, {path});
}

struct SimulateArgs {
    std::string scheme = "reduced-frequency";
    std::string model = "ramsey";
    int atoms = 46;
    int levels = 3;
    double ratio = 2.0;
    double width = 0.735;
    double alpha = 1e-3;
    double omega = 1.0;
    double period = 0.0;
    long long cycles = 100000;
    std::uint64_t seed = 1;
    std::string noise = "per-interval-gaussian";
    std::string reduction = "frequency-division";
    int decoupling_cycles = 1;
    std::vector<int> taus = {1, 2, 4, 8, 16, 32, 64};
    bool trace = false;
};

ClockConfig clock_config_from(const SimulateArgs& args) {
    ClockConfig config;
    config.atomic_frequency = args.omega;
    config.noise = {args.alpha, parse_noise_kind(args.noise)};
    config.cascade.scheme = parse_scheme(args.scheme);
    config.cascade.ensembles = args.levels;
    config.cascade.ratio = args.ratio;
    config.cascade.atoms_per_ensemble = args.atoms;
    config.measurement = parse_clock_measurement(args.model);
    config.gaussian_width = args.width;
    config.reduction = parse_phase_reduction(args.reduction);
    config.decoupling_cycles = args.decoupling_cycles;
    config.cycles = args.cycles;
    config.seed = args.seed;
    if (args.period > 0.0) {
        config.cascade.base_period = args.period;
    } else if (args.alpha > 0.0) {
        config.cascade.base_period = config.longest_probe_period();
    } else {
        throw ValidationError("period: must be given when alpha is 0");
    }
    config.validate();
    return config;
}

void run_simulate(const SimulateArgs& args, const Common& common) {
    const auto config = clock_config_from(args);
    const auto run = simulate_clock(config);
    const auto points = allan_deviation(run.fractional_frequency, run.cycle_period, args.taus);

    const fs::path out(common.out);
    const auto allan_path = out / "allan.csv";
    const auto summary_path = out / "simulate_summary.json";
    std::vector<fs::path> artifacts{allan_path, summary_path};

    const bool single = config.measurement == ClockMeasurement::single_quadrature;
    const int ensembles = config.cascade.ensembles;
    {
        CsvWriter csv(allan_path, {"tau_cycles", "tau", "sigma_y", "cascade_stability", "standard_ramsey_stability"});
        for (std::size_t i = 0; i < points.size(); ++i) {
            csv.field(args.taus[i]).field(points[i].tau).field(points[i].sigma_y);
            if (args.alpha > 0.0) {
                if (single) {
                    csv.empty();
                } else {
                    csv.field(cascade_stability(args.omega, args.alpha, args.atoms, ensembles, args.ratio, points[i].tau));
                }
                const int total_atoms = single ? args.atoms : args.atoms * ensembles;
                csv.field(standard_ramsey_stability(args.omega, args.alpha, total_atoms, 1, points[i].tau));
            } else {
                csv.empty().empty();
            }
            csv.end_row();
        }
    }

    const auto& y = run.fractional_frequency;
    const double n = static_cast<double>(y.size());
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double var_y = 0.0;
    for (double v : y) var_y += (v - mean_y) * (v - mean_y);
    var_y = y.size() > 1 ? var_y / (n - 1.0) : 0.0;
    Json summary = {{"cycles", config.cycles},
                    {"period", run.cycle_period},
                    {"wrap_errors", run.wrap_error_count()},
                    {"mean_fractional_frequency", mean_y},
                    {"std_fractional_frequency", std::sqrt(var_y)},
                    {"mean_correction", std::accumulate(run.correction.begin(), run.correction.end(), 0.0) / n}};
    if (!single && args.alpha > 0.0) summary["variance_ratio"] = variance_ratio(ensembles, args.ratio);
    write_json(summary_path, summary);

    if (args.trace) {
        const auto trace_path = out / "trace.csv";
        CsvWriter csv(trace_path, {"cycle", "true_phase", "estimated_phase", "correction", "wrap_error", "y"});
        for (std::size_t i = 0; i < y.size(); ++i) {
            csv.field(static_cast<long long>(i)).field(run.true_phase[i]).field(run.estimated_phase[i]);
            csv.field(run.correction[i]).field(static_cast<long long>(run.wrap_error[i])).field(y[i]);
            csv.end_row();
        }
        artifacts.push_back(trace_path);
    }
    std::cout << "T = " << format_number(run.cycle_period) << " s, wrap errors: " << run.wrap_error_count() << '\n';

    RunManifest manifest{"simulate"};
    manifest.parameters = {{"scheme", args.scheme},
                           {"model", args.model},
                           {"atoms", args.atoms},
                           {"levels", args.levels},
                           {"ratio", args.ratio},
                           {"width", args.width},
                           {"alpha", args.alpha},
                           {"omega", args.omega},
                           {"period", args.period},
                           {"cycles", args.cycles},
                           {"seed", args.seed},
                           {"noise", args.noise},
                           {"reduction", args.reduction},
                           {"decoupling-cycles", args.decoupling_cycles},
                           {"taus", args.taus},
                           {"trace", args.trace},
                           {"out", common.out}};
    manifest.seed = args.seed;
    finish(std::move(manifest), out, artifacts);
}

struct DdArgs {
    double ratio = 2.0;
    std::vector<int> levels = {0, 1, 2, 3, 4};
    double cycle = 1.0;
    double omega0 = 1.0;
    double omega1 = 1.0;
    double omega2 = 0.0;
};

void run_dd_verify(const DdArgs& args, const Common& common) {
    const auto rows = compute_dd_verify(args.ratio, args.levels, args.cycle, {args.omega0, args.omega1, args.omega2});
    const fs::path out(common.out);
    const auto path = out / "dd_verify.csv";
    {
        CsvWriter csv(path, {"j", "t_a", "t_b", "phase", "ideal", "relative_error"});
        for (const auto& r : rows) {
            csv.field(r.level).field(r.t_a).field(r.t_b).field(r.phase).field(r.ideal).field(r.relative_error);
            csv.end_row();
        }
    }
    if (args.omega2 != 0.0) std::cout << "quadratic term present: residuals are expected\n";
    RunManifest manifest{"dd-verify"};
    manifest.parameters = {{"ratio", args.ratio},   {"levels", args.levels}, {"cycle", args.cycle},
                           {"omega0", args.omega0}, {"omega1", args.omega1}, {"omega2", args.omega2},
                           {"out", common.out}};
    finish(std::move(manifest), out, {path});
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Cascaded-ensemble atomic clock analysis", "cascade_clock"};
    app.set_version_flag("--version", kToolVersion);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config or run manifest; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", common.out, "Output directory")->capture_default_str(); };

    Fig2Args fig2;
    auto* fig2_cmd = app.add_subcommand("fig2", "Step error probability versus N with exponential fits");
    fig2_cmd->add_option("--scheme", fig2.scheme, "all, reduced-frequency or reduced-period")->capture_default_str();
    fig2_cmd->add_option("--model", fig2.model, "all, ramsey or gaussian")->capture_default_str();
    fig2_cmd->add_option("-D,--ratio", fig2.ratio, "Division ratio")->capture_default_str();
    fig2_cmd->add_option("-c,--width", fig2.width, "Gaussian width (default 0.735 rf, 0.635 rp)");
    fig2_cmd->add_option("--n-min", fig2.n_min, "Smallest N (0: model minimum)")->capture_default_str();
    fig2_cmd->add_option("--n-max", fig2.n_max, "Largest N (0: 60 ramsey, 32 gaussian)")->capture_default_str();
    fig2_cmd->add_option("--fit-min-p", fig2.fit_min_p, "Lower edge of the fit window")->capture_default_str();
    fig2_cmd->add_option("--fit-max-p", fig2.fit_max_p, "Upper edge of the fit window")->capture_default_str();
    fig2_cmd->add_option("--grid", fig2.grid, "Phase grid points")->capture_default_str();
    fig2_cmd->add_option("--tie-rule", fig2.tie_rule, "default, closed, strict or half")->capture_default_str();
    add_out(fig2_cmd);

    Fig3Args fig3;
    auto* fig3_cmd = app.add_subcommand("fig3", "Gaussian state and phase-state distributions");
    fig3_cmd->add_option("-N,--atoms", fig3.atoms, "Atoms")->capture_default_str();
    fig3_cmd->add_option("-c,--width", fig3.width, "Gaussian width")->capture_default_str();
    fig3_cmd->add_option("--shifts", fig3.shifts, "Phase shifts in units of 2pi/(N+1)")->capture_default_str();
    add_out(fig3_cmd);

    MinNArgs min_n;
    auto* min_n_cmd = app.add_subcommand("min-n", "Minimum ensemble size for a target step error");
    min_n_cmd->add_option("--target-p", min_n.target_p, "Target step error probability")->capture_default_str();
    min_n_cmd->add_option("-D,--ratio", min_n.ratio, "Division ratio")->capture_default_str();
    min_n_cmd->add_option("--scheme", min_n.scheme, "all, reduced-frequency or reduced-period")->capture_default_str();
    min_n_cmd->add_option("--model", min_n.model, "all, ramsey or gaussian")->capture_default_str();
    min_n_cmd->add_option("--grid", min_n.grid, "Phase grid points")->capture_default_str();
    min_n_cmd->add_option("--tie-rule", min_n.tie_rule, "default, closed, strict or half")->capture_default_str();
    add_out(min_n_cmd);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Closed-loop clock simulation with Allan deviation");
    sim_cmd->add_option("--scheme", sim.scheme, "reduced-frequency or reduced-period")->capture_default_str();
    sim_cmd->add_option("--model", sim.model, "ramsey, gaussian or single-quadrature")->capture_default_str();
    sim_cmd->add_option("-N,--atoms", sim.atoms, "Atoms per ensemble")->capture_default_str();
    sim_cmd->add_option("-M,--levels", sim.levels, "Ensembles in the cascade")->capture_default_str();
    sim_cmd->add_option("-D,--ratio", sim.ratio, "Division ratio")->capture_default_str();
    sim_cmd->add_option("-c,--width", sim.width, "Gaussian width")->capture_default_str();
    sim_cmd->add_option("--alpha", sim.alpha, "Oscillator noise coefficient (rad/s)")->capture_default_str();
    sim_cmd->add_option("--omega", sim.omega, "Atomic angular frequency (rad/s)")->capture_default_str();
    sim_cmd->add_option("--period", sim.period, "Probe period T in s (0: longest allowed)")->capture_default_str();
    sim_cmd->add_option("--cycles", sim.cycles, "Clock cycles")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    sim_cmd->add_option("--noise", sim.noise, "per-interval-gaussian or white-frequency")->capture_default_str();
    sim_cmd->add_option("--reduction", sim.reduction, "frequency-division or decoupling")->capture_default_str();
    sim_cmd->add_option("--decoupling-cycles", sim.decoupling_cycles, "Decoupling sequences per period")
        ->capture_default_str();
    sim_cmd->add_option("--taus", sim.taus, "Allan averaging multiples of T")->capture_default_str();
    sim_cmd->add_flag("--trace", sim.trace, "Also write the per-cycle record");
    add_out(sim_cmd);

    DdArgs dd;
    auto* dd_cmd = app.add_subcommand("dd-verify", "Check the decoupling phase scaling");
    dd_cmd->add_option("-D,--ratio", dd.ratio, "Division ratio")->capture_default_str();
    dd_cmd->add_option("--levels", dd.levels, "Levels j")->capture_default_str();
    dd_cmd->add_option("--cycle", dd.cycle, "Decoupling cycle length T_D")->capture_default_str();
    dd_cmd->add_option("--omega0", dd.omega0, "Constant detuning")->capture_default_str();
    dd_cmd->add_option("--omega1", dd.omega1, "Linear drift")->capture_default_str();
    dd_cmd->add_option("--omega2", dd.omega2, "Quadratic drift coefficient")->capture_default_str();
    add_out(dd_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fig2_cmd->parsed()) run_fig2(fig2, common);
        if (fig3_cmd->parsed()) run_fig3(fig3, common);
        if (min_n_cmd->parsed()) run_min_n(min_n, common);
        if (sim_cmd->parsed()) run_simulate(sim, common);
        if (dd_cmd->parsed()) run_dd_verify(dd, common);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace cascade_clock::cli
