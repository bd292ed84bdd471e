// bathsmith - command-line front end
//
// Exit codes: 0 success, 2 usage/configuration, 3 input, 4 numeric failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bathsmith/bcf.hpp"
#include "bathsmith/chainmap.hpp"
#include "bathsmith/coarsegrain.hpp"
#include "bathsmith/dynamics.hpp"
#include "bathsmith/error.hpp"
#include "bathsmith/estimator.hpp"
#include "bathsmith/manifest.hpp"
#include "bathsmith/model_io.hpp"
#include "bathsmith/pool.hpp"
#include "bathsmith/scenario.hpp"
#include "bathsmith/series_io.hpp"
#include "bathsmith/units.hpp"

namespace fs = std::filesystem;
using namespace bathsmith;
using ojson = nlohmann::ordered_json;

namespace {

// Shared output handling: every file goes through here so the manifest
// lists it and --plot can add an SVG beside each CSV.
struct Run {
    fs::path out_dir = "out";
    bool plot = false;
    RunManifest manifest;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    fs::path emit(const std::string& name, const std::string& text) {
        const fs::path p = out_dir / name;
        write_text_file(p, text);
        manifest.outputs.push_back(p.string());
        return p;
    }

    void emit_plot(const std::string& csv_name, const std::vector<PlotSeries>& series, const std::string& xl,
                   const std::string& yl, const std::string& title) {
        if (!plot) return;
        const std::string stem = fs::path(csv_name).stem().string();
        emit(stem + ".svg", svg_plot(series, xl, yl, title));
    }

    void finish() {
        manifest.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const fs::path p = out_dir / "manifest.json";
        manifest.outputs.push_back(p.string());
        write_text_file(p, manifest.to_json());
    }
};

SpectralDensityModel load_input_model(Run& run, const std::string& name) {
    const auto path = resolve_data_file(name);
    auto m = path.extension() == ".csv" ? load_mode_table(path) : load_model(path);
    run.manifest.add_input(path);
    if (m.label.empty()) m.label = path.stem().string();
    return m;
}

std::vector<double> real_parts(const CorrelationFunction& c) {
    std::vector<double> v(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) v[j] = c.values[j].real();
    return v;
}

std::vector<double> imag_parts(const CorrelationFunction& c) {
    std::vector<double> v(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) v[j] = c.values[j].imag();
    return v;
}

ojson census_json(const PeakCensus& census, double tau, double prominence) {
    ojson j;
    j["tau_fs"] = tau;
    j["prominence"] = prominence;
    j["omega_min_cm1"] = kHighFrequencyCut;
    j["count"] = census.count();
    auto& arr = j["peaks"] = ojson::array();
    for (const auto& p : census.peaks)
        arr.push_back({{"center_cm1", p.center}, {"height", p.height}, {"prominence", p.prominence}});
    return j;
}

Metadata bath_meta(const std::string& label, const BathParameters& p) {
    return {{"model", label},
            {"temperature_K", format_number(p.temperature)},
            {"tau_fs", format_number(p.tau)},
            {"filter_sigma_fs", format_number(p.sigma())}};
}

struct BathFlags {
    double temp = 77.0;
    double tau = 300.0;
    double sigma = 0.0;
    double dt = 0.25;
    double length = 0.0;

    void add(CLI::App* app) {
        app->add_option("--temp", temp, "Temperature in K")->capture_default_str();
        app->add_option("--tau", tau, "Time horizon in fs (3 sigma of the filter)")->capture_default_str();
        app->add_option("--sigma", sigma, "Filter width in fs (default tau/3)");
        app->add_option("--dt", dt, "Time step in fs")->capture_default_str();
        app->add_option("--length", length, "Grid end in fs (default 4 tau)");
    }

    BathParameters params() const {
        BathParameters p;
        p.temperature = temp;
        p.tau = tau;
        p.filter_sigma = sigma;
        p.dt = dt;
        p.length = length;
        validate(p);
        if (temp < 0.0) throw ConfigError("temperature must be >= 0");
        return p;
    }
};

// ---- bcf -------------------------------------------------------------------

struct BcfCmd {
    std::string model;
    BathFlags bath;
    double prominence = kDefaultProminence;
    double omega_max = 2000.0;

    int run(Run& r) {
        const auto p = bath.params();
        const auto m = load_input_model(r, model);
        const auto c = bcf_quadrature(m, p);
        const auto meta = bath_meta(m.label, p);
        r.emit("bcf.csv", correlation_csv(c, meta));
        r.emit_plot("bcf.csv", {{"Re C", c.t_grid(), real_parts(c)}, {"Im C", c.t_grid(), imag_parts(c)}},
                    "t (fs)", "C(t) (cm^-2)", "Bath correlation function, " + m.label);
        SpectrumGrid grid;
        grid.omega_max = omega_max;
        const auto s = ft_spectrum(gaussian_filter(c, p.sigma()), grid);
        r.emit("spectrum.csv", spectrum_csv(s.omega, s.values, meta));
        r.emit_plot("spectrum.csv", {{"filtered FT", s.omega, s.values}}, "omega (cm^-1)", "FT (cm^-1)",
                    "Gaussian-filtered spectrum");
        const auto census = count_peaks(s, prominence, kHighFrequencyCut);
        r.emit("peaks.json", census_json(census, p.tau, prominence).dump(2) + "\n");
        std::cout << "C(0) = " << format_number(c.values[0].real()) << " cm^-2, " << census.count()
                  << " high-frequency peaks at tau = " << p.tau << " fs\n";
        return 0;
    }
};

// ---- peaks -----------------------------------------------------------------

struct PeaksCmd {
    std::string model;
    double temp = 77.0;
    std::vector<double> taus{300.0, 1000.0, 2000.0};
    double prominence = kDefaultProminence;
    double dt = 0.25;

    int run(Run& r) {
        const auto m = load_input_model(r, model);
        ojson all = ojson::array();
        std::printf("%10s %8s  centers (cm^-1)\n", "tau_fs", "peaks");
        for (double tau : taus) {
            BathParameters p;
            p.temperature = temp;
            p.tau = tau;
            p.dt = dt;
            validate(p);
            const auto c = bcf_quadrature(m, p);
            const auto s = ft_spectrum(gaussian_filter(c, p.sigma()));
            const auto census = count_peaks(s, prominence, kHighFrequencyCut);
            std::printf("%10g %8zu ", tau, census.count());
            for (const auto& pk : census.peaks) std::printf(" %.0f", pk.center);
            std::printf("\n");
            all.push_back(census_json(census, tau, prominence));
        }
        r.emit("peaks.json", all.dump(2) + "\n");
        return 0;
    }
};

// ---- fit -------------------------------------------------------------------

struct FitCmd {
    std::string model;
    BathFlags bath;
    std::string peaks = "auto";
    std::uint64_t seed = kDefaultSeed;
    int starts = 16;
    bool no_ar = false;
    double prominence = kDefaultProminence;
    int max_iterations = 200;
    std::size_t threads = default_threads();

    int run(Run& r) {
        FitOptions o;
        const auto p = bath.params();
        o.temperature = p.temperature;
        o.tau = p.tau;
        o.sigma = p.filter_sigma;
        o.dt = p.dt;
        o.keep_ar = !no_ar;
        o.n_starts = starts;
        o.seed = seed;
        o.threads = threads;
        o.prominence = prominence;
        o.max_iterations = max_iterations;
        if (peaks != "auto") {
            int k = 0;
            try {
                std::size_t used = 0;
                k = std::stoi(peaks, &used);
                if (used != peaks.size()) throw std::invalid_argument(peaks);
            } catch (const std::exception&) {
                throw ConfigError("--peaks expects a positive integer or 'auto'");
            }
            if (k < 1) throw ConfigError("--peaks must be at least 1");
            o.k_peaks = k;
        }
        if (starts < 1) throw ConfigError("--starts must be at least 1");
        r.manifest.seeds.push_back(seed);
        const auto m = load_input_model(r, model);
        const auto env = fit_effective(m, o);
        r.emit("effective.json", effective_to_json(env));
        const auto [dr, dh] = constraint_residuals(env);
        const auto full = bcf_quadrature(m, p);
        const auto fitted = bcf_quadrature(env.model(), p);
        const double dist = bcf_distance(full, fitted, p.sigma(), p.tau);
        r.emit("bcf_compare.csv",
               table_csv({"t_fs", "re_full", "im_full", "re_effective", "im_effective"},
                         {full.t_grid(), real_parts(full), imag_parts(full), real_parts(fitted), imag_parts(fitted)},
                         bath_meta(m.label, p)));
        r.emit_plot("bcf_compare.csv",
                    {{"Re full", full.t_grid(), real_parts(full)}, {"Re effective", fitted.t_grid(), real_parts(fitted)}},
                    "t (fs)", "Re C(t) (cm^-2)", "Full vs effective BCF");
        const auto& rep = *env.fit_report;
        std::printf("peaks K = %d%s, starts %d (best %d), seed %llu\n", rep.k_peaks, rep.auto_k ? " (auto)" : "",
                    rep.n_starts, rep.best_start, static_cast<unsigned long long>(rep.seed));
        std::printf("objective %.6e (initial %.6e), bcf_distance %.6f\n", rep.objective, rep.initial_objective, dist);
        std::printf("reorganization energy residual %.3e, Huang-Rhys residual %.3e (relative)\n", dr, dh);
        std::printf("%12s %10s %12s\n", "Omega_cm1", "S", "Gamma_cm1");
        for (const auto& l : env.lorentzians) std::printf("%12.2f %10.5f %12.2f\n", l.Omega, l.S, l.Gamma);
        return 0;
    }
};

// ---- conventional ----------------------------------------------------------

struct ConventionalCmd {
    std::string model;
    double omega = 1000.0;
    double gamma = units::inverse_time_to_cm(20.0);

    int run(Run& r) {
        if (!(omega > 0.0) || !(gamma > 0.0)) throw ConfigError("--omega and --gamma must be positive");
        const auto m = load_input_model(r, model);
        const auto env = conventional_coarse_grain(m, omega, gamma);
        r.emit("conventional.json", effective_to_json(env));
        const auto& l = env.lorentzians.front();
        std::printf("conventional Lorentzian: Omega %.2f cm^-1, S %.6f, Gamma %.4f cm^-1\n", l.Omega, l.S, l.Gamma);
        return 0;
    }
};

// ---- chain -----------------------------------------------------------------

struct ChainCmd {
    std::string model;
    double temp = 77.0;
    double tau = 300.0;
    double tol = 0.05;
    std::size_t length = 0;
    double dt = 0.25;

    int run(Run& r) {
        if (!(temp > 0.0)) throw ConfigError("chain mapping needs --temp > 0");
        if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
        BathParameters p;
        p.temperature = temp;
        p.tau = tau;
        p.dt = dt;
        validate(p);
        const auto m = load_input_model(r, model);
        const auto measure_spec = thermal_measure(m, temp);
        const auto measure = discretize(measure_spec);
        const auto reference = bcf_quadrature(m, p);
        ChainSearch search;
        if (length == 0) {
            search = chain_length_for_horizon(measure, reference, tau, tol);
        } else {
            search.length = length;
        }
        const auto chain = lanczos_recurrence(measure, search.length);
        auto star = chain_to_star(chain);
        star.horizon = tau;
        const auto cb = discrete_bcf(star, reference.dt, reference.size());
        const double dist = bcf_distance(reference, cb, tau / 3.0, tau);
        const double tail = support_tail_weight(m, temp, measure_spec.lo, measure_spec.hi);
        Metadata meta{{"model", m.label},
                      {"temperature_K", format_number(temp)},
                      {"horizon_fs", format_number(tau)}};
        r.emit("chain.csv", chain_csv(chain, meta));
        r.emit("star.csv", star_csv(star, meta));
        r.emit("bcf_compare.csv",
               table_csv({"t_fs", "re_full", "im_full", "re_chain", "im_chain"},
                         {reference.t_grid(), real_parts(reference), imag_parts(reference), real_parts(cb), imag_parts(cb)},
                         meta));
        r.emit_plot("bcf_compare.csv",
                    {{"Re full", reference.t_grid(), real_parts(reference)}, {"Re chain", cb.t_grid(), real_parts(cb)}},
                    "t (fs)", "Re C(t) (cm^-2)", "Full vs truncated-chain BCF");
        ojson s;
        s["chain_length"] = search.length;
        s["bcf_distance"] = dist;
        s["tolerance"] = tol;
        s["support_cm1"] = {measure_spec.lo, measure_spec.hi};
        s["support_tail_weight"] = tail;
        auto& tr = s["search"] = ojson::array();
        for (const auto& [n, d] : search.trace) tr.push_back({{"length", n}, {"distance", d}});
        r.emit("chain_summary.json", s.dump(2) + "\n");
        std::printf("chain length %zu, bcf_distance %.6f over [0, %g fs], weight outside support %.2e\n",
                    search.length, dist, tau, tail);
        return 0;
    }
};

// ---- absorb ----------------------------------------------------------------

struct AbsorbCmd {
    std::string scenario;
    std::string model;
    double temp = 77.0;
    double epsilon = 12300.0;
    std::optional<double> window;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::size_t threads = default_threads();
    double lo = 11500.0, hi = 13500.0, spacing = 1.0;
    double dt = 0.5;
    double horizon = 0.0;

    static std::string spectrum_name(const Scenario& s, std::size_t k) {
        if (s.coupling_scan.empty()) return "spectrum.csv";
        std::ostringstream os;
        os << "spectrum_V" << s.coupling_scan[k] << ".csv";
        return os.str();
    }

    int run(Run& r) {
        if (scenario.empty() == model.empty()) throw ConfigError("absorb needs a scenario file or --model (not both)");
        OmegaGrid grid{lo, hi, spacing};
        if (!model.empty()) return run_monomer(r, grid);
        const auto path = resolve_data_file(scenario);
        auto s = load_scenario(path.string());
        for (const auto& in : s.inputs) r.manifest.add_input(in);
        if (window) s.window_sigma = *window;
        if (samples) s.disorder.n_samples = *samples;
        if (seed) s.disorder.seed = *seed;
        if (s.disorder.n_samples < 1) throw ConfigError("--samples must be at least 1");
        if (s.disorder.sigma > 0.0) r.manifest.seeds.push_back(s.disorder.seed);
        std::vector<DipoleCorrelation> corr;
        const auto spectra = run_scenario(s, threads, &corr);
        std::vector<PlotSeries> series;
        for (std::size_t k = 0; k < spectra.size(); ++k) {
            const auto& sp = spectra[k];
            Metadata meta{{"scenario", s.label},
                          {"system", sp.system},
                          {"environment", sp.environment},
                          {"temperature_K", format_number(s.propagation.bath_temperature)},
                          {"disorder_sigma_cm1", format_number(s.disorder.sigma)},
                          {"n_samples", std::to_string(s.disorder.sigma > 0.0 ? s.disorder.n_samples : 1)},
                          {"seed", std::to_string(s.disorder.seed)},
                          {"window_fs", format_number(s.window_sigma)},
                          {"frame_cm1", format_number(corr[k].frame_cm1)},
                          {"min_ratio", format_number(sp.min_ratio)}};
            const auto name = spectrum_name(s, k);
            r.emit(name, spectrum_csv(sp.omega, sp.intensity, meta));
            CorrelationFunction c;
            c.dt = corr[k].dt;
            c.values = corr[k].values;
            c.temperature = s.propagation.bath_temperature;
            c.label = corr[k].label;
            r.emit("dipole_" + name, correlation_csv(c, meta));
            series.push_back({sp.system, sp.omega, sp.intensity});
            std::printf("%s: peak at %.0f cm^-1, min/max %.2e\n", sp.system.c_str(),
                        sp.omega[static_cast<std::size_t>(std::max_element(sp.intensity.begin(), sp.intensity.end()) -
                                                          sp.intensity.begin())],
                        sp.min_ratio);
        }
        r.emit_plot("spectra.csv", series, "omega (cm^-1)", "A (arb. units)", s.label);
        return 0;
    }

    int run_monomer(Run& r, const OmegaGrid& grid) {
        const auto m = load_input_model(r, model);
        const double w = window.value_or(100.0);
        const double h = horizon > 0.0 ? horizon : std::max(600.0, 6.0 * w);
        const auto n = static_cast<std::size_t>(std::llround(h / dt)) + 1;
        if (!(dt > 0.0)) throw ConfigError("--dt must be positive");
        const auto sp = monomer_absorption(m, temp, epsilon, w, dt, n, grid);
        Metadata meta{{"model", m.label},
                      {"system", "monomer"},
                      {"temperature_K", format_number(temp)},
                      {"epsilon_cm1", format_number(epsilon)},
                      {"window_fs", format_number(w)},
                      {"engine", "cumulant"}};
        r.emit("spectrum.csv", spectrum_csv(sp.omega, sp.intensity, meta));
        r.emit_plot("spectrum.csv", {{m.label, sp.omega, sp.intensity}}, "omega (cm^-1)", "A (arb. units)",
                    "Monomer absorption");
        return 0;
    }
};

// ---- compare ---------------------------------------------------------------

struct CompareCmd {
    std::string a, b;
    BathFlags bath;
    double epsilon = 12300.0;
    double window = 0.0;
    double lo = 11500.0, hi = 13500.0;
    double prominence = kDefaultProminence;

    int run(Run& r) {
        const auto p = bath.params();
        const auto ma = load_input_model(r, a);
        const auto mb = load_input_model(r, b);
        const auto ca = bcf_quadrature(ma, p);
        const auto cb = bcf_quadrature(mb, p);
        const double dist = bcf_distance(ca, cb, p.sigma(), p.tau);
        const auto sa = ft_spectrum(gaussian_filter(ca, p.sigma()));
        const auto sb = ft_spectrum(gaussian_filter(cb, p.sigma()));
        const auto pa = count_peaks(sa, prominence, kHighFrequencyCut);
        const auto pb = count_peaks(sb, prominence, kHighFrequencyCut);
        double worst = 0.0;
        for (const auto& x : pa.peaks) {
            double best = INFINITY;
            for (const auto& y : pb.peaks) best = std::min(best, std::abs(x.center - y.center));
            worst = std::max(worst, best);
        }
        const double w = window > 0.0 ? window : p.sigma();
        const auto n = static_cast<std::size_t>(std::llround(std::max(600.0, 6.0 * w) / 0.5)) + 1;
        OmegaGrid grid{lo, hi, 1.0};
        const auto A = monomer_absorption(ma, p.temperature, epsilon, w, 0.5, n, grid);
        const auto B = monomer_absorption(mb, p.temperature, epsilon, w, 0.5, n, grid);
        const double overlap = spectral_overlap(A, B);
        struct Row {
            std::string metric;
            double value;
            std::string rule;
            bool ok;
        };
        const std::vector<Row> rows{
            {"bcf_distance", dist, "< 0.05", dist < 0.05},
            {"peak_center_mismatch_cm1", worst, "<= 30", pa.count() > 0 && worst <= 30.0},
            {"monomer_overlap", overlap, ">= 0.99", overlap >= 0.99},
        };
        std::ostringstream csv;
        csv << "# tool_version: bathsmith " << BATHSMITH_VERSION << "\n# a: " << ma.label << "\n# b: " << mb.label
            << "\n# temperature_K: " << format_number(p.temperature) << "\n# filter_sigma_fs: "
            << format_number(p.sigma()) << "\nmetric,value,rule,verdict\n";
        std::printf("%-26s %14s %10s  %s\n", "metric", "value", "rule", "verdict");
        for (const auto& row : rows) {
            csv << row.metric << "," << format_number(row.value) << "," << row.rule << ","
                << (row.ok ? "match" : "differ") << "\n";
            std::printf("%-26s %14.6g %10s  %s\n", row.metric.c_str(), row.value, row.rule.c_str(),
                        row.ok ? "match" : "differ");
        }
        r.emit("compare.csv", csv.str());
        r.emit("monomer_spectra.csv",
               table_csv({"omega_cm1", "a", "b"}, {A.omega, A.intensity, B.intensity},
                         {{"a", ma.label}, {"b", mb.label}, {"window_fs", format_number(w)}}));
        r.emit_plot("monomer_spectra.csv", {{ma.label, A.omega, A.intensity}, {mb.label, B.omega, B.intensity}},
                    "omega (cm^-1)", "A (arb. units)", "Monomer absorption");
        return 0;
    }
};

// ---- heom-cost -------------------------------------------------------------

struct HeomCmd {
    std::vector<std::uint64_t> N{2}, M{6, 62}, L{5};
    std::uint64_t block = 0;
    std::uint64_t bytes = 16;
    bool write = false;

    int run(Run& r) {
        std::ostringstream csv;
        csv << "# tool_version: bathsmith " << BATHSMITH_VERSION << "\nN,M,L,block_entries,count,bytes\n";
        std::printf("%4s %4s %3s %6s %26s %32s %10s %12s\n", "N", "M", "L", "block", "operators", "bytes", "size",
                    "TB");
        for (auto n : N)
            for (auto m : M)
                for (auto l : L) {
                    HeomCostQuery q{n, m, l, block, bytes};
                    const auto c = heom_count(q);
                    const auto b = heom_memory(q);
                    const auto blk = block ? block : absorption_block_entries(n);
                    std::printf("%4llu %4llu %3llu %6llu %26s %32s %10s %12.3g\n", static_cast<unsigned long long>(n),
                                static_cast<unsigned long long>(m), static_cast<unsigned long long>(l),
                                static_cast<unsigned long long>(blk), group_digits(c).c_str(),
                                group_digits(b).c_str(), human_bytes(b).c_str(), b.convert_to<double>() / 1e12);
                    csv << n << "," << m << "," << l << "," << blk << "," << c.str() << "," << b.str() << "\n";
                }
        if (write) r.emit("heom_cost.csv", csv.str());
        return 0;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bathsmith: structured vibrational environments, effective spectral densities and spectra"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("bathsmith ") + BATHSMITH_VERSION);
    Run r;
    std::string out = "out";
    bool plot = false;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        sub->add_flag("--plot", plot, "Also write an SVG plot next to each CSV");
    };

    BcfCmd bcf;
    auto* s_bcf = app.add_subcommand("bcf", "Correlation function, filtered spectrum and peak census");
    s_bcf->add_option("model", bcf.model, "Model file or bundled name")->required();
    bcf.bath.add(s_bcf);
    s_bcf->add_option("--prominence", bcf.prominence, "Relative peak prominence")->capture_default_str();
    s_bcf->add_option("--omega-max", bcf.omega_max, "Upper end of the spectrum grid (cm^-1)");
    common(s_bcf);

    PeaksCmd peaks;
    auto* s_peaks = app.add_subcommand("peaks", "High-frequency peak counts for several horizons");
    s_peaks->add_option("model", peaks.model, "Model file or bundled name")->required();
    s_peaks->add_option("--temp", peaks.temp, "Temperature in K")->capture_default_str();
    s_peaks->add_option("--tau", peaks.taus, "Horizons in fs")->capture_default_str();
    s_peaks->add_option("--prominence", peaks.prominence, "Relative peak prominence")->capture_default_str();
    s_peaks->add_option("--dt", peaks.dt, "Time step in fs")->capture_default_str();
    common(s_peaks);

    FitCmd fit;
    auto* s_fit = app.add_subcommand("fit", "Fit an effective environment to the filtered BCF");
    s_fit->add_option("model", fit.model, "Model file or bundled name")->required();
    fit.bath.add(s_fit);
    s_fit->add_option("--peaks", fit.peaks, "Number of Lorentzians, or 'auto'")->capture_default_str();
    s_fit->add_option("--seed", fit.seed, "Seed of the multi-start jitter")->capture_default_str();
    s_fit->add_option("--starts", fit.starts, "Number of starts")->capture_default_str();
    s_fit->add_option("--max-iterations", fit.max_iterations, "Iterations per start")->capture_default_str();
    s_fit->add_option("--prominence", fit.prominence, "Relative peak prominence")->capture_default_str();
    s_fit->add_option("--threads", fit.threads, "Worker threads");
    s_fit->add_flag("--no-ar", fit.no_ar, "Replace the AR continuum by a fitted Lorentzian");
    common(s_fit);

    ConventionalCmd conv;
    auto* s_conv = app.add_subcommand("conventional", "Single broad Lorentzian conserving reorganization energy");
    s_conv->add_option("model", conv.model, "Model file or bundled name")->required();
    s_conv->add_option("--omega", conv.omega, "Centre in cm^-1")->capture_default_str();
    s_conv->add_option("--gamma", conv.gamma, "Width in cm^-1")->capture_default_str();
    common(s_conv);

    ChainCmd chain;
    auto* s_chain = app.add_subcommand("chain", "Chain mapping and truncation for a time horizon");
    s_chain->add_option("model", chain.model, "Model file or bundled name")->required();
    s_chain->add_option("--temp", chain.temp, "Temperature in K")->capture_default_str();
    s_chain->add_option("--tau", chain.tau, "Horizon in fs")->capture_default_str();
    s_chain->add_option("--tol", chain.tol, "BCF distance tolerance")->capture_default_str();
    s_chain->add_option("--length", chain.length, "Fixed chain length (skip the search)");
    s_chain->add_option("--dt", chain.dt, "Time step in fs")->capture_default_str();
    common(s_chain);

    AbsorbCmd absorb;
    auto* s_abs = app.add_subcommand("absorb", "Absorption spectra from a scenario (or a cumulant monomer)");
    s_abs->add_option("scenario", absorb.scenario, "Scenario file or bundled name");
    s_abs->add_option("--model", absorb.model, "Monomer model for the cumulant engine");
    s_abs->add_option("--temp", absorb.temp, "Temperature (monomer)")->capture_default_str();
    s_abs->add_option("--epsilon", absorb.epsilon, "Site energy (monomer)")->capture_default_str();
    s_abs->add_option("--window", absorb.window, "Gaussian window sigma in fs");
    s_abs->add_option("--samples", absorb.samples, "Disorder samples");
    s_abs->add_option("--seed", absorb.seed, "Disorder seed");
    s_abs->add_option("--threads", absorb.threads, "Worker threads");
    s_abs->add_option("--lo", absorb.lo, "Grid start (cm^-1)")->capture_default_str();
    s_abs->add_option("--hi", absorb.hi, "Grid end (cm^-1)")->capture_default_str();
    s_abs->add_option("--spacing", absorb.spacing, "Grid spacing (cm^-1)")->capture_default_str();
    common(s_abs);

    CompareCmd cmp;
    auto* s_cmp = app.add_subcommand("compare", "BCF distance, peak centres and monomer spectral overlap");
    s_cmp->add_option("a", cmp.a, "First model")->required();
    s_cmp->add_option("b", cmp.b, "Second model")->required();
    cmp.bath.add(s_cmp);
    s_cmp->add_option("--epsilon", cmp.epsilon, "Monomer site energy")->capture_default_str();
    s_cmp->add_option("--window", cmp.window, "Monomer window sigma in fs (default: filter sigma)");
    common(s_cmp);

    HeomCmd heom;
    auto* s_heom = app.add_subcommand("heom-cost", "HEOM auxiliary-operator counts and memory");
    s_heom->add_option("--N", heom.N, "Number of sites")->capture_default_str();
    s_heom->add_option("--M", heom.M, "Lorentzians per site")->capture_default_str();
    s_heom->add_option("--L", heom.L, "Hierarchy depth")->capture_default_str();
    s_heom->add_option("--block", heom.block, "Complex entries per operator (default N)");
    s_heom->add_option("--bytes", heom.bytes, "Bytes per entry")->capture_default_str();
    s_heom->add_flag("--write", heom.write, "Also write heom_cost.csv and a manifest");
    common(s_heom);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    r.out_dir = out;
    r.plot = plot;
    r.manifest.tool_version = BATHSMITH_VERSION;
    r.manifest.command_line.assign(argv, argv + argc);
    try {
        int rc = 0;
        bool manifest = true;
        if (s_bcf->parsed()) rc = bcf.run(r);
        else if (s_peaks->parsed()) rc = peaks.run(r);
        else if (s_fit->parsed()) rc = fit.run(r);
        else if (s_conv->parsed()) rc = conv.run(r);
        else if (s_chain->parsed()) rc = chain.run(r);
        else if (s_abs->parsed()) rc = absorb.run(r);
        else if (s_cmp->parsed()) rc = cmp.run(r);
        else if (s_heom->parsed()) {
            rc = heom.run(r);
            manifest = heom.write;
        }
        if (manifest) r.finish();
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: invalid input: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: invalid input: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
