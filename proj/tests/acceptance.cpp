// Acceptance suite: one PASS/FAIL line per criterion, with measured values and wall time.
// Usage: acceptance [criterion numbers...]  (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bathsmith/bcf.hpp"
#include "bathsmith/chainmap.hpp"
#include "bathsmith/coarsegrain.hpp"
#include "bathsmith/series_io.hpp"
#include "bathsmith/dynamics.hpp"
#include "bathsmith/estimator.hpp"
#include "bathsmith/model_io.hpp"
#include "bathsmith/pool.hpp"
#include "bathsmith/rng.hpp"
#include "bathsmith/scenario.hpp"
#include "bathsmith/units.hpp"

using namespace bathsmith;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const std::size_t kThreads = default_threads();

const SpectralDensityModel& full() {
    static const auto m = load_any_model("fmo_full");
    return m;
}

ElectronicSystem monomer() {
    ElectronicSystem s;
    s.site_energies = {12300.0};
    s.couplings = Eigen::MatrixXd::Zero(1, 1);
    s.dipoles = {Eigen::Vector3d(1, 0, 0)};
    s.label = "monomer";
    return s;
}

double max_rel(const AbsorptionSpectrum& a, const AbsorptionSpectrum& ref) {
    double m = 0, top = 0;
    for (std::size_t k = 0; k < ref.intensity.size(); ++k) {
        m = std::max(m, std::abs(a.intensity[k] - ref.intensity[k]));
        top = std::max(top, ref.intensity[k]);
    }
    return m / top;
}

double area(const AbsorptionSpectrum& s, double lo, double hi) {
    double a = 0;
    for (std::size_t k = 0; k < s.omega.size(); ++k)
        if (s.omega[k] >= lo && s.omega[k] < hi) a += s.intensity[k];
    return a;
}

// numeric output columns as they would be written to CSV
std::vector<std::string> column(const std::vector<double>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (double x : v) out.push_back(format_number(x));
    return out;
}

std::vector<std::string> column(const std::vector<cplx>& v) {
    std::vector<std::string> out;
    out.reserve(2 * v.size());
    for (const auto& x : v) out.push_back(format_number(x.real())), out.push_back(format_number(x.imag()));
    return out;
}

// ---- 1 ----------------------------------------------------------------------

Outcome bcf_fidelity() {
    const BathParameters p; // 77 K, 3 sigma = 300 fs
    const auto eff = load_any_model("fmo_effective");
    const auto ca = bcf_quadrature(full(), p);
    const auto cb = bcf_quadrature(eff, p);
    const double dist = bcf_distance(ca, cb, p.sigma(), p.tau);
    const auto pa = count_peaks(ft_spectrum(gaussian_filter(ca, p.sigma())), kDefaultProminence, kHighFrequencyCut);
    const auto pb = count_peaks(ft_spectrum(gaussian_filter(cb, p.sigma())), kDefaultProminence, kHighFrequencyCut);
    double worst = 0;
    for (const auto& x : pa.peaks) {
        double best = INFINITY;
        for (const auto& y : pb.peaks) best = std::min(best, std::abs(x.center - y.center));
        worst = std::max(worst, best);
    }
    return {dist < 0.05 && pa.count() > 0 && worst <= 30.0,
            "bcf_distance " + fmt("%.4f", dist) + " (< 0.05), worst peak-centre mismatch " + fmt("%.0f", worst) +
                " cm^-1 (<= 30)"};
}

// ---- 2 ----------------------------------------------------------------------

Outcome conventional_baseline() {
    const BathParameters p;
    FitOptions o;
    o.k_peaks = 5;
    o.n_starts = 8;
    o.threads = kThreads;
    const auto fitted = fit_effective(full(), o);
    const auto conv = conventional_coarse_grain(full(), 1000.0, units::inverse_time_to_cm(20.0));
    const auto ref = bcf_quadrature(full(), p);
    const double d_fit = bcf_distance(ref, bcf_quadrature(fitted.model(), p), p.sigma(), p.tau);
    const double d_conv = bcf_distance(ref, bcf_quadrature(conv.model(), p), p.sigma(), p.tau);
    const double w = p.sigma();
    const auto n = static_cast<std::size_t>(std::llround(std::max(600.0, 6.0 * w) / 0.5)) + 1;
    const auto A = monomer_absorption(full(), 77.0, 12300.0, w, 0.5, n, OmegaGrid{});
    const auto B = monomer_absorption(conv.model(), 77.0, 12300.0, w, 0.5, n, OmegaGrid{});
    const double overlap = spectral_overlap(A, B);
    const double ratio = d_conv / d_fit;
    return {ratio > 3.0 && overlap >= 0.98,
            "distance ratio " + fmt("%.2f", ratio) + " (> 3; conventional " + fmt("%.4f", d_conv) + ", fitted " +
                fmt("%.4f", d_fit) + "), monomer overlap " + fmt("%.4f", overlap) + " (>= 0.98)"};
}

// ---- 3 ----------------------------------------------------------------------

Outcome peak_counts() {
    const std::size_t want[] = {5, 16, 28};
    const double taus[] = {300.0, 1000.0, 2000.0};
    bool ok = true;
    std::string d = "counts";
    for (int i = 0; i < 3; ++i) {
        BathParameters p;
        p.tau = taus[i];
        const auto s = ft_spectrum(gaussian_filter(bcf_quadrature(full(), p), p.sigma()));
        const auto n = count_peaks(s, kDefaultProminence, kHighFrequencyCut).count();
        ok &= n == want[i];
        d += " " + std::to_string(n) + (i < 2 ? "," : "");
    }
    return {ok, d + " at 3 sigma = 300/1000/2000 fs (want 5, 16, 28)"};
}

// ---- 4 ----------------------------------------------------------------------

std::vector<std::string> fit_columns(std::uint64_t seed, bool* ok, double* worst_param, double* worst_constraint) {
    SpectralDensityModel syn;
    syn.lorentzians = {{400.0, 0.05, 40.0}, {900.0, 0.03, 60.0}};
    syn.label = "synthetic two-Lorentzian";
    FitOptions o;
    o.k_peaks = 2;
    o.seed = seed;
    const auto e = fit_effective(syn, o);
    std::vector<double> values;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& a = e.lorentzians[k];
        const auto& b = syn.lorentzians[k];
        for (auto [x, y] : {std::pair{a.Omega, b.Omega}, {a.S, b.S}, {a.Gamma, b.Gamma}}) {
            *worst_param = std::max(*worst_param, std::abs(x - y) / y);
            values.push_back(x);
        }
    }
    const auto [dr, dh] = constraint_residuals(e);
    *worst_constraint = std::max({*worst_constraint, dr, dh});
    *ok &= e.lorentzians.size() == 2;
    values.push_back(e.fit_report->objective);
    return column(values);
}

Outcome fit_round_trip() {
    bool ok = true;
    double wp = 0, wc = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) fit_columns(seed, &ok, &wp, &wc);
    ok &= wp < 0.01 && wc < 1e-6;
    return {ok, "5 seeds: worst parameter error " + fmt("%.2e", wp) + " (< 1%), worst constraint residual " +
                    fmt("%.1e", wc) + " (< 1e-6)"};
}

// ---- 5 ----------------------------------------------------------------------

Outcome chain_mapping() {
    const auto leg = recurrence_coefficients([](double) { return 1.0; }, -1.0, 1.0, 51);
    double leg_err = 0;
    for (std::size_t n = 0; n <= 50; ++n) {
        leg_err = std::max(leg_err, std::abs(leg.alphas[n]));
        if (n > 0) leg_err = std::max(leg_err, std::abs(leg.betas[n] - double(n * n) / (4.0 * n * n - 1.0)));
    }
    const auto measure = discretize(thermal_measure(full(), 77.0));
    BathParameters p;
    const auto ref = bcf_quadrature(full(), p);
    auto head = ref;
    head.values.resize(static_cast<std::size_t>(std::llround(300.0 / p.dt)) + 1);
    const auto chain = lanczos_recurrence(measure, 51);
    const double d51 = bcf_distance(head, discrete_bcf(chain_to_star(chain), p.dt, head.size()), p.sigma());
    const auto found = chain_length_for_horizon(measure, head, 300.0, 0.05);
    const bool ok = leg_err < 1e-8 && d51 < 0.05 && found.length >= 36 && found.length <= 66;
    return {ok, "(a) Legendre max error " + fmt("%.1e", leg_err) + " (< 1e-8); (b) 51-site distance " +
                    fmt("%.4f", d51) + " (< 0.05); (c) search length " + std::to_string(found.length) +
                    " (51 +- 15)"};
}

// ---- 6 ----------------------------------------------------------------------

Outcome cross_engine() {
    const double win = 100.0;
    const OmegaGrid grid{};
    double worst = 0, worst_standard = 0;
    std::string per_mode;
    for (const auto& l : load_any_model("fmo_effective").lorentzians) {
        PseudomodeConfig c;
        c.site_modes = {{{l.Omega, l.S, l.Gamma}}};
        c.fock_dim = 6;
        c.horizon = 6.0 * win;
        const auto d = pseudomode_propagate(monomer(), c);
        SpectralDensityModel m;
        m.lorentzians = {l};
        const auto ref = monomer_absorption(m, 77.0, 12300.0, win, c.dt, d.size(), grid);
        const double e = max_rel(absorption_from_correlation(apply_window(d, win), grid), ref);
        c.exact_lorentzian = false;
        const auto ds = pseudomode_propagate(monomer(), c);
        worst_standard = std::max(worst_standard, max_rel(absorption_from_correlation(apply_window(ds, win), grid), ref));
        worst = std::max(worst, e);
        per_mode += " " + fmt("%.0f", l.Omega) + ":" + fmt("%.4f", e);
    }

    // undamped mode s = 0.3 at T = 0
    const double s = 0.3, w0 = 600.0, eps = 12300.0;
    const OmegaGrid fc_grid{11500.0, 14500.0, 1.0};
    PseudomodeConfig c;
    c.site_modes = {{{w0, s, 0.0}}};
    c.fock_dim = 12;
    c.bath_temperature = 0.0;
    c.horizon = 600.0;
    const auto spec = absorption_from_correlation(apply_window(pseudomode_propagate(monomer(), c), win), fc_grid);
    const double origin = eps - s * w0;
    const double a0 = area(spec, origin - 300, origin + 300);
    double fc_err = 0, fact = 1;
    for (int n = 1; n <= 3; ++n) {
        fact *= n;
        const double c_n = origin + n * w0;
        const double want = std::pow(s, n) / fact;
        fc_err = std::max(fc_err, std::abs(area(spec, c_n - 300, c_n + 300) / a0 - want) / want);
    }
    return {worst < 0.02 && fc_err < 0.01,
            "max-relative per mode" + per_mode + " (< 0.02; standard pseudomodes " + fmt("%.3f", worst_standard) +
                "); Franck-Condon area error " + fmt("%.1e", fc_err) + " (< 1%)"};
}

// ---- 7 ----------------------------------------------------------------------

Outcome heom_cost() {
    const auto small = heom_count({2, 6, 5, 0, 16});
    const auto large = heom_count({2, 62, 5, 0, 16});
    const auto ms = heom_memory({2, 6, 5, 0, 16});
    const auto ml = heom_memory({2, 62, 5, 0, 16});
    const double tb = ml.convert_to<double>() / 1e12;
    const bool ok = small == 118755 && large == BigInt(8301429675ULL) && human_bytes(ms) == "3.8 MB" &&
                    std::round(tb * 100) / 100 == 0.27;
    return {ok, group_digits(small) + " -> " + human_bytes(ms) + ", " + group_digits(large) + " -> " +
                    fmt("%.3f", tb) + " TB"};
}

// ---- 8 ----------------------------------------------------------------------

struct DimerRun {
    std::vector<AbsorptionSpectrum> eff, conv;
};

DimerRun dimer_runs() {
    return {run_scenario(load_scenario("scenarios/dimer_effective.json"), kThreads),
            run_scenario(load_scenario("scenarios/dimer_conventional.json"), kThreads)};
}

Outcome dimer_discrimination(const DimerRun& r) {
    const auto s = load_scenario("scenarios/dimer_effective.json");
    double lowest = 1.0;
    std::string per_v;
    for (std::size_t v = 0; v < r.eff.size(); ++v) {
        const double ov = spectral_overlap(r.eff[v], r.conv[v]);
        lowest = std::min(lowest, ov);
        per_v += " V=" + fmt("%.0f", s.coupling_scan[v]) + ":" + fmt("%.4f", ov);
    }
    // monomer limit: cumulant lineshape of the effective environment times the disorder characteristic function
    const double dt = s.propagation.dt;
    const auto n = static_cast<std::size_t>(std::llround(s.propagation.horizon / dt)) + 1;
    auto d = monomer_correlation(s.environment, s.propagation.bath_temperature, dt, n, 12300.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = units::angular(s.disorder.sigma) * dt * j;
        d.values[j] *= 2.0 * std::exp(-0.5 * x * x);
    }
    const double limit = spectral_overlap(r.eff[0], absorption_from_correlation(d, s.grid));
    return {lowest < 0.95 && limit >= 0.98, "effective vs conventional overlap" + per_v +
                                                 " (some < 0.95); monomer limit vs cumulant " + fmt("%.4f", limit) +
                                                 " (>= 0.98)"};
}

// ---- 9 ----------------------------------------------------------------------

DipoleCorrelation disorder_run() {
    PseudomodeConfig c;
    c.site_modes = {{}};
    c.horizon = 300.0;
    return disorder_ensemble(monomer(), c, DisorderSpec{80.0, 10000, kDefaultSeed}, kThreads);
}

Outcome disorder_limit(const DipoleCorrelation& d) {
    double worst = 0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double x = units::angular(80.0) * d.dt * j;
        worst = std::max(worst, std::abs(d.values[j] - std::exp(-0.5 * x * x)));
    }
    return {worst < 0.02, "10^4 samples: max |d - exp(-sigma^2 t^2 / 2)| on [0, 300 fs] " + fmt("%.4f", worst) +
                              " (< 0.02)"};
}

// ---- 10 ---------------------------------------------------------------------

Outcome determinism(const DimerRun* first_dimer, const DipoleCorrelation* first_disorder) {
    bool ok = true;
    std::string d;

    bool fit_same = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        bool b = true;
        double wp = 0, wc = 0;
        fit_same &= fit_columns(seed, &b, &wp, &wc) == fit_columns(seed, &b, &wp, &wc);
    }
    ok &= fit_same;
    d += std::string("fit ") + (fit_same ? "identical" : "DIFFERS");

    const auto dis_a = first_disorder ? *first_disorder : disorder_run();
    const auto dis_b = disorder_run();
    const bool dis_same = column(dis_a.values) == column(dis_b.values);
    ok &= dis_same;
    d += std::string(", ensemble ") + (dis_same ? "identical" : "DIFFERS");

    const auto dim_a = first_dimer ? *first_dimer : dimer_runs();
    const auto dim_b = dimer_runs();
    bool dim_same = dim_a.eff.size() == dim_b.eff.size();
    for (std::size_t v = 0; dim_same && v < dim_a.eff.size(); ++v)
        dim_same = column(dim_a.eff[v].intensity) == column(dim_b.eff[v].intensity) &&
                   column(dim_a.conv[v].intensity) == column(dim_b.conv[v].intensity);
    ok &= dim_same;
    d += std::string(", dimer scans ") + (dim_same ? "identical" : "DIFFERS");
    return {ok, d + " across two runs"};
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

    std::optional<DimerRun> dimer;
    std::optional<DipoleCorrelation> ensemble;

    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "BCF fidelity of the bundled effective environment", 30, bcf_fidelity},
        {2, "conventional baseline failure", 60, conventional_baseline},
        {3, "peak-count reproduction", 60, peak_counts},
        {4, "fit round-trip identifiability", 120, fit_round_trip},
        {5, "chain-mapping correctness", 120, chain_mapping},
        {6, "cross-engine oracle", 300, cross_engine},
        {7, "HEOM cost numbers", 1, heom_cost},
        {8, "dimer effective-vs-conventional discrimination", 1800,
         [&] {
             dimer = dimer_runs();
             return dimer_discrimination(*dimer);
         }},
        {9, "disorder ensemble limit", 60,
         [&] {
             ensemble = disorder_run();
             return disorder_limit(*ensemble);
         }},
        {10, "determinism", 0,
         [&] { return determinism(dimer ? &*dimer : nullptr, ensemble ? &*ensemble : nullptr); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!wanted(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string timing = fmt("%.1f s", secs);
        if (c.limit_s > 0) {
            timing += fmt(", limit %.0f s", c.limit_s);
            if (secs > c.limit_s) o.pass = false, timing += " EXCEEDED";
        }
        std::printf("%s criterion %d (%s): %s [%s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    timing.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
