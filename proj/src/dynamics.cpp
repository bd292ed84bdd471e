// dynamics.cpp - cumulant lineshapes, spectra, ensembles and dimer scans

#include "bathsmith/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bathsmith/error.hpp"
#include "bathsmith/pool.hpp"
#include "bathsmith/quadrature.hpp"
#include "bathsmith/rng.hpp"
#include "bathsmith/units.hpp"

namespace bathsmith {

std::vector<double> OmegaGrid::points() const {
    if (!(hi > lo) || !(spacing > 0.0)) throw ConfigError("frequency grid needs lo < hi and spacing > 0");
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / spacing)) + 1;
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = lo + spacing * static_cast<double>(k);
    return w;
}

std::vector<cplx> cumulant_lineshape(const SpectralDensityModel& model, double T, double dt, std::size_t n) {
    validate(model);
    std::vector<cplx> g(n, cplx(0.0));
    if (n == 0) return g;
    const double t_end = dt * static_cast<double>(n - 1);
    const bool continuous = model.ar || !model.lorentzians.empty();
    if (continuous) {
        double W = 3000.0;
        for (const auto& l : model.lorentzians) W = std::max(W, l.Omega + 40.0 * l.Gamma);
        if (T > 0.0) W = std::max(W, 40.0 * units::thermal_energy(T));
        if (model.ar) W = std::max(W, 2500.0 * std::max(model.ar->w1, model.ar->w2));
        const double h_max = std::min(50.0, 12.0 / std::max(units::angular(t_end), 1e-12));
        const auto edges = quad::graded_edges(0.0, W, h_max, [&](double w) {
            // 1/w^2 weighting near zero needs geometric panels
            return std::min(local_feature_width(model, w), std::max(1e-3, 0.5 * w));
        });
        const auto rule = quad::composite(edges, 24);
        const std::size_t m = rule.size();
        std::vector<double> a(m), b(m), om(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double w = rule.nodes[k];
            om[k] = w;
            a[k] = rule.weights[k] * thermal_weight_density(model, T, w) / (w * w);
            b[k] = rule.weights[k] * density_over_omega(model, w) / w;
        }
        // -i t lambda carries the whole reorganization energy, so only the
        // oscillating parts are integrated numerically
        SpectralDensityModel cont = model;
        cont.deltas.clear();
        const double lam = reorganization_energy(cont);
        // int_W^inf J/w^2: the non-oscillating remainder of 1 - cos (coth = 1 there)
        double tail = 0.0;
        for (const auto& l : model.lorentzians) {
            auto f = [&](double w) { return lorentzian_density(l, w) / (w * w); };
            tail += quad::integrate(f, W, std::numeric_limits<double>::infinity(), 1e-10,
                                    1e-18).value;
        }
        for (std::size_t j = 1; j < n; ++j) {
            const double tau = units::angular(static_cast<double>(j) * dt);
            double re = 0.0, im = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double x = om[k] * tau;
                const double s = std::sin(0.5 * x);
                re += a[k] * 2.0 * s * s;
                im += b[k] * std::sin(x);
            }
            g[j] = cplx(re + tail, im - lam * tau);
        }
    }
    for (const auto& d : model.deltas) {
        const double coth = T > 0.0 ? 1.0 / std::tanh(d.omega / (2.0 * units::thermal_energy(T))) : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = units::angular(d.omega * static_cast<double>(j) * dt);
            g[j] += d.s * cplx(coth * (1.0 - std::cos(x)), std::sin(x) - x);
        }
    }
    return g;
}

DipoleCorrelation monomer_correlation(const SpectralDensityModel& model, double T, double dt, std::size_t n,
                                      double epsilon) {
    DipoleCorrelation d;
    d.dt = dt;
    d.frame_cm1 = epsilon;
    d.label = model.label;
    if (model.empty()) {
        d.values.assign(n, cplx(1.0));
        return d;
    }
    const auto g = cumulant_lineshape(model, T, dt, n);
    d.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) d.values[j] = std::exp(-g[j]);
    return d;
}

DipoleCorrelation apply_window(const DipoleCorrelation& d, double sigma) {
    if (!(sigma > 0.0)) return d;
    DipoleCorrelation out = d;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double t = d.dt * static_cast<double>(j);
        out.values[j] *= std::exp(-t * t / (2.0 * sigma * sigma));
    }
    out.window_sigma = sigma;
    return out;
}

AbsorptionSpectrum absorption_from_correlation(const DipoleCorrelation& d, const OmegaGrid& grid) {
    if (d.size() < 2) throw ConfigError("need at least two correlation samples");
    AbsorptionSpectrum s;
    s.omega = grid.points();
    std::vector<double> shifted(s.omega.size());
    for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] = s.omega[k] - d.frame_cm1;
    CorrelationFunction c;
    c.dt = d.dt;
    c.values = d.values;
    s.intensity = one_sided_transform(c, shifted);
    const double mx = *std::max_element(s.intensity.begin(), s.intensity.end());
    const double mn = *std::min_element(s.intensity.begin(), s.intensity.end());
    s.min_ratio = mx > 0.0 ? std::min(0.0, mn / mx) : 0.0;
    s.n_negative = static_cast<std::size_t>(std::count_if(s.intensity.begin(), s.intensity.end(),
                                                          [](double v) { return v < 0.0; }));
    s.window_sigma = d.window_sigma;
    s.environment = d.label;
    return s;
}

AbsorptionSpectrum monomer_absorption(const SpectralDensityModel& model, double T, double epsilon,
                                      double window_sigma, double dt, std::size_t n, const OmegaGrid& grid) {
    auto d = monomer_correlation(model, T, dt, n, epsilon);
    auto s = absorption_from_correlation(apply_window(d, window_sigma), grid);
    s.system = "monomer";
    return s;
}

std::vector<PseudomodeSpec> pseudomodes_from(const SpectralDensityModel& model,
                                             const std::optional<PseudomodeSpec>& ar_mode) {
    if (model.ar && !ar_mode)
        throw ConfigError("the AR continuum has no exact pseudomode form; supply a substitute AR mode");
    std::vector<PseudomodeSpec> out;
    if (model.ar) out.push_back(*ar_mode);
    for (const auto& l : model.lorentzians) out.push_back({l.Omega, l.S, l.Gamma});
    for (const auto& d : model.deltas) out.push_back({d.omega, d.s, 0.0});
    return out;
}

double pseudomode_coupling_sq(const PseudomodeSpec& m) { return m.S * (m.Omega * m.Omega + m.Gamma * m.Gamma); }

namespace {

double mean_occupation(double omega, double T) {
    if (T <= 0.0) return 0.0;
    const double x = omega / units::thermal_energy(T);
    return x > 700.0 ? 0.0 : 1.0 / std::expm1(x);
}

} // namespace

std::vector<cplx> pseudomode_bcf(const std::vector<PseudomodeSpec>& modes, double T, double dt, std::size_t n) {
    std::vector<cplx> c(n, cplx(0.0));
    for (const auto& m : modes) {
        const double g2 = pseudomode_coupling_sq(m);
        const double nb = mean_occupation(m.Omega, T);
        for (std::size_t j = 0; j < n; ++j) {
            const double tau = units::angular(static_cast<double>(j) * dt);
            c[j] += g2 * std::exp(-m.Gamma * tau) *
                    ((nb + 1.0) * std::exp(cplx(0.0, -m.Omega * tau)) + nb * std::exp(cplx(0.0, m.Omega * tau)));
        }
    }
    return c;
}

std::vector<cplx> pseudomode_lineshape(const std::vector<PseudomodeSpec>& modes, double T, double dt,
                                       std::size_t n) {
    std::vector<cplx> g(n, cplx(0.0));
    for (const auto& m : modes) {
        const double g2 = pseudomode_coupling_sq(m);
        const double nb = mean_occupation(m.Omega, T);
        const cplx zs[2] = {cplx(m.Gamma, m.Omega), cplx(m.Gamma, -m.Omega)};
        const double cs[2] = {g2 * (nb + 1.0), g2 * nb};
        for (int p = 0; p < 2; ++p) {
            if (cs[p] == 0.0) continue;
            const cplx z = zs[p];
            for (std::size_t j = 0; j < n; ++j) {
                const double tau = units::angular(static_cast<double>(j) * dt);
                const cplx zt = z * tau;
                // (e^{-x} - 1 + x) / z^2 with a series for small x
                cplx v;
                if (std::abs(zt) < 1e-3) v = tau * tau * (0.5 - zt / 6.0 + zt * zt / 24.0);
                else v = (std::exp(-zt) - 1.0 + zt) / (z * z);
                g[j] += cs[p] * v;
            }
        }
    }
    return g;
}

DipoleCorrelation disorder_ensemble(const PseudomodeEngine& engine, const ElectronicSystem& system,
                                    const DisorderSpec& disorder, std::size_t threads) {
    validate(disorder);
    const std::size_t ns = disorder.n_samples;
    std::vector<DipoleCorrelation> samples(ns);
    parallel_for(ns, threads, [&](std::size_t s) {
        CounterRng rng(disorder.seed, s);
        std::vector<double> e = system.site_energies;
        for (auto& v : e) v += disorder.sigma * rng.normal();
        samples[s] = engine.propagate(e);
    });
    DipoleCorrelation out = samples.front();
    for (std::size_t s = 1; s < ns; ++s)
        for (std::size_t j = 0; j < out.size(); ++j) out.values[j] += samples[s].values[j];
    for (auto& v : out.values) v /= static_cast<double>(ns);
    out.n_samples = ns;
    out.seed = disorder.seed;
    return out;
}

DipoleCorrelation disorder_ensemble(const ElectronicSystem& system, const PseudomodeConfig& config,
                                    const DisorderSpec& disorder, std::size_t threads) {
    PseudomodeEngine engine(system, config);
    return disorder_ensemble(engine, system, disorder, threads);
}

double spectral_overlap(const AbsorptionSpectrum& a, const AbsorptionSpectrum& b) {
    if (a.omega.size() != b.omega.size()) throw ConfigError("spectral_overlap: spectra on different grids");
    for (std::size_t k = 0; k < a.omega.size(); ++k)
        if (std::abs(a.omega[k] - b.omega[k]) > 1e-9 * (1.0 + std::abs(a.omega[k])))
            throw ConfigError("spectral_overlap: spectra on different grids");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t k = 0; k < a.omega.size(); ++k) {
        ab += a.intensity[k] * b.intensity[k];
        aa += a.intensity[k] * a.intensity[k];
        bb += b.intensity[k] * b.intensity[k];
    }
    if (aa == 0.0 || bb == 0.0) return 0.0;
    return ab / std::sqrt(aa * bb);
}

ElectronicSystem with_coupling(const ElectronicSystem& dimer, double V) {
    if (dimer.n_sites() != 2) throw ValidationError("dimer scan needs a two-site system");
    ElectronicSystem s = dimer;
    s.couplings(0, 1) = s.couplings(1, 0) = V;
    return s;
}

std::vector<AbsorptionSpectrum> dimer_scan(const ElectronicSystem& dimer, const std::vector<double>& V_list,
                                           const PseudomodeConfig& config, const DisorderSpec& disorder,
                                           const DimerScanOptions& options) {
    std::vector<AbsorptionSpectrum> out;
    for (double V : V_list) {
        const auto sys = with_coupling(dimer, V);
        PseudomodeEngine engine(sys, config);
        auto d = disorder_ensemble(engine, sys, disorder, options.threads);
        d.label = config.label;
        auto s = absorption_from_correlation(apply_window(d, options.window_sigma), options.grid);
        std::ostringstream tag;
        tag << V;
        s.system = sys.label + " V=" + tag.str();
        s.disorder = disorder;
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace bathsmith
