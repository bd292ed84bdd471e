// coarsegrain.cpp - Constrained multi-start Lorentzian fitting and conventional baseline

#include "bathsmith/coarsegrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "bathsmith/error.hpp"
#include "bathsmith/lorentzian_bcf.hpp"
#include "bathsmith/lsq.hpp"
#include "bathsmith/model_io.hpp"
#include "bathsmith/pool.hpp"
#include "bathsmith/units.hpp"

namespace bathsmith {

namespace {

constexpr double kGammaMin = 1.0, kGammaMax = 300.0;
const LorentzianComponent kArPseudomode{160.0, 0.164, 133.0};

struct Seed {
    double omega, height;
};

// Initial S_k proportional to q_k * exp(-c Omega_k), with c chosen so that
// sum S = H and sum Omega S = L hold; positive whenever L/H lies strictly
// inside the range of centres.
std::vector<double> tilted_weights(const std::vector<double>& omega, const std::vector<double>& q,
                                   double H, double L) {
    const double target = L / H;
    auto mean_at = [&](double c, std::vector<double>* out) {
        const double om0 = omega[0];
        double z = 0.0, m = 0.0;
        std::vector<double> s(omega.size());
        for (std::size_t k = 0; k < omega.size(); ++k) {
            s[k] = q[k] * std::exp(-c * (omega[k] - om0));
            z += s[k];
            m += s[k] * omega[k];
        }
        if (out) {
            for (auto& v : s) v *= H / z;
            *out = s;
        }
        return m / z;
    };
    double lo = -1.0, hi = 1.0;
    while (mean_at(lo, nullptr) < target && lo > -1e3) lo *= 2.0;
    while (mean_at(hi, nullptr) > target && hi < 1e3) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_at(mid, nullptr) > target ? lo : hi) = mid;
    }
    std::vector<double> s;
    mean_at(0.5 * (lo + hi), &s);
    return s;
}

// Parameter layout: [Omega_0..Omega_{m-1}, Gamma_0..Gamma_{m-1}, S_free...],
// with S_a, S_b (the eliminated pair) fixed by the two constraints.
struct Layout {
    std::size_t m = 0;
    std::size_t a = 0, b = 1; // eliminated indices
    bool single = false;      // m == 1: Omega = L/H, S = H, only Gamma free
    double H = 0.0, L = 0.0;

    std::size_t n_params() const { return single ? 1 : 2 * m + (m - 2); }

    bool unpack(const Eigen::VectorXd& x, std::vector<LorentzianComponent>& out) const {
        out.assign(m, {});
        if (single) {
            out[0] = {L / H, H, x[0]};
            return true;
        }
        for (std::size_t k = 0; k < m; ++k) {
            out[k].Omega = x[k];
            out[k].Gamma = x[m + k];
        }
        double r1 = H, r2 = L;
        std::size_t f = 2 * m;
        for (std::size_t k = 0; k < m; ++k) {
            if (k == a || k == b) continue;
            out[k].S = x[f++];
            r1 -= out[k].S;
            r2 -= out[k].S * out[k].Omega;
        }
        const double oa = out[a].Omega, ob = out[b].Omega;
        if (std::abs(ob - oa) < 1e-9) return false;
        out[b].S = (r2 - oa * r1) / (ob - oa);
        out[a].S = r1 - out[b].S;
        return out[a].S > 0.0 && out[b].S > 0.0;
    }

    Eigen::VectorXd pack(const std::vector<LorentzianComponent>& ls) const {
        Eigen::VectorXd x(n_params());
        if (single) {
            x[0] = ls[0].Gamma;
            return x;
        }
        std::size_t f = 2 * m;
        for (std::size_t k = 0; k < m; ++k) {
            x[k] = ls[k].Omega;
            x[m + k] = ls[k].Gamma;
            if (k != a && k != b) x[f++] = ls[k].S;
        }
        return x;
    }
};

std::vector<Seed> initial_peaks(const FilteredSpectrum& s, int K, double prominence, double omega_min) {
    auto census = count_peaks(s, prominence, omega_min);
    std::vector<Peak> peaks = census.peaks;
    std::sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) {
        return x.prominence > y.prominence || (x.prominence == y.prominence && x.center < y.center);
    });
    if (peaks.size() > static_cast<std::size_t>(K)) peaks.resize(K);
    std::vector<Seed> seeds;
    for (const auto& p : peaks) seeds.push_back({p.center, p.height});
    if (seeds.size() < static_cast<std::size_t>(K)) {
        // shoulders: maxima of -S'' away from the peaks already taken
        std::vector<std::pair<double, Seed>> cand;
        const auto& v = s.values;
        for (std::size_t i = 2; i + 2 < v.size(); ++i) {
            if (s.omega[i] < std::max(omega_min, 1.0)) continue;
            auto curv = [&](std::size_t j) { return -(v[j + 1] - 2.0 * v[j] + v[j - 1]); };
            const double c = curv(i);
            if (c > 0.0 && c > curv(i - 1) && c >= curv(i + 1)) cand.push_back({c, {s.omega[i], v[i]}});
        }
        std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) {
            return x.first > y.first || (x.first == y.first && x.second.omega < y.second.omega);
        });
        for (const auto& [c, sd] : cand) {
            if (seeds.size() >= static_cast<std::size_t>(K)) break;
            bool close = false;
            for (const auto& e : seeds) close = close || std::abs(e.omega - sd.omega) < 30.0;
            if (!close) seeds.push_back(sd);
        }
    }
    // last resort: spread evenly over the populated range
    for (int k = 0; seeds.size() < static_cast<std::size_t>(K); ++k)
        seeds.push_back({std::max(omega_min, 50.0) + 150.0 * (k + 1), 1.0});
    std::sort(seeds.begin(), seeds.end(), [](const Seed& x, const Seed& y) { return x.omega < y.omega; });
    return seeds;
}

struct StartResult {
    bool ok = false;
    double cost = std::numeric_limits<double>::infinity();
    double initial_cost = 0.0;
    int iterations = 0;
    std::vector<LorentzianComponent> ls;
    std::string error;
};

} // namespace

SpectralDensityModel EffectiveEnvironment::model() const {
    SpectralDensityModel m;
    m.ar = ar;
    m.lorentzians = lorentzians;
    m.label = label;
    return m;
}

int auto_peak_count(const SpectralDensityModel& model, const FitOptions& o) {
    BathParameters p;
    p.temperature = o.temperature;
    p.tau = o.tau;
    p.filter_sigma = o.filter_sigma();
    p.dt = o.dt;
    const auto s = ft_spectrum(gaussian_filter(bcf_quadrature(model, p), p.sigma()));
    const double cut = (o.keep_ar && model.ar) ? kHighFrequencyCut : 0.0;
    return static_cast<int>(count_peaks(s, o.prominence, cut).count());
}

EffectiveEnvironment fit_effective(const SpectralDensityModel& model, const FitOptions& o) {
    validate(model);
    if (o.k_peaks && *o.k_peaks < 1) throw ConfigError("number of peaks must be >= 1");
    if (o.n_starts < 1) throw ConfigError("number of starts must be >= 1");
    const double sigma = o.filter_sigma();
    const bool has_ar = model.ar.has_value();
    const bool ar_passes = has_ar && o.keep_ar;
    const SpectralDensityModel high = model.without_ar();
    if (ar_passes && high.empty()) throw ConfigError("model has no structured part to fit");

    // spectrum for initialization (and AUTO)
    BathParameters ps;
    ps.temperature = o.temperature;
    ps.tau = o.tau;
    ps.filter_sigma = sigma;
    ps.dt = o.dt;
    const auto full_bcf = bcf_quadrature(model, ps);
    const auto spectrum = ft_spectrum(gaussian_filter(full_bcf, sigma));
    const double cut = ar_passes ? kHighFrequencyCut : 0.0;
    int K = o.k_peaks ? *o.k_peaks : static_cast<int>(count_peaks(spectrum, o.prominence, cut).count());
    if (K < 1) throw ConfigError("AUTO found no peaks to fit");

    // fit window: weights below e^-16 are dropped
    const std::size_t nfit =
        std::min(full_bcf.size(), static_cast<std::size_t>(std::ceil(4.0 * sigma / o.dt)) + 1);
    std::vector<cplx> target(nfit);
    std::vector<double> wsqrt(nfit);
    {
        std::vector<cplx> part(nfit, 0.0);
        if (ar_passes) {
            const auto h = bcf_quadrature(high, ps);
            for (std::size_t j = 0; j < nfit; ++j) part[j] = h.values[j];
        } else {
            for (std::size_t j = 0; j < nfit; ++j) part[j] = full_bcf.values[j];
        }
        double den = 0.0;
        for (std::size_t j = 0; j < nfit; ++j) {
            const double t = full_bcf.t(j);
            den += std::exp(-t * t / (sigma * sigma)) * std::norm(full_bcf.values[j]);
        }
        for (std::size_t j = 0; j < nfit; ++j) {
            const double t = full_bcf.t(j);
            wsqrt[j] = std::sqrt(std::exp(-t * t / (sigma * sigma)) / den);
            target[j] = part[j];
        }
    }

    const double lam_total = reorganization_energy(model);
    const double hr_total = huang_rhys_total(model);
    Layout lay;
    lay.H = ar_passes ? huang_rhys_total(high) : hr_total;
    lay.L = ar_passes ? reorganization_energy(high) : lam_total;
    const bool extra_ar = has_ar && !o.keep_ar;
    lay.m = static_cast<std::size_t>(K) + (extra_ar ? 1 : 0);
    lay.single = lay.m == 1;

    double omega_hi = 2000.0;
    for (const auto& l : model.lorentzians) omega_hi = std::max(omega_hi, 1.25 * l.Omega);
    for (const auto& d : model.deltas) omega_hi = std::max(omega_hi, 1.25 * d.omega);
    const double omega_lo = 1.0;

    const auto seeds = initial_peaks(spectrum, K, o.prominence, cut);

    auto run_start = [&](int start) {
        StartResult out;
        CounterRng rng(o.seed, static_cast<std::uint64_t>(start));
        std::vector<double> om, q;
        std::vector<double> gam;
        if (extra_ar) {
            om.push_back(kArPseudomode.Omega);
            q.push_back(kArPseudomode.S);
            gam.push_back(kArPseudomode.Gamma);
        }
        const double g0 = std::clamp(units::inverse_time_to_cm(sigma), kGammaMin, kGammaMax);
        for (const auto& sd : seeds) {
            double w = sd.omega;
            if (start > 0) w += o.jitter * (2.0 * rng.uniform() - 1.0);
            om.push_back(std::clamp(w, omega_lo, omega_hi));
            q.push_back(std::max(sd.height, 1e-300) / (w * w));
            gam.push_back(g0);
        }
        // normalize heights to a Huang-Rhys share before tilting
        const double qs = std::accumulate(q.begin(), q.end(), 0.0);
        for (auto& v : q) v /= qs;
        std::vector<double> s0 = lay.single ? std::vector<double>{lay.H}
                                            : tilted_weights(om, q, lay.H, lay.L);
        std::vector<LorentzianComponent> init(lay.m);
        for (std::size_t k = 0; k < lay.m; ++k) init[k] = {om[k], s0[k], gam[k]};
        Layout L = lay;
        if (!L.single) {
            // eliminate the two largest initial S with distinct centres
            std::vector<std::size_t> idx(L.m);
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return s0[x] > s0[y]; });
            L.a = idx[0];
            L.b = idx[1];
        }
        LsqProblem pb;
        const std::size_t np = L.n_params();
        pb.lower.resize(np);
        pb.upper.resize(np);
        if (L.single) {
            pb.lower[0] = kGammaMin;
            pb.upper[0] = kGammaMax;
        } else {
            for (std::size_t k = 0; k < L.m; ++k) {
                pb.lower[k] = omega_lo;
                pb.upper[k] = omega_hi;
                pb.lower[L.m + k] = kGammaMin;
                pb.upper[L.m + k] = kGammaMax;
            }
            for (std::size_t k = 2 * L.m; k < np; ++k) {
                pb.lower[k] = 1e-9 * L.H;
                pb.upper[k] = L.H;
            }
        }
        pb.residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
            std::vector<LorentzianComponent> ls;
            if (!L.unpack(x, ls)) return false;
            std::vector<cplx> fit(nfit, 0.0);
            for (const auto& l : ls) {
                const auto c = lorentzian_bcf(l, o.temperature, o.dt, nfit);
                for (std::size_t j = 0; j < nfit; ++j) fit[j] += c[j];
            }
            r.resize(2 * nfit);
            for (std::size_t j = 0; j < nfit; ++j) {
                const cplx d = (fit[j] - target[j]) * wsqrt[j];
                r[2 * j] = d.real();
                r[2 * j + 1] = d.imag();
            }
            return true;
        };
        LsqOptions lo;
        lo.max_iterations = o.max_iterations;
        const auto res = levenberg_marquardt(pb, L.pack(init), lo);
        out.ok = std::isfinite(res.cost);
        out.cost = res.cost;
        out.initial_cost = res.initial_cost;
        out.iterations = res.iterations;
        L.unpack(res.x, out.ls);
        return out;
    };

    std::vector<StartResult> results(o.n_starts);
    parallel_for(static_cast<std::size_t>(o.n_starts), o.threads, [&](std::size_t i) {
        try {
            results[i] = run_start(static_cast<int>(i));
        } catch (const Error& e) {
            results[i].ok = false;
            results[i].error = e.what();
        }
    });
    int best = -1;
    for (int i = 0; i < o.n_starts; ++i)
        if (results[i].ok && (best < 0 || results[i].cost < results[best].cost)) best = i;
    if (best < 0) {
        double bestr = std::numeric_limits<double>::infinity();
        for (const auto& r : results) bestr = std::min(bestr, r.cost);
        throw FitError("every multi-start failed (" + results[0].error + ")", bestr);
    }

    EffectiveEnvironment env;
    env.keep_ar = o.keep_ar;
    if (ar_passes) env.ar = model.ar;
    env.lorentzians = results[best].ls;
    std::sort(env.lorentzians.begin(), env.lorentzians.end(),
              [](const auto& x, const auto& y) { return x.Omega < y.Omega; });
    env.target_reorg = lam_total;
    env.target_hr = hr_total;
    env.label = "effective fit of '" + model.label + "'";
    FitReport rep;
    rep.objective = results[best].cost;
    rep.initial_objective = results[best].initial_cost;
    rep.iterations = results[best].iterations;
    rep.best_start = best;
    rep.n_starts = o.n_starts;
    rep.seed = o.seed;
    rep.k_peaks = K;
    rep.auto_k = !o.k_peaks.has_value();
    env.fit_report = rep;
    const auto [dr, dh] = constraint_residuals(env);
    env.fit_report->reorg_residual = dr;
    env.fit_report->hr_residual = dh;
    return env;
}

EffectiveEnvironment conventional_coarse_grain(const SpectralDensityModel& model, double Omega_cg,
                                               double Gamma_cg) {
    validate(model);
    if (!(Omega_cg > 0.0) || !(Gamma_cg > 0.0))
        throw ValidationError("conventional coarse graining needs Omega > 0 and Gamma > 0");
    const SpectralDensityModel high = model.without_ar();
    if (high.empty()) throw ConfigError("model has no structured part to coarse-grain");
    const double lam_h = reorganization_energy(high);
    const double per_unit = reorganization_energy(LorentzianComponent{Omega_cg, 1.0, Gamma_cg});
    EffectiveEnvironment env;
    env.keep_ar = true;
    env.ar = model.ar;
    env.lorentzians = {{Omega_cg, lam_h / per_unit, Gamma_cg}};
    env.target_reorg = reorganization_energy(model);
    env.target_hr = huang_rhys_total(model);
    env.label = "conventional coarse-graining of '" + model.label + "'";
    return env;
}

std::pair<double, double> constraint_residuals(const EffectiveEnvironment& env) {
    const auto m = env.model();
    const double lam = reorganization_energy(m);
    const double hr = huang_rhys_total(m);
    return {std::abs(lam - env.target_reorg) / env.target_reorg,
            std::abs(hr - env.target_hr) / env.target_hr};
}

std::string effective_to_json(const EffectiveEnvironment& env, int indent) {
    auto doc = nlohmann::json::parse(model_to_json(env.model()));
    doc["keep_ar"] = env.keep_ar;
    doc["target_reorg_cm1"] = env.target_reorg;
    doc["target_hr"] = env.target_hr;
    if (env.fit_report) {
        const auto& r = *env.fit_report;
        doc["fit_report"] = {{"objective", r.objective},
                             {"initial_objective", r.initial_objective},
                             {"bcf_distance", std::sqrt(r.objective)},
                             {"iterations", r.iterations},
                             {"best_start", r.best_start},
                             {"n_starts", r.n_starts},
                             {"seed", r.seed},
                             {"k_peaks", r.k_peaks},
                             {"auto_k", r.auto_k},
                             {"reorg_residual", r.reorg_residual},
                             {"hr_residual", r.hr_residual}};
    }
    return doc.dump(indent);
}

EffectiveEnvironment parse_effective(const std::string& text) {
    const auto m = parse_model(text);
    const auto doc = nlohmann::json::parse(text);
    EffectiveEnvironment env;
    env.ar = m.ar;
    env.lorentzians = m.lorentzians;
    env.label = m.label;
    env.keep_ar = doc.value("keep_ar", true);
    env.target_reorg = doc.value("target_reorg_cm1", reorganization_energy(m));
    env.target_hr = doc.value("target_hr", huang_rhys_total(m));
    if (doc.contains("fit_report")) {
        const auto& j = doc["fit_report"];
        FitReport r;
        r.objective = j.value("objective", 0.0);
        r.initial_objective = j.value("initial_objective", 0.0);
        r.iterations = j.value("iterations", 0);
        r.best_start = j.value("best_start", 0);
        r.n_starts = j.value("n_starts", 0);
        r.seed = j.value("seed", std::uint64_t{0});
        r.k_peaks = j.value("k_peaks", 0);
        r.auto_k = j.value("auto_k", false);
        r.reorg_residual = j.value("reorg_residual", 0.0);
        r.hr_residual = j.value("hr_residual", 0.0);
        env.fit_report = r;
    }
    return env;
}

} // namespace bathsmith
