// model.cpp - Spectral-density evaluation, conservation integrals, validation

#include "bathsmith/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bathsmith/error.hpp"
#include "bathsmith/quadrature.hpp"
#include "bathsmith/units.hpp"

namespace bathsmith {

namespace {

constexpr double kFactorial7 = 5040.0;
constexpr double kRelTol = 1e-11;
constexpr double kArCutoff = 8000.0; // cm^-1, tail below 1e-12 of the peak

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << what << " must be strictly positive (got " << v << ")";
        throw ValidationError(os.str());
    }
}

double ar_over_omega(const ARComponent& ar, double omega) {
    const double a = std::abs(omega);
    const double pref = ar.S_total / (ar.s1 + ar.s2);
    auto term = [&](double s, double wi) {
        const double r = a / wi;
        return s / (kFactorial7 * 2.0) * r * r * r * r * std::exp(-std::sqrt(r));
    };
    return pref * (term(ar.s1, ar.w1) + term(ar.s2, ar.w2));
}

double lorentzian_over_omega(const LorentzianComponent& l, double omega) {
    const double O = l.Omega, G = l.Gamma;
    const double num = 4.0 * O * l.S * G * (O * O + G * G);
    const double dp = (omega + O) * (omega + O) + G * G;
    const double dm = (omega - O) * (omega - O) + G * G;
    return num / (units::kPi * dp * dm);
}

std::vector<double> ar_breaks(const ARComponent& ar) {
    std::vector<double> b;
    for (double wi : {ar.w1, ar.w2})
        for (double k : {1.0, 4.0, 16.0, 36.0, 64.0, 100.0, 196.0, 400.0, 900.0, 1600.0})
            b.push_back(k * wi);
    return b;
}

std::vector<double> lorentzian_breaks(const LorentzianComponent& l) {
    std::vector<double> b;
    for (double k : {-20.0, -5.0, -1.0, 0.0, 1.0, 5.0, 20.0}) b.push_back(l.Omega + k * l.Gamma);
    return b;
}

} // namespace

SpectralDensityModel SpectralDensityModel::without_ar() const {
    SpectralDensityModel m = *this;
    m.ar.reset();
    return m;
}

SpectralDensityModel SpectralDensityModel::only_ar() const {
    SpectralDensityModel m;
    m.ar = ar;
    m.label = label + " (AR part)";
    return m;
}

void validate(const ARComponent& ar) {
    require_positive(ar.S_total, "ar.S");
    require_positive(ar.s1, "ar.s1");
    require_positive(ar.s2, "ar.s2");
    require_positive(ar.w1, "ar.w1");
    require_positive(ar.w2, "ar.w2");
}

void validate(const LorentzianComponent& l) {
    require_positive(l.Omega, "lorentzian omega");
    require_positive(l.S, "lorentzian hr");
    require_positive(l.Gamma, "lorentzian gamma");
}

void validate(const DeltaComponent& d) {
    require_positive(d.omega, "delta omega");
    require_positive(d.s, "delta hr");
}

void validate(const SpectralDensityModel& model) {
    if (model.empty()) throw ValidationError("model must contain at least one component");
    if (model.ar) validate(*model.ar);
    for (const auto& l : model.lorentzians) validate(l);
    for (const auto& d : model.deltas) validate(d);
}

double ar_density(const ARComponent& ar, double omega) { return omega * ar_over_omega(ar, omega); }

double lorentzian_density(const LorentzianComponent& l, double omega) {
    return omega * lorentzian_over_omega(l, omega);
}

double density_over_omega(const SpectralDensityModel& model, double omega) {
    double v = 0.0;
    if (model.ar) v += ar_over_omega(*model.ar, omega);
    for (const auto& l : model.lorentzians) v += lorentzian_over_omega(l, omega);
    return v;
}

double evaluate_J(const SpectralDensityModel& model, double omega) {
    if (omega < 0.0) throw DomainError("evaluate_J: omega must be >= 0");
    return omega * density_over_omega(model, omega);
}

double reorganization_energy(const ARComponent& ar) {
    auto f = [&](double w) { return ar_over_omega(ar, w); };
    const auto br = ar_breaks(ar);
    return quad::integrate_with_breaks(f, 0.0, kArCutoff, br, kRelTol).value;
}

double reorganization_energy(const LorentzianComponent& l) {
    auto f = [&](double w) { return lorentzian_over_omega(l, w); };
    const auto br = lorentzian_breaks(l);
    const double hi = l.Omega + 20.0 * l.Gamma;
    double v = quad::integrate_with_breaks(f, 0.0, hi, br, kRelTol).value;
    v += quad::integrate(f, hi, std::numeric_limits<double>::infinity(), kRelTol).value;
    return v;
}

double reorganization_energy(const SpectralDensityModel& model) {
    double v = 0.0;
    if (model.ar) v += reorganization_energy(*model.ar);
    for (const auto& l : model.lorentzians) v += reorganization_energy(l);
    for (const auto& d : model.deltas) v += d.omega * d.s;
    return v;
}

double huang_rhys_total(const ARComponent& ar) {
    auto f = [&](double w) { return w > 0.0 ? ar_over_omega(ar, w) / w : 0.0; };
    const auto br = ar_breaks(ar);
    return quad::integrate_with_breaks(f, 0.0, kArCutoff, br, kRelTol).value;
}

double huang_rhys_total(const SpectralDensityModel& model) {
    double v = 0.0;
    if (model.ar) v += huang_rhys_total(*model.ar);
    for (const auto& l : model.lorentzians) v += l.S;
    for (const auto& d : model.deltas) v += d.s;
    return v;
}

double lorentzian_hr_integral(const LorentzianComponent& l, double omega_lo) {
    if (!(omega_lo > 0.0)) throw DomainError("lorentzian_hr_integral: omega_lo must be > 0");
    // w = e^u removes the 1/w singularity near the lower limit
    auto g = [&](double u) { return lorentzian_over_omega(l, std::exp(u)); };
    std::vector<double> br;
    for (double b : lorentzian_breaks(l))
        if (b > 0.0) br.push_back(std::log(b));
    const double hi = std::max(omega_lo, l.Omega + 20.0 * l.Gamma);
    double v = quad::integrate_with_breaks(g, std::log(omega_lo), std::log(hi), br, kRelTol).value;
    auto f = [&](double w) { return lorentzian_over_omega(l, w) / w; };
    v += quad::integrate(f, hi, std::numeric_limits<double>::infinity(), kRelTol).value;
    return v;
}

double bose_plus_one(double omega, double temperature) {
    // (1 + coth(x)) / 2 with x = omega / (2 k_B T)
    if (temperature <= 0.0) return omega > 0.0 ? 1.0 : 0.0;
    const double x = omega / (2.0 * units::thermal_energy(temperature));
    if (std::abs(x) < 1e-3) return 0.5 * (1.0 + 1.0 / x + x / 3.0);
    if (x > 40.0) return 1.0;
    if (x < -350.0) return 0.0;
    // equals 1 / (1 - e^{-2x}); no cancellation for x < 0
    return -1.0 / std::expm1(-2.0 * x);
}

double thermalized_density(const SpectralDensityModel& model, double temperature, double omega) {
    if (!(temperature > 0.0)) throw DomainError("thermalized_density: temperature must be > 0");
    const double kt2 = 2.0 * units::thermal_energy(temperature);
    const double x = omega / kt2;
    // J_odd(w) = w * (J/w)(|w|); J/w is even for every continuous form.
    const double slope = density_over_omega(model, std::abs(omega));
    if (std::abs(x) < 1e-3) {
        // w * slope * (1 + 1/x + x/3) / 2 = slope * (w + kt2 + w x / 3) / 2
        return 0.5 * slope * (omega + kt2 + omega * x / 3.0);
    }
    return omega * slope * bose_plus_one(omega, temperature);
}

double thermal_weight_density(const SpectralDensityModel& model, double temperature,
                              double omega) {
    const double slope = density_over_omega(model, omega);
    if (temperature <= 0.0) return omega * slope;
    const double kt2 = 2.0 * units::thermal_energy(temperature);
    const double x = omega / kt2;
    if (x < 1e-3) return slope * (kt2 + omega * x / 3.0);
    if (x > 40.0) return omega * slope;
    return omega * slope / std::tanh(x);
}

std::vector<double> feature_points(const SpectralDensityModel& model) {
    std::vector<double> pts;
    if (model.ar) {
        auto b = ar_breaks(*model.ar);
        pts.insert(pts.end(), b.begin(), b.end());
    }
    for (const auto& l : model.lorentzians) {
        auto b = lorentzian_breaks(l);
        pts.insert(pts.end(), b.begin(), b.end());
    }
    for (const auto& d : model.deltas) pts.push_back(d.omega);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double local_feature_width(const SpectralDensityModel& model, double omega) {
    double w = std::numeric_limits<double>::infinity();
    const double a = std::abs(omega);
    for (const auto& l : model.lorentzians)
        w = std::min(w, std::max(0.5 * l.Gamma, 0.25 * std::abs(a - l.Omega)));
    if (model.ar) {
        const double ws = std::min(model.ar->w1, model.ar->w2);
        w = std::min(w, std::max(0.5 * ws, 0.5 * std::sqrt(a * ws) + 0.25 * ws));
    }
    return w;
}

void validate(const ElectronicSystem& system) {
    const auto n = system.site_energies.size();
    if (n == 0) throw ValidationError("electronic system must have at least one site");
    if (system.couplings.rows() != static_cast<Eigen::Index>(n) ||
        system.couplings.cols() != static_cast<Eigen::Index>(n))
        throw ValidationError("couplings matrix must be n_sites x n_sites");
    for (std::size_t i = 0; i < n; ++i) {
        if (system.couplings(i, i) != 0.0)
            throw ValidationError("couplings matrix must have a zero diagonal");
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(system.couplings(i, j) - system.couplings(j, i)) > 1e-12)
                throw ValidationError("couplings matrix must be symmetric");
    }
    if (system.dipoles.size() != n)
        throw ValidationError("dipoles list length must equal the number of sites");
}

void validate(const DisorderSpec& disorder) {
    if (!(disorder.sigma >= 0.0)) throw ValidationError("disorder sigma must be >= 0");
    if (disorder.n_samples < 1) throw ValidationError("disorder n_samples must be >= 1");
}

} // namespace bathsmith
