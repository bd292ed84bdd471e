// model.hpp - Spectral-density models and electronic-system descriptions
//
// All energies and frequencies are in cm^-1, times in fs, temperatures in K.
// A SpectralDensityModel is the single source of truth for J(omega); every
// other module evaluates J through the functions declared here.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bathsmith {

// Smooth protein continuum (Adolphs-Renger form).
struct ARComponent {
    double S_total = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double w1 = 0.0; // cm^-1
    double w2 = 0.0; // cm^-1
};

// Antisymmetrized double Lorentzian centred at Omega with half-width Gamma.
struct LorentzianComponent {
    double Omega = 0.0;
    double S = 0.0;
    double Gamma = 0.0;
};

// Undamped mode, J = omega^2 s delta(omega - omega_k).
struct DeltaComponent {
    double omega = 0.0;
    double s = 0.0;
};

struct SpectralDensityModel {
    std::optional<ARComponent> ar;
    std::vector<LorentzianComponent> lorentzians;
    std::vector<DeltaComponent> deltas;
    std::string label;

    bool empty() const { return !ar && lorentzians.empty() && deltas.empty(); }

    // Same model without the AR continuum (the structured high-frequency part).
    SpectralDensityModel without_ar() const;
    SpectralDensityModel only_ar() const;
};

// Throws ValidationError if any parameter is non-positive or the model is empty.
void validate(const SpectralDensityModel& model);
void validate(const ARComponent& ar);
void validate(const LorentzianComponent& l);
void validate(const DeltaComponent& d);

double ar_density(const ARComponent& ar, double omega);
// Odd in omega, so it also provides the antisymmetric extension to omega < 0.
double lorentzian_density(const LorentzianComponent& l, double omega);

// J(omega)/omega for every continuous component, finite at omega = 0.
double density_over_omega(const SpectralDensityModel& model, double omega);

// Continuous part of J (AR + Lorentzians); deltas have no pointwise value.
double evaluate_J(const SpectralDensityModel& model, double omega);

double reorganization_energy(const SpectralDensityModel& model);
double reorganization_energy(const ARComponent& ar);
double reorganization_energy(const LorentzianComponent& l);

// Total Huang-Rhys factor. The Lorentzian form is linear in omega near zero,
// so its integral of J/omega^2 diverges logarithmically; each Lorentzian
// therefore contributes its nominal S (its narrow-width limit).
double huang_rhys_total(const SpectralDensityModel& model);
double huang_rhys_total(const ARComponent& ar);

// Integral of J_L/omega^2 over [omega_lo, inf) for one Lorentzian; grows like
// log(1/omega_lo) as omega_lo -> 0.
double lorentzian_hr_integral(const LorentzianComponent& l, double omega_lo);

// Thermalized density on the whole real line:
// J_beta(w) = sign(w) J(|w|) (1 + coth(w / 2 k_B T)) / 2.
double thermalized_density(const SpectralDensityModel& model, double temperature, double omega);

// (1 + coth(x)) / 2 style Bose factor n(w) + 1 for signed w; uses the
// small-x expansion to stay finite.
double bose_plus_one(double omega, double temperature);

// coth(omega / 2 k_B T) * J(omega) for omega >= 0, finite at omega = 0;
// T = 0 gives J(omega).
double thermal_weight_density(const SpectralDensityModel& model, double temperature, double omega);

// Frequencies where the continuous density has structure (peak centres and
// shoulders); used to place quadrature breakpoints.
std::vector<double> feature_points(const SpectralDensityModel& model);

// Width of the narrowest feature near omega (for panel grading).
double local_feature_width(const SpectralDensityModel& model, double omega);

struct ElectronicSystem {
    std::vector<double> site_energies;   // cm^-1
    Eigen::MatrixXd couplings;           // cm^-1, symmetric, zero diagonal
    std::vector<Eigen::Vector3d> dipoles;
    std::string label;

    std::size_t n_sites() const { return site_energies.size(); }
};

void validate(const ElectronicSystem& system);

struct DisorderSpec {
    double sigma = 0.0; // cm^-1
    std::size_t n_samples = 1;
    std::uint64_t seed = 0;
};

void validate(const DisorderSpec& disorder);

} // namespace bathsmith
