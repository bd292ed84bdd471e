// coarsegrain.hpp - Constrained Lorentzian fits to the filtered BCF, and the
// single-Lorentzian conventional baseline

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bathsmith/bcf.hpp"
#include "bathsmith/model.hpp"
#include "bathsmith/rng.hpp"

namespace bathsmith {

struct FitReport {
    double objective = 0.0;         // weighted residual / weighted |C_target|^2 (distance^2)
    double initial_objective = 0.0; // same, at the best start's initial point
    int iterations = 0;
    int best_start = 0;
    int n_starts = 0;
    std::uint64_t seed = 0;
    int k_peaks = 0;
    bool auto_k = false;
    double reorg_residual = 0.0; // relative, recomputed by quadrature
    double hr_residual = 0.0;
};

struct EffectiveEnvironment {
    bool keep_ar = true;
    std::optional<ARComponent> ar;
    std::vector<LorentzianComponent> lorentzians;
    double target_reorg = 0.0; // cm^-1, total of the source model
    double target_hr = 0.0;
    std::optional<FitReport> fit_report; // absent for the conventional construction
    std::string label;

    SpectralDensityModel model() const;
};

struct FitOptions {
    double temperature = 77.0;
    double tau = 300.0;       // fs
    double sigma = 0.0;       // fs, 0 selects tau / 3
    double dt = 0.25;         // fs
    std::optional<int> k_peaks; // empty = AUTO
    bool keep_ar = true;
    int n_starts = 16;
    std::uint64_t seed = kDefaultSeed;
    std::size_t threads = 1;
    double prominence = kDefaultProminence;
    double jitter = 20.0;     // cm^-1, uniform jitter of the initial centres
    int max_iterations = 200;

    double filter_sigma() const { return sigma > 0.0 ? sigma : tau / 3.0; }
};

// Fits K Lorentzians (plus one for the AR part when keep_ar is false and the
// model has one) under exact conservation of the total reorganization energy
// and nominal Huang-Rhys factor. Throws ConfigError for K < 1, FitError if
// every start fails.
EffectiveEnvironment fit_effective(const SpectralDensityModel& model, const FitOptions& options);

// AUTO peak count: high-frequency peaks of the filtered spectrum at tau.
int auto_peak_count(const SpectralDensityModel& model, const FitOptions& options);

// One Lorentzian at (Omega_cg, S_cg, Gamma_cg), S_cg conserving the
// reorganization energy of the non-AR part; the AR part is kept.
EffectiveEnvironment conventional_coarse_grain(const SpectralDensityModel& model, double Omega_cg,
                                               double Gamma_cg);

// Relative violation of the two conservation constraints, recomputed from scratch.
std::pair<double, double> constraint_residuals(const EffectiveEnvironment& env);

// Model schema plus keep_ar / targets / fit_report.
std::string effective_to_json(const EffectiveEnvironment& env, int indent = 2);
EffectiveEnvironment parse_effective(const std::string& text);

} // namespace bathsmith
