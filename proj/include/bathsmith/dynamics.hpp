// dynamics.hpp - Absorption spectra: cumulant oracle, pseudomode propagation,
// static-disorder ensembles

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bathsmith/bcf.hpp"
#include "bathsmith/model.hpp"

namespace bathsmith {

// d(t) on t_j = j * dt. The physical correlation is values[j] * exp(-i frame t_j),
// i.e. values are stored in a frame rotating at frame_cm1.
struct DipoleCorrelation {
    double dt = 0.0;
    std::vector<cplx> values;
    double frame_cm1 = 0.0;
    double window_sigma = 0.0; // fs, 0 = none
    std::size_t n_samples = 1;
    std::uint64_t seed = 0;
    std::string label;

    std::size_t size() const { return values.size(); }
};

struct OmegaGrid {
    double lo = 11500.0;
    double hi = 13500.0;
    double spacing = 1.0;
    std::vector<double> points() const;
};

struct AbsorptionSpectrum {
    std::vector<double> omega;
    std::vector<double> intensity;
    double min_ratio = 0.0;          // most negative value / max (ringing)
    std::size_t n_negative = 0;      // samples below zero
    std::string environment;
    std::string system;
    DisorderSpec disorder;
    double window_sigma = 0.0;
};

// g(t) = int J/w^2 [coth(w/2kT)(1 - cos wt) + i (sin wt - wt)] dw, deltas in closed form.
std::vector<cplx> cumulant_lineshape(const SpectralDensityModel& model, double temperature, double dt,
                                     std::size_t n);

// |mu|^2 exp(-g(t)) in the frame of epsilon (no reorganization shift applied).
DipoleCorrelation monomer_correlation(const SpectralDensityModel& model, double temperature, double dt,
                                      std::size_t n, double epsilon);

DipoleCorrelation apply_window(const DipoleCorrelation& d, double sigma);

// A(w) = (1/pi) Re int_0^inf e^{iwt} d(t) dt, trapezoidal.
AbsorptionSpectrum absorption_from_correlation(const DipoleCorrelation& d, const OmegaGrid& grid);

AbsorptionSpectrum monomer_absorption(const SpectralDensityModel& model, double temperature, double epsilon,
                                      double window_sigma, double dt, std::size_t n, const OmegaGrid& grid);

// Damped harmonic mode; Gamma = 0 gives an undamped mode.
struct PseudomodeSpec {
    double Omega = 0.0;
    double S = 0.0;
    double Gamma = 0.0;
};

// Single damped mode standing in for the AR continuum in propagation.
inline constexpr PseudomodeSpec kArPseudomode{160.0, 0.164, 133.0};

// Lorentzians become damped modes, deltas undamped ones. An AR component
// needs a substitute mode (ConfigError otherwise).
std::vector<PseudomodeSpec> pseudomodes_from(const SpectralDensityModel& model,
                                             const std::optional<PseudomodeSpec>& ar_mode = std::nullopt);

enum class ThermalTreatment {
    // Each warm mode becomes a zero-temperature pair at +Omega (g^2 (n+1)) and
    // -Omega (g^2 n): same correlation function, vacuum bra side.
    Thermofield,
    // Thermal initial state and thermal Lindblad terms on ket and bra.
    Direct,
};

struct PseudomodeConfig {
    // One list per site, or a single list used for every site.
    std::vector<std::vector<PseudomodeSpec>> site_modes;
    int fock_dim = 3;             // ket levels per mode
    int max_excitations = 0;      // cap on the summed ket occupation, 0 = none
    // Keep only configurations with prod_k w_k^{n_k} / n_k! >= min_weight,
    // w_k the mode's effective Huang-Rhys factor; 0 = off.
    double min_weight = 0.0;
    double bath_temperature = 77.0;
    ThermalTreatment thermal = ThermalTreatment::Thermofield;
    // Thermofield: reproduce the full Lorentzian correlation (complex pole
    // weights plus Matsubara modes shared per site, the rest as a Markovian
    // rate) instead of the real-occupation pole part.
    bool exact_lorentzian = true;
    int matsubara_modes = 2;
    int bra_levels = 4;           // Direct: bra levels of warm modes (cold modes keep 1)
    int max_bra_excitations = 0;  // Direct: cap on the summed bra occupation
    double dt = 0.5;              // fs, RK4 step and output spacing
    double horizon = 300.0;       // fs
    bool check_convergence = false;
    double convergence_tol = 1e-5;
    std::size_t budget = 10'000'000; // complex entries
    std::string label;
};

// g^2 = S (Omega^2 + Gamma^2): the pole part of the Lorentzian BCF.
double pseudomode_coupling_sq(const PseudomodeSpec& m);

// Closed-form BCF and lineshape of damped modes with real occupation n(Omega).
std::vector<cplx> pseudomode_bcf(const std::vector<PseudomodeSpec>& modes, double temperature, double dt,
                                 std::size_t n);
std::vector<cplx> pseudomode_lineshape(const std::vector<PseudomodeSpec>& modes, double temperature,
                                       double dt, std::size_t n);

struct EngineStats {
    std::size_t dimension = 0;
    std::size_t nnz = 0;
    std::size_t n_modes = 0;        // after thermofield splitting
    double discarded_population = 0; // thermal weight outside the basis (Direct)
};

class PseudomodeEngine {
public:
    // Throws ConfigError when the Liouville dimension exceeds the budget;
    // the message carries the required memory.
    PseudomodeEngine(const ElectronicSystem& system, const PseudomodeConfig& config);
    ~PseudomodeEngine();
    PseudomodeEngine(PseudomodeEngine&&) noexcept;

    const EngineStats& stats() const;

    // d(t) for the given site energies, in the frame of the mean bundled energies.
    DipoleCorrelation propagate(const std::vector<double>& site_energies) const;
    DipoleCorrelation propagate(const std::vector<double>& site_energies, double dt) const;
    double frame() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

DipoleCorrelation pseudomode_propagate(const ElectronicSystem& system, const PseudomodeConfig& config);

// Mean of d(t) over Gaussian site-energy draws (sample s uses substream s).
DipoleCorrelation disorder_ensemble(const ElectronicSystem& system, const PseudomodeConfig& config,
                                    const DisorderSpec& disorder, std::size_t threads = 1);

// Same with a ready engine (several scans share one build).
DipoleCorrelation disorder_ensemble(const PseudomodeEngine& engine, const ElectronicSystem& system,
                                    const DisorderSpec& disorder, std::size_t threads = 1);

// O = int A1 A2 / sqrt(int A1^2 int A2^2) on a shared grid.
double spectral_overlap(const AbsorptionSpectrum& a, const AbsorptionSpectrum& b);

// Copy of a two-site system with coupling V.
ElectronicSystem with_coupling(const ElectronicSystem& dimer, double V);

struct DimerScanOptions {
    double window_sigma = 0.0; // fs, applied before the transform
    OmegaGrid grid;
    std::size_t threads = 1;
};

std::vector<AbsorptionSpectrum> dimer_scan(const ElectronicSystem& dimer, const std::vector<double>& V_list,
                                           const PseudomodeConfig& config, const DisorderSpec& disorder,
                                           const DimerScanOptions& options);

} // namespace bathsmith
