// scenario.hpp - Absorption run descriptions (system, environment, disorder, grid)

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bathsmith/dynamics.hpp"

namespace bathsmith {

struct Scenario {
    std::string label;
    ElectronicSystem system;
    SpectralDensityModel environment;
    std::optional<PseudomodeSpec> ar_mode; // stands in for an AR continuum
    std::size_t keep_modes = 0;            // keep the K Lorentzians with largest reorganization, 0 = all
    DisorderSpec disorder;                 // sigma 0 = mean energies only
    std::vector<double> coupling_scan;     // two-site V values; empty = system as given
    OmegaGrid grid;
    double window_sigma = 0.0;             // fs
    PseudomodeConfig propagation;          // site_modes filled from the environment
    std::vector<std::filesystem::path> inputs;
};

// Referenced files resolve against base_dir first, then the data directory.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::string& name_or_path);

// Modes used for propagation after AR substitution and the keep_modes cut.
std::vector<PseudomodeSpec> scenario_modes(const Scenario& s);

// One spectrum per scanned coupling, or one for the system as given.
std::vector<AbsorptionSpectrum> run_scenario(const Scenario& s, std::size_t threads,
                                             std::vector<DipoleCorrelation>* correlations = nullptr);

} // namespace bathsmith
