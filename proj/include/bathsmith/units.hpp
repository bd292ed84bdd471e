// units.hpp - Canonical units (cm^-1, fs, K) and the single conversion table

#pragma once

namespace bathsmith::units {

// Angular frequency in rad/fs per wavenumber: omega = 2*pi*c*nu.
inline constexpr double kRadPerFsPerCm = 1.883651567e-4;
// Boltzmann constant in cm^-1 / K.
inline constexpr double kBoltzmannCm = 0.695034800;
// 1 meV expressed in cm^-1.
inline constexpr double kCmPerMeV = 8.06554;
inline constexpr double kPi = 3.14159265358979323846;

double mev_to_cm(double mev);
double cm_to_mev(double cm);

// Phase per fs of a wavenumber (rad/fs).
constexpr double angular(double cm) { return cm * kRadPerFsPerCm; }

// Wavenumber equivalent of a rate in fs^-1.
constexpr double rate_to_cm(double per_fs) { return per_fs / kRadPerFsPerCm; }

// Wavenumber equivalent of the inverse of a time in fs (e.g. (20 fs)^-1).
constexpr double inverse_time_to_cm(double fs) { return rate_to_cm(1.0 / fs); }

// k_B T in cm^-1.
constexpr double thermal_energy(double kelvin) { return kBoltzmannCm * kelvin; }

} // namespace bathsmith::units
