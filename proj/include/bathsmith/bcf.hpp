// bcf.hpp - Bath correlation functions, Gaussian filtering, FT spectra, peak census

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bathsmith/model.hpp"

namespace bathsmith {

using cplx = std::complex<double>;

struct BathParameters {
    double temperature = 77.0; // K, 0 allowed
    double tau = 300.0;        // fs, the horizon (3 sigma of the filter)
    double filter_sigma = 0.0; // fs, 0 selects tau / 3
    double dt = 0.25;          // fs
    double length = 0.0;       // fs, grid end; 0 selects 4 * tau

    double sigma() const { return filter_sigma > 0.0 ? filter_sigma : tau / 3.0; }
    double grid_end() const { return length > 0.0 ? length : 4.0 * tau; }
    std::size_t n_points() const;
};

// Throws ConfigError (tau, dt, sigma must be positive, tau/dt >= 64).
void validate(const BathParameters& p);

struct CorrelationFunction {
    double dt = 0.0; // fs; t_j = j * dt
    std::vector<cplx> values;
    double temperature = 0.0;
    std::string label;

    std::size_t size() const { return values.size(); }
    double t(std::size_t j) const { return static_cast<double>(j) * dt; }
    std::vector<double> t_grid() const;
};

struct FilteredSpectrum {
    std::vector<double> omega; // cm^-1, uniform
    std::vector<double> values;
    double filter_sigma = 0.0;  // fs, 0 if unfiltered
    double tail_ratio = 0.0;    // |C(t_end)| / |C(0)| of the transformed input
    std::string label;
};

// C(t) = int_0^inf J(w) [coth(w/2kT) cos(wt) - i sin(wt)] dw on the grid of p,
// plus delta modes in closed form. The continuous part uses a composite
// Gauss-Legendre rule fine enough for the last grid time; Lorentzian tails
// beyond the rule's cutoff are added exactly.
CorrelationFunction bcf_quadrature(const SpectralDensityModel& model, const BathParameters& p);

// Same integral at one time by adaptive quadrature (independent check path).
cplx bcf_at(const SpectralDensityModel& model, double temperature, double t_fs,
            double rel_tol = 1e-10);

// C(0) = int_0^inf J(w) coth(w/2kT) dw (+ deltas).
double bcf_zero(const SpectralDensityModel& model, double temperature);

// Values multiplied by exp(-t^2 / 2 sigma^2).
CorrelationFunction gaussian_filter(const CorrelationFunction& c, double sigma);

struct SpectrumGrid {
    double omega_max = 2000.0; // grid covers [-omega_max/4, omega_max]
    double spacing = 1.0;      // cm^-1, at most 1
};

// One-sided trapezoidal transform S(w) = (1/pi) Re int_0^inf e^{iwt} C(t) dt.
// Throws ConfigError if omega_max is above the grid's Nyquist frequency,
// the spacing is not in (0, 1] or the input has fewer than 2 samples.
FilteredSpectrum ft_spectrum(const CorrelationFunction& c, const SpectrumGrid& grid = {});

// Same transform on an explicit frequency list.
std::vector<double> one_sided_transform(const CorrelationFunction& c,
                                        const std::vector<double>& omega);

struct Peak {
    double center = 0.0;
    double height = 0.0;
    double prominence = 0.0; // absolute
};

struct PeakCensus {
    std::vector<Peak> peaks; // sorted by center
    std::size_t count() const { return peaks.size(); }
};

// Tuned so the FMO filtered spectra give the high-frequency counts at
// 300 fs / 1 ps / 2 ps (see README); exposed via --prominence.
inline constexpr double kDefaultProminence = 2.5e-4;
// Peaks below this belong to the AR continuum.
inline constexpr double kHighFrequencyCut = 100.0;

// Local maxima on w > 0 whose topographic prominence is at least
// prominence * max(values on w > 0), then restricted to w >= omega_min.
PeakCensus count_peaks(const FilteredSpectrum& s, double prominence = kDefaultProminence,
                       double omega_min = 0.0);

// Gaussian-weighted relative L2 distance, weights exp(-t^2/sigma^2), over
// samples with t <= t_max. Throws ConfigError on grid mismatch.
double bcf_distance(const CorrelationFunction& a, const CorrelationFunction& b, double sigma,
                    double t_max = -1.0);

// Sum of two correlation functions on identical grids.
CorrelationFunction add(const CorrelationFunction& a, const CorrelationFunction& b);

} // namespace bathsmith
