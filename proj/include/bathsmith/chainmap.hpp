// chainmap.hpp - Orthogonal-polynomial chain mapping, truncation and star form

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bathsmith/bcf.hpp"
#include "bathsmith/model.hpp"

namespace bathsmith {

struct ChainCoefficients {
    std::vector<double> alphas; // cm^-1
    std::vector<double> betas;  // cm^-2; betas[0] is the total weight of the measure

    std::size_t length() const { return alphas.size(); }
    double kappa() const { return std::sqrt(betas.at(0)); }
    ChainCoefficients truncated(std::size_t n) const;
};

struct DiscreteMode {
    double omega = 0.0; // cm^-1, signed
    double g = 0.0;     // cm^-1
};

struct DiscreteEnvironment {
    std::vector<DiscreteMode> modes;
    std::size_t chain_length = 0;
    double horizon = 0.0; // fs, 0 if not truncated for a horizon
    double kappa = 0.0;
};

// Point-mass approximation of a measure.
struct DiscreteMeasure {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Composite Gauss-Legendre discretization: at least `panels` panels of
// `nodes_per_panel` points, split further wherever local_width (if given)
// asks for narrower panels.
DiscreteMeasure discretize_measure(const std::function<double(double)>& density, double lo, double hi,
                                   const std::function<double(double)>& local_width = {},
                                   int panels = 64, int nodes_per_panel = 32);

// Lanczos with full reorthogonalization on a discrete measure. Throws
// NumericError naming the index when beta_n <= 0 or is not finite.
ChainCoefficients lanczos_recurrence(const DiscreteMeasure& measure, std::size_t n_coeffs);

ChainCoefficients recurrence_coefficients(const std::function<double(double)>& density, double lo,
                                          double hi, std::size_t n_coeffs,
                                          const std::function<double(double)>& local_width = {});

// Thermalized measure J_beta of a model (T > 0) with its feature widths; the
// default support matches the FMO data at 77 K.
struct ThermalMeasure {
    std::function<double(double)> density;
    std::function<double(double)> local_width;
    double lo = -2000.0;
    double hi = 3000.0;
};
ThermalMeasure thermal_measure(const SpectralDensityModel& model, double temperature);
DiscreteMeasure discretize(const ThermalMeasure& m);

// Weight of J_beta outside [lo, hi] relative to the total.
double support_tail_weight(const SpectralDensityModel& model, double temperature, double lo, double hi);

DiscreteEnvironment chain_to_star(const ChainCoefficients& chain);

// C(t) = sum_j g_j^2 exp(-i w_j t).
CorrelationFunction discrete_bcf(const DiscreteEnvironment& env, double dt, std::size_t n);

struct ChainSearch {
    std::size_t length = 0;
    double distance = 0.0;
    std::vector<std::pair<std::size_t, double>> trace; // (length, distance) evaluated
};

// Smallest chain length (doubling, then bisection) whose star BCF is within
// tol of the reference on [0, tau], weighting exp(-t^2/sigma^2) with
// sigma = tau/3. Throws NumericError with the trace if cap is reached.
ChainSearch chain_length_for_horizon(const DiscreteMeasure& measure, const CorrelationFunction& reference,
                                     double tau, double tol, std::size_t cap = 1024);

std::string chain_csv(const ChainCoefficients& chain, const std::vector<std::pair<std::string, std::string>>& meta = {});
std::string star_csv(const DiscreteEnvironment& env, const std::vector<std::pair<std::string, std::string>>& meta = {});
DiscreteEnvironment parse_star_csv(const std::string& text);

// Positive-frequency modes as delta components (s = g^2 / w^2); the number
// of negative-frequency modes that cannot be represented is returned.
SpectralDensityModel star_to_delta_model(const DiscreteEnvironment& env, std::size_t* n_negative = nullptr);

} // namespace bathsmith
