// lorentzian_bcf.hpp - Closed-form correlation function of one Lorentzian component

#pragma once

#include <complex>
#include <vector>

#include "bathsmith/model.hpp"

namespace bathsmith {

// exp(z) * E1(z) for complex z off the negative real axis.
std::complex<double> scaled_e1(std::complex<double> z);

// int_W^inf J_L(w) e^{-iwt} dw on t_j = j*dt (valid where coth ~ 1 beyond W).
std::vector<std::complex<double>> lorentzian_tail(const LorentzianComponent& l, double W,
                                                  double dt, std::size_t n);

// Full BCF of one Lorentzian at temperature T: two damped poles plus the
// Matsubara series (an integral at T = 0).
std::vector<std::complex<double>> lorentzian_bcf(const LorentzianComponent& l, double temperature,
                                                 double dt, std::size_t n);

// Pole part only, g^2 [(n+1) e^{-i Omega t} + n e^{i Omega t}] e^{-Gamma t} with
// complex occupation; this is what a damped pseudomode reproduces.
std::vector<std::complex<double>> lorentzian_pole_bcf(const LorentzianComponent& l,
                                                      double temperature, double dt,
                                                      std::size_t n);

} // namespace bathsmith
