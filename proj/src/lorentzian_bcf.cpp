// lorentzian_bcf.cpp - residue evaluation of the Lorentzian BCF and its high-frequency tail

#include "bathsmith/lorentzian_bcf.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/expint.hpp>

#include "bathsmith/error.hpp"
#include "bathsmith/quadrature.hpp"
#include "bathsmith/units.hpp"

namespace bathsmith {

using cd = std::complex<double>;

cd scaled_e1(cd z) {
    constexpr double euler_gamma = 0.57721566490153286061;
    if (z == cd(0.0)) throw DomainError("scaled_e1: E1 is singular at 0");
    if (std::abs(z) < 1.5) {
        // E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
        cd term = 1.0, sum = 0.0;
        for (int k = 1; k < 200; ++k) {
            term *= -z / static_cast<double>(k);
            const cd add = term / static_cast<double>(k);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum)) break;
        }
        return std::exp(z) * (-euler_gamma - std::log(z) - sum);
    }
    // modified Lentz on e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...)))
    constexpr double tiny = 1e-300;
    cd b = z + 1.0;
    cd c = 1.0 / tiny;
    cd d = 1.0 / b;
    cd h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const cd del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    throw NumericError("scaled_e1: continued fraction did not converge");
}

std::vector<cd> lorentzian_tail(const LorentzianComponent& l, double W, double dt, std::size_t n) {
    const double O = l.Omega, G = l.Gamma;
    const double A = l.S * (O * O + G * G);
    std::vector<cd> out(n);
    if (n == 0) return out;
    out[0] = A / units::kPi * (std::atan((W + O) / G) - std::atan((W - O) / G));
    const cd poles[4] = {{O, G}, {O, -G}, {-O, G}, {-O, -G}};
    const double signs[4] = {1.0, -1.0, -1.0, 1.0};
    const cd pref = A / (2.0 * units::kPi * cd(0.0, 1.0));
    for (std::size_t j = 1; j < n; ++j) {
        const double tau = units::angular(static_cast<double>(j) * dt);
        cd acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += signs[k] * scaled_e1(cd(0.0, tau) * (W - poles[k]));
        out[j] = pref * std::exp(cd(0.0, -W * tau)) * acc;
    }
    return out;
}

namespace {

// 1/(e^x - 1) for complex x, zero once the exponential overflows
cd bose(cd x) {
    if (x.real() > 700.0) return 0.0;
    return 1.0 / (std::exp(x) - 1.0);
}

double matsubara_denominator(double O, double G, double nu) {
    const double a = O * O + G * G - nu * nu;
    return a * a + 4.0 * nu * nu * O * O;
}

} // namespace

std::vector<cd> lorentzian_pole_bcf(const LorentzianComponent& l, double temperature, double dt,
                                    std::size_t n) {
    const double O = l.Omega, G = l.Gamma;
    const double A = l.S * (O * O + G * G);
    cd n_minus = 0.0, n_plus = 0.0;
    if (temperature > 0.0) {
        const double kt = units::thermal_energy(temperature);
        n_minus = bose(cd(O, -G) / kt);
        n_plus = bose(cd(O, G) / kt);
    }
    std::vector<cd> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double tau = units::angular(static_cast<double>(j) * dt);
        const cd em = std::exp(cd(-G * tau, -O * tau));
        const cd ep = std::exp(cd(-G * tau, O * tau));
        out[j] = A * ((n_minus + 1.0) * em + n_plus * ep);
    }
    return out;
}

std::vector<cd> lorentzian_bcf(const LorentzianComponent& l, double temperature, double dt,
                               std::size_t n) {
    auto out = lorentzian_pole_bcf(l, temperature, dt, n);
    const double O = l.Omega, G = l.Gamma;
    const double A = l.S * (O * O + G * G);
    const double c = 8.0 * A * O * G;
    if (temperature <= 0.0) {
        // Matsubara sum becomes -(1/2pi) int_0^inf c nu e^{-nu tau} / D(nu) dnu
        for (std::size_t j = 0; j < n; ++j) {
            const double tau = units::angular(static_cast<double>(j) * dt);
            auto f = [&](double nu) {
                return c * nu * std::exp(-nu * tau) / matsubara_denominator(O, G, nu);
            };
            const double brk[] = {0.5 * O, O, 2.0 * O, 10.0 * O};
            double v = quad::integrate_with_breaks(f, 0.0, 20.0 * O, brk, 1e-12).value;
            v += quad::integrate(f, 20.0 * O, std::numeric_limits<double>::infinity(), 1e-12).value;
            out[j] -= v / (2.0 * units::kPi);
        }
        return out;
    }
    const double kt = units::thermal_energy(temperature);
    const double nu1 = 2.0 * units::kPi * kt;
    constexpr std::size_t kmax = 4000;
    for (std::size_t j = 0; j < n; ++j) {
        const double tau = units::angular(static_cast<double>(j) * dt);
        const double q = std::exp(-nu1 * tau);
        double e = 1.0, sum = 0.0;
        std::size_t k = 1;
        for (; k <= kmax; ++k) {
            e *= q;
            if (e < 1e-18) break;
            const double nu = nu1 * static_cast<double>(k);
            sum += nu * e / matsubara_denominator(O, G, nu);
        }
        if (k > kmax) {
            // remaining terms ~ 1/nu^3 e^{-nu tau}; midpoint integral of the asymptote
            const double kk = static_cast<double>(kmax) + 0.5;
            const double x = nu1 * tau * kk;
            const double e3 = x == 0.0 ? 0.5 : boost::math::expint(3, x);
            sum += e3 / (nu1 * nu1 * nu1 * kk * kk);
        }
        out[j] -= c * kt * sum;
    }
    return out;
}

} // namespace bathsmith
