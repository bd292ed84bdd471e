// bcf.cpp - BCF by composite quadrature, Gaussian filter, one-sided FT, peak census

#include "bathsmith/bcf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bathsmith/error.hpp"
#include "bathsmith/lorentzian_bcf.hpp"
#include "bathsmith/quadrature.hpp"
#include "bathsmith/units.hpp"

namespace bathsmith {

namespace {

constexpr int kNodesPerPanel = 24;
constexpr double kMaxPhasePerPanel = 12.0; // rad across one panel at the last time
constexpr std::size_t kReanchor = 256;

// Upper limit of the numerical frequency integral. Beyond it only the
// Lorentzian tails survive (added exactly) and coth is 1 to double precision.
double numeric_cutoff(const SpectralDensityModel& m, double temperature) {
    double w = 3000.0;
    for (const auto& l : m.lorentzians) w = std::max(w, l.Omega + 40.0 * l.Gamma);
    if (temperature > 0.0) w = std::max(w, 40.0 * units::thermal_energy(temperature));
    if (m.ar) w = std::max(w, 2500.0 * std::max(m.ar->w1, m.ar->w2));
    return w;
}

void add_deltas(const SpectralDensityModel& m, double temperature, CorrelationFunction& c) {
    for (const auto& d : m.deltas) {
        const double amp = d.omega * d.omega * d.s;
        double coth = 1.0;
        if (temperature > 0.0) coth = 1.0 / std::tanh(d.omega / (2.0 * units::thermal_energy(temperature)));
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double ph = units::angular(d.omega * c.t(j));
            c.values[j] += amp * cplx(coth * std::cos(ph), -std::sin(ph));
        }
    }
}

} // namespace

std::size_t BathParameters::n_points() const {
    return static_cast<std::size_t>(std::llround(grid_end() / dt)) + 1;
}

void validate(const BathParameters& p) {
    if (!(p.temperature >= 0.0)) throw ConfigError("temperature must be >= 0 K");
    if (!(p.tau > 0.0)) throw ConfigError("tau must be > 0 fs");
    if (!(p.dt > 0.0)) throw ConfigError("dt must be > 0 fs");
    if (p.tau / p.dt < 64.0) throw ConfigError("tau/dt must be at least 64");
    if (!(p.filter_sigma >= 0.0)) throw ConfigError("filter sigma must be > 0 fs");
    if (!(p.length >= 0.0)) throw ConfigError("grid length must be > 0 fs");
}

std::vector<double> CorrelationFunction::t_grid() const {
    std::vector<double> t(values.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = this->t(j);
    return t;
}

CorrelationFunction bcf_quadrature(const SpectralDensityModel& model, const BathParameters& p) {
    validate(p);
    validate(model);
    const std::size_t n = p.n_points();
    const double T = p.temperature;
    CorrelationFunction c;
    c.dt = p.dt;
    c.temperature = T;
    c.label = model.label;
    c.values.assign(n, cplx(0.0));

    const bool continuous = model.ar || !model.lorentzians.empty();
    const double W = numeric_cutoff(model, T);
    if (continuous) {
        const double t_end = p.dt * static_cast<double>(n - 1);
        const double h_max = std::min(50.0, kMaxPhasePerPanel / std::max(units::angular(t_end), 1e-12));
        const auto edges = quad::graded_edges(0.0, W, h_max, [&](double w) {
            return local_feature_width(model, w);
        });
        const auto rule = quad::composite(edges, kNodesPerPanel);
        const std::size_t m = rule.size();
        std::vector<double> a(m), b(m), zr(m), zi(m), rr(m), ri(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double w = rule.nodes[k];
            a[k] = rule.weights[k] * thermal_weight_density(model, T, w);
            b[k] = rule.weights[k] * evaluate_J(model, w);
            const double ph = units::angular(w * p.dt);
            rr[k] = std::cos(ph);
            ri[k] = -std::sin(ph);
        }
        // z_k(t_j) = exp(-i w_k t_j), advanced by one complex rotation per step
        for (std::size_t j = 0; j < n; ++j) {
            if (j % kReanchor == 0) {
                for (std::size_t k = 0; k < m; ++k) {
                    const double ph = units::angular(rule.nodes[k] * c.t(j));
                    zr[k] = std::cos(ph);
                    zi[k] = -std::sin(ph);
                }
            }
            double re = 0.0, im = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                re += a[k] * zr[k];
                im += b[k] * zi[k];
                const double nr = zr[k] * rr[k] - zi[k] * ri[k];
                const double ni = zr[k] * ri[k] + zi[k] * rr[k];
                zr[k] = nr;
                zi[k] = ni;
            }
            c.values[j] = cplx(re, im);
        }
        for (const auto& l : model.lorentzians) {
            const auto tail = lorentzian_tail(l, W, p.dt, n);
            for (std::size_t j = 0; j < n; ++j) c.values[j] += tail[j];
        }
    }
    add_deltas(model, T, c);
    for (const auto& v : c.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericError("bcf_quadrature: non-finite correlation value");
    return c;
}

cplx bcf_at(const SpectralDensityModel& model, double temperature, double t_fs, double rel_tol) {
    validate(model);
    const double W = numeric_cutoff(model, temperature);
    const double tau = units::angular(t_fs);
    std::vector<double> br = feature_points(model);
    // keep each adaptive piece within a few oscillation periods
    if (tau > 0.0) {
        const double period = 2.0 * units::kPi / tau;
        for (double x = 4.0 * period; x < W; x += 4.0 * period) br.push_back(x);
    }
    auto re = [&](double w) { return thermal_weight_density(model, temperature, w) * std::cos(w * tau); };
    auto im = [&](double w) { return -evaluate_J(model, w) * std::sin(w * tau); };
    cplx v(quad::integrate_with_breaks(re, 0.0, W, br, rel_tol).value,
           quad::integrate_with_breaks(im, 0.0, W, br, rel_tol).value);
    for (const auto& l : model.lorentzians) {
        // single-sample tail at t: reuse the grid routine with dt = t
        const auto tail = lorentzian_tail(l, W, t_fs > 0.0 ? t_fs : 1.0, t_fs > 0.0 ? 2 : 1);
        v += tail.back();
    }
    CorrelationFunction one;
    one.dt = t_fs > 0.0 ? t_fs : 1.0;
    one.values.assign(t_fs > 0.0 ? 2 : 1, cplx(0.0));
    add_deltas(model, temperature, one);
    return v + one.values.back();
}

double bcf_zero(const SpectralDensityModel& model, double temperature) {
    validate(model);
    double v = 0.0;
    auto br = feature_points(model);
    if (model.ar) {
        const ARComponent ar = *model.ar;
        SpectralDensityModel only;
        only.ar = ar;
        auto f = [&](double w) { return thermal_weight_density(only, temperature, w); };
        v += quad::integrate_with_breaks(f, 0.0, 8000.0, br, 1e-12).value;
    }
    for (const auto& l : model.lorentzians) {
        SpectralDensityModel only;
        only.lorentzians = {l};
        auto f = [&](double w) { return thermal_weight_density(only, temperature, w); };
        const double hi = l.Omega + 40.0 * l.Gamma;
        v += quad::integrate_with_breaks(f, 0.0, hi, feature_points(only), 1e-12).value;
        v += quad::integrate(f, hi, std::numeric_limits<double>::infinity(), 1e-12).value;
    }
    for (const auto& d : model.deltas) {
        const double coth =
            temperature > 0.0 ? 1.0 / std::tanh(d.omega / (2.0 * units::thermal_energy(temperature))) : 1.0;
        v += d.omega * d.omega * d.s * coth;
    }
    return v;
}

CorrelationFunction gaussian_filter(const CorrelationFunction& c, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("filter sigma must be > 0 fs");
    CorrelationFunction out = c;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double t = out.t(j);
        out.values[j] *= std::exp(-t * t / (2.0 * sigma * sigma));
    }
    return out;
}

std::vector<double> one_sided_transform(const CorrelationFunction& c,
                                        const std::vector<double>& omega) {
    const std::size_t n = c.size();
    const std::size_t m = omega.size();
    std::vector<double> acc(m, 0.0), zr(m), zi(m), rr(m), ri(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double ph = units::angular(omega[k] * c.dt);
        rr[k] = std::cos(ph);
        ri[k] = std::sin(ph);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (j % kReanchor == 0) {
            for (std::size_t k = 0; k < m; ++k) {
                const double ph = units::angular(omega[k] * c.t(j));
                zr[k] = std::cos(ph);
                zi[k] = std::sin(ph);
            }
        }
        const double w = (j == 0 || j + 1 == n) ? 0.5 * c.dt : c.dt;
        const double cr = w * c.values[j].real();
        const double ci = w * c.values[j].imag();
        for (std::size_t k = 0; k < m; ++k) {
            acc[k] += zr[k] * cr - zi[k] * ci;
            const double nr = zr[k] * rr[k] - zi[k] * ri[k];
            const double ni = zr[k] * ri[k] + zi[k] * rr[k];
            zr[k] = nr;
            zi[k] = ni;
        }
    }
    for (auto& v : acc) v /= units::kPi;
    return acc;
}

FilteredSpectrum ft_spectrum(const CorrelationFunction& c, const SpectrumGrid& grid) {
    if (c.size() < 2) throw ConfigError("ft_spectrum: need at least two time samples");
    if (!(grid.spacing > 0.0) || grid.spacing > 1.0)
        throw ConfigError("ft_spectrum: spectrum spacing must be in (0, 1] cm^-1");
    const double nyquist = units::kPi / units::angular(c.dt);
    if (!(grid.omega_max > 0.0) || grid.omega_max > nyquist) {
        std::ostringstream os;
        os << "ft_spectrum: omega_max " << grid.omega_max << " cm^-1 exceeds the Nyquist limit "
           << nyquist << " cm^-1 of dt = " << c.dt << " fs";
        throw ConfigError(os.str());
    }
    FilteredSpectrum s;
    const double lo = -grid.omega_max / 4.0;
    const auto m = static_cast<std::size_t>(std::llround((grid.omega_max - lo) / grid.spacing)) + 1;
    s.omega.resize(m);
    for (std::size_t k = 0; k < m; ++k) s.omega[k] = lo + grid.spacing * static_cast<double>(k);
    s.values = one_sided_transform(c, s.omega);
    const double c0 = std::abs(c.values.front());
    s.tail_ratio = c0 > 0.0 ? std::abs(c.values.back()) / c0 : 0.0;
    s.label = c.label;
    return s;
}

PeakCensus count_peaks(const FilteredSpectrum& s, double prominence, double omega_min) {
    if (!(prominence > 0.0 && prominence < 1.0))
        throw ConfigError("prominence must lie in (0, 1)");
    std::vector<double> w, v;
    for (std::size_t k = 0; k < s.omega.size(); ++k)
        if (s.omega[k] > 0.0) {
            w.push_back(s.omega[k]);
            v.push_back(s.values[k]);
        }
    PeakCensus census;
    if (v.size() < 3) return census;
    const double vmax = *std::max_element(v.begin(), v.end());
    if (!(vmax > 0.0)) return census;
    const double threshold = prominence * vmax;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
        double left = v[i];
        for (std::size_t k = i; k-- > 0;) {
            if (v[k] > v[i]) break;
            left = std::min(left, v[k]);
        }
        double right = v[i];
        for (std::size_t k = i + 1; k < v.size(); ++k) {
            if (v[k] > v[i]) break;
            right = std::min(right, v[k]);
        }
        const double prom = v[i] - std::max(left, right);
        if (prom >= threshold && w[i] >= omega_min) census.peaks.push_back({w[i], v[i], prom});
    }
    return census;
}

double bcf_distance(const CorrelationFunction& a, const CorrelationFunction& b, double sigma,
                    double t_max) {
    if (a.size() != b.size() || std::abs(a.dt - b.dt) > 1e-12 * a.dt)
        throw ConfigError("bcf_distance: correlation functions are on different grids");
    if (!(sigma > 0.0)) throw ConfigError("bcf_distance: sigma must be > 0");
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = a.t(j);
        if (t_max >= 0.0 && t > t_max * (1.0 + 1e-12)) break;
        const double w = std::exp(-t * t / (sigma * sigma));
        num += w * std::norm(a.values[j] - b.values[j]);
        den += w * std::norm(a.values[j]);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

CorrelationFunction add(const CorrelationFunction& a, const CorrelationFunction& b) {
    if (a.size() != b.size() || std::abs(a.dt - b.dt) > 1e-12 * a.dt)
        throw ConfigError("cannot add correlation functions on different grids");
    CorrelationFunction out = a;
    for (std::size_t j = 0; j < a.size(); ++j) out.values[j] += b.values[j];
    return out;
}

} // namespace bathsmith
