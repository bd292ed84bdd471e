// pseudomode.cpp - Liouville-space propagation of sites coupled to damped modes

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "bathsmith/dynamics.hpp"
#include "bathsmith/error.hpp"
#include "bathsmith/units.hpp"

namespace bathsmith {

namespace {

// Occupation below which a mode is treated as cold.
constexpr double kColdOccupation = 1e-6;

struct Mode {
    std::size_t site;
    double omega;  // rad/fs
    cplx g;        // rad/fs, complex for unphysical (exact-correlation) modes
    double gamma;  // Lindblad rate, rad/fs
    double nbar;   // thermal occupation (Direct only)
    double weight; // displacement scale |g|^2 / |z|^2 used by the importance floor
};

// Occupation configurations under per-mode caps, an optional total cap and
// an optional floor on prod_k w_k^{n_k} / n_k!. Stops once `limit` is passed.
std::vector<std::vector<int>> enumerate(const std::vector<int>& caps, int total_cap,
                                        const std::vector<double>& weight, double min_weight,
                                        std::size_t limit) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(caps.size(), 0);
    const int max_total = total_cap > 0 ? total_cap : std::numeric_limits<int>::max();
    auto rec = [&](auto&& self, std::size_t k, int used, double w) -> void {
        if (out.size() > limit) return;
        if (k == caps.size()) {
            out.push_back(cur);
            return;
        }
        double wn = w;
        for (int n = 0; n < caps[k] && used + n <= max_total; ++n) {
            if (min_weight > 0.0 && wn < min_weight) break;
            cur[k] = n;
            self(self, k + 1, used + n, wn);
            wn *= weight[k] / (n + 1);
        }
        cur[k] = 0;
    };
    rec(rec, 0, 0, 1.0);
    return out;
}

// Size of the capped basis without the importance floor.
double count_configs(const std::vector<int>& caps, int total_cap) {
    if (total_cap <= 0) {
        double c = 1.0;
        for (int v : caps) c *= v;
        return c;
    }
    std::vector<double> dp(total_cap + 1, 0.0);
    dp[0] = 1.0;
    for (int cap : caps) {
        std::vector<double> nx(total_cap + 1, 0.0);
        for (int s = 0; s <= total_cap; ++s)
            for (int n = 0; n < cap && s + n <= total_cap; ++n) nx[s + n] += dp[s];
        dp = nx;
    }
    double c = 0.0;
    for (double v : dp) c += v;
    return c;
}

cplx bose(cplx x) {
    if (x.real() > 700.0) return 0.0;
    return 1.0 / (std::exp(x) - 1.0);
}

double occupation(double omega_cm, double T) {
    if (T <= 0.0) return 0.0;
    const double x = omega_cm / units::thermal_energy(T);
    return x > 700.0 ? 0.0 : 1.0 / std::expm1(x);
}

struct Csr {
    std::vector<std::size_t> row_start;
    std::vector<std::uint32_t> cols;
    std::vector<cplx> vals;
};

} // namespace

struct PseudomodeEngine::Impl {
    std::size_t n_sites = 0;
    std::size_t n_ket = 0, n_bra = 0;
    std::vector<std::vector<int>> bra_configs;
    std::vector<double> bra_weight; // thermal population of each diagonal bra config
    Csr L;                    // off-diagonal part of the generator
    std::vector<cplx> diag0;  // its diagonal, integrated exactly
    std::vector<double> frame_site_energy;
    double frame = 0.0;
    double dt = 0.5;
    double horizon = 300.0;
    bool check = false;
    double tol = 1e-5;
    std::vector<Eigen::Vector3d> dipoles;
    EngineStats stats;

    std::size_t index(std::size_t site, std::size_t ket, std::size_t bra) const {
        return (site * n_ket + ket) * n_bra + bra;
    }

    void offdiag(const std::vector<cplx>& x, std::vector<cplx>& y) const {
        for (std::size_t r = 0; r + 1 < L.row_start.size(); ++r) {
            cplx acc = 0.0;
            for (std::size_t p = L.row_start[r]; p < L.row_start[r + 1]; ++p) acc += L.vals[p] * x[L.cols[p]];
            y[r] = acc;
        }
    }

    // Reduced trace over modes of site j's component.
    cplx trace(const std::vector<cplx>& x, std::size_t site) const {
        cplx t = 0.0;
        for (std::size_t b = 0; b < n_bra; ++b)
            if (bra_weight[b] >= 0.0) t += x[index(site, diag_ket[b], b)];
        return t;
    }
    std::vector<std::size_t> diag_ket; // ket index with the same occupations as bra b

    std::vector<cplx> run(const std::vector<double>& energies, double step) const;
};

PseudomodeEngine::PseudomodeEngine(const ElectronicSystem& system, const PseudomodeConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
    validate(system);
    auto& I = *impl_;
    const std::size_t N = system.n_sites();
    if (cfg.site_modes.size() != 1 && cfg.site_modes.size() != N)
        throw ConfigError("site_modes needs one list per site or a single shared list");
    if (cfg.fock_dim < 2) throw ConfigError("fock_dim must be >= 2");
    if (!(cfg.dt > 0.0)) throw ConfigError("time step must be > 0");
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be > 0");
    if (cfg.bath_temperature < 0.0) throw ConfigError("bath temperature must be >= 0");
    const bool direct = cfg.thermal == ThermalTreatment::Direct;

    std::vector<Mode> modes;
    std::vector<cplx> site_rate(N, 0.0); // extra diagonal per site, rad/fs
    const double T = cfg.bath_temperature;
    const bool exact = !direct && cfg.exact_lorentzian && T > 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto& list = cfg.site_modes.size() == 1 ? cfg.site_modes[0] : cfg.site_modes[i];
        std::vector<double> mats(std::max(0, cfg.matsubara_modes), 0.0);
        double remainder = 0.0;
        for (const auto& m : list) {
            if (!(m.Omega > 0.0) || !(m.S >= 0.0) || !(m.Gamma >= 0.0))
                throw ConfigError("pseudomode needs Omega > 0, S >= 0, Gamma >= 0");
            if (m.S == 0.0) continue;
            const double g2 = pseudomode_coupling_sq(m);
            const double nb = occupation(m.Omega, T);
            const double gam = units::angular(2.0 * m.Gamma);
            const double w = units::angular(m.Omega);
            if (direct) {
                modes.push_back({i, w, units::angular(std::sqrt(g2)), gam, nb, m.S * (2.0 * nb + 1.0)});
            } else if (exact && m.Gamma > 0.0) {
                // poles of the antisymmetrized Lorentzian with complex occupations
                const double kt = units::thermal_energy(T);
                const cplx c1 = g2 * (bose(cplx(m.Omega, -m.Gamma) / kt) + 1.0);
                const cplx c2 = g2 * bose(cplx(m.Omega, m.Gamma) / kt);
                modes.push_back({i, w, units::angular(1.0) * std::sqrt(c1), gam, 0.0, std::abs(c1) / (g2 / m.S)});
                if (std::abs(c2) >= kColdOccupation * g2)
                    modes.push_back({i, -w, units::angular(1.0) * std::sqrt(c2), gam, 0.0, std::abs(c2) / (g2 / m.S)});
                // Matsubara terms -c kT nu_k e^{-nu_k t} / D(nu_k)
                const double c = 8.0 * g2 * m.Omega * m.Gamma;
                const double nu1 = 2.0 * units::kPi * kt;
                for (int k = 1; k <= 4000; ++k) {
                    const double nu = nu1 * k;
                    const double a = m.Omega * m.Omega + m.Gamma * m.Gamma - nu * nu;
                    const double D = a * a + 4.0 * nu * nu * m.Omega * m.Omega;
                    const double ck = -c * kt * nu / D;
                    if (k <= static_cast<int>(mats.size())) mats[k - 1] += ck;
                    else remainder += ck / nu;
                }
            } else {
                modes.push_back({i, w, units::angular(std::sqrt(g2 * (nb + 1.0))), gam, 0.0, m.S * (nb + 1.0)});
                if (nb >= kColdOccupation)
                    modes.push_back({i, -w, units::angular(std::sqrt(g2 * nb)), gam, 0.0, m.S * nb});
            }
        }
        if (exact) {
            const double nu1 = 2.0 * units::kPi * units::thermal_energy(T);
            for (std::size_t k = 0; k < mats.size(); ++k)
                if (mats[k] != 0.0)
                    modes.push_back({i, 0.0, units::angular(1.0) * std::sqrt(cplx(mats[k])),
                                     units::angular(2.0 * nu1 * static_cast<double>(k + 1)), 0.0,
                                     std::abs(mats[k]) / std::pow(nu1 * static_cast<double>(k + 1), 2)});
            // fast terms act as white noise: g(t) gains remainder * t
            site_rate[i] = -units::angular(remainder);
        }
    }
    const std::size_t M = modes.size();
    std::vector<int> ket_caps(M, cfg.fock_dim), bra_caps(M, 1);
    if (direct)
        for (std::size_t k = 0; k < M; ++k)
            bra_caps[k] = modes[k].nbar >= kColdOccupation ? std::max(1, cfg.bra_levels) : 1;

    std::vector<double> ket_w(M), bra_w(M);
    for (std::size_t k = 0; k < M; ++k) {
        ket_w[k] = modes[k].weight;
        bra_w[k] = modes[k].nbar / (modes[k].nbar + 1.0);
    }
    // nnz per row: N-1 hoppings, up to 2 couplings and 1-2 jumps per mode
    const double per_row = static_cast<double>(N) + 2.0 * static_cast<double>(M) + (direct ? 2.0 * M : 0.0);
    const double per_state = per_row + 12.0; // generator plus integrator work vectors
    const auto limit = static_cast<std::size_t>(static_cast<double>(cfg.budget) / per_state / N);
    const auto kets = enumerate(ket_caps, cfg.max_excitations, ket_w, cfg.min_weight, limit);
    I.bra_configs = enumerate(bra_caps, direct ? cfg.max_bra_excitations : 0, bra_w,
                              direct ? cfg.min_weight : 0.0, limit);
    const double dim = static_cast<double>(N) * static_cast<double>(kets.size()) *
                       static_cast<double>(I.bra_configs.size());
    const double entries = dim * per_state;
    if (kets.size() > limit || I.bra_configs.size() > limit || !(entries <= static_cast<double>(cfg.budget))) {
        std::ostringstream os;
        os << "pseudomode basis too large: ";
        if (kets.size() > limit || I.bra_configs.size() > limit) {
            const double full = static_cast<double>(N) * count_configs(ket_caps, cfg.max_excitations) *
                                count_configs(bra_caps, direct ? cfg.max_bra_excitations : 0);
            os << "at least " << dim << " (up to " << full << ") states";
        } else {
            os << dim << " states";
        }
        const double need = std::max(entries, static_cast<double>(cfg.budget) + 1.0);
        os << ", requiring more than " << need << " complex entries (" << need * 16.0 / 1048576.0
           << " MiB) against a budget of " << cfg.budget
           << " entries; lower fock_dim, set max_excitations or raise min_weight";
        throw ConfigError(os.str());
    }

    I.n_sites = N;
    I.n_ket = kets.size();
    I.n_bra = I.bra_configs.size();
    I.dt = cfg.dt;
    I.horizon = cfg.horizon;
    I.check = cfg.check_convergence;
    I.tol = cfg.convergence_tol;
    I.dipoles = system.dipoles;

    auto key = [](const std::vector<int>& c) {
        std::string s(c.size(), '\0');
        for (std::size_t k = 0; k < c.size(); ++k) s[k] = static_cast<char>(c[k]);
        return s;
    };
    std::unordered_map<std::string, std::size_t> ket_index, bra_index;
    for (std::size_t a = 0; a < kets.size(); ++a) ket_index.emplace(key(kets[a]), a);
    for (std::size_t b = 0; b < I.n_bra; ++b) bra_index.emplace(key(I.bra_configs[b]), b);
    auto find = [&](const std::unordered_map<std::string, std::size_t>& map, const std::vector<int>& c) -> long {
        auto it = map.find(key(c));
        return it == map.end() ? -1 : static_cast<long>(it->second);
    };

    // Thermal populations of the bra configurations; the initial state is
    // diagonal, so each bra config pairs with the ket of equal occupations.
    I.bra_weight.assign(I.n_bra, 0.0);
    I.diag_ket.assign(I.n_bra, 0);
    double kept = 0.0;
    for (std::size_t b = 0; b < I.n_bra; ++b) {
        const auto& c = I.bra_configs[b];
        const long a = find(ket_index, c);
        if (a < 0) {
            I.bra_weight[b] = -1.0;
            continue;
        }
        I.diag_ket[b] = static_cast<std::size_t>(a);
        double p = 1.0;
        for (std::size_t k = 0; k < M; ++k) {
            const double nb = modes[k].nbar;
            p *= std::pow(nb / (nb + 1.0), c[k]) / (nb + 1.0);
        }
        I.bra_weight[b] = p;
        kept += p;
    }
    I.stats.discarded_population = 1.0 - kept;
    for (auto& w : I.bra_weight)
        if (w > 0.0) w /= kept;
    I.stats.n_modes = M;

    I.frame = 0.0;
    for (double e : system.site_energies) I.frame += e;
    I.frame /= static_cast<double>(N);

    // Assemble L0 row by row: d rho[r] / dt = sum_c L[r, c] rho[c].
    const std::size_t D = N * I.n_ket * I.n_bra;
    I.stats.dimension = D;
    I.L.row_start.assign(1, 0);
    std::vector<std::pair<std::uint32_t, cplx>> row;
    std::vector<int> n, m;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t a = 0; a < I.n_ket; ++a)
            for (std::size_t b = 0; b < I.n_bra; ++b) {
                row.clear();
                n = kets[a];
                m = I.bra_configs[b];
                cplx d = site_rate[i];
                for (std::size_t k = 0; k < M; ++k) {
                    const auto& md = modes[k];
                    d += cplx(-0.5 * md.gamma * ((md.nbar + 1.0) * (n[k] + m[k]) + md.nbar * (n[k] + m[k] + 2)),
                              -md.omega * (n[k] - m[k]));
                }
                I.diag0.push_back(d);
                for (std::size_t j = 0; j < N; ++j) {
                    if (j == i || system.couplings(i, j) == 0.0) continue;
                    row.emplace_back(static_cast<std::uint32_t>(I.index(j, a, b)),
                                     cplx(0.0, -units::angular(system.couplings(i, j))));
                }
                for (std::size_t k = 0; k < M; ++k) {
                    const auto& md = modes[k];
                    if (md.site != i) continue;
                    // ket side: -i g (a + a^dag) acting on site-i excitations
                    n[k] += 1;
                    if (long c = find(ket_index, n); c >= 0)
                        row.emplace_back(static_cast<std::uint32_t>(I.index(i, c, b)),
                                         cplx(0.0, -1.0) * md.g * std::sqrt(static_cast<double>(n[k])));
                    n[k] -= 2;
                    if (n[k] >= 0)
                        if (long c = find(ket_index, n); c >= 0)
                            row.emplace_back(static_cast<std::uint32_t>(I.index(i, c, b)),
                                             cplx(0.0, -1.0) * md.g * std::sqrt(static_cast<double>(n[k] + 1)));
                    n[k] += 1;
                }
                for (std::size_t k = 0; k < M; ++k) {
                    const auto& md = modes[k];
                    if (md.gamma == 0.0) continue;
                    // a rho a^dag feeding (n, m) from (n+1, m+1)
                    n[k] += 1;
                    m[k] += 1;
                    {
                        long c = find(ket_index, n), e = find(bra_index, m);
                        if (c >= 0 && e >= 0)
                            row.emplace_back(static_cast<std::uint32_t>(I.index(i, c, e)),
                                             md.gamma * (md.nbar + 1.0) * std::sqrt(double(n[k]) * m[k]));
                    }
                    n[k] -= 2;
                    m[k] -= 2;
                    if (md.nbar > 0.0 && n[k] >= 0 && m[k] >= 0) {
                        long c = find(ket_index, n), e = find(bra_index, m);
                        if (c >= 0 && e >= 0)
                            row.emplace_back(static_cast<std::uint32_t>(I.index(i, c, e)),
                                             md.gamma * md.nbar * std::sqrt(double(n[k] + 1) * (m[k] + 1)));
                    }
                    n[k] += 1;
                    m[k] += 1;
                }
                for (const auto& [c, v] : row) {
                    I.L.cols.push_back(c);
                    I.L.vals.push_back(v);
                }
                I.L.row_start.push_back(I.L.cols.size());
            }
    I.stats.nnz = I.L.vals.size() + I.diag0.size();
}

PseudomodeEngine::~PseudomodeEngine() = default;
PseudomodeEngine::PseudomodeEngine(PseudomodeEngine&&) noexcept = default;

const EngineStats& PseudomodeEngine::stats() const { return impl_->stats; }
double PseudomodeEngine::frame() const { return impl_->frame; }

std::vector<cplx> PseudomodeEngine::Impl::run(const std::vector<double>& energies, double step) const {
    if (energies.size() != n_sites) throw ConfigError("site energy count does not match the system");
    if (!(step > 0.0)) throw ConfigError("time step must be > 0");
    const auto n_out = static_cast<std::size_t>(std::floor(horizon / step + 1e-9)) + 1;
    const std::size_t D = n_sites * n_ket * n_bra;
    // Lawson RK4: the diagonal (mode energies, damping, site energies) is
    // carried by exact exponentials, the couplings by RK4.
    const double h = step;
    const std::size_t per_site = n_ket * n_bra;
    std::vector<cplx> E1(D), E2(D);
    for (std::size_t r = 0; r < D; ++r) {
        const cplx lam = diag0[r] + cplx(0.0, -units::angular(energies[r / per_site] - frame));
        E1[r] = std::exp(0.5 * h * lam);
        E2[r] = E1[r] * E1[r];
    }

    // Site-basis starts for small systems, Cartesian polarizations otherwise.
    const bool site_basis = n_sites <= 3;
    const std::size_t n_ic = site_basis ? n_sites : 3;
    std::vector<cplx> out(n_out, cplx(0.0));
    std::vector<cplx> x(D), k1(D), k2(D), k3(D), k4(D), tmp(D);
    for (std::size_t ic = 0; ic < n_ic; ++ic) {
        std::fill(x.begin(), x.end(), cplx(0.0));
        for (std::size_t i = 0; i < n_sites; ++i) {
            const double a = site_basis ? (i == ic ? 1.0 : 0.0) : dipoles[i][ic];
            if (a == 0.0) continue;
            for (std::size_t b = 0; b < n_bra; ++b)
                if (bra_weight[b] > 0.0) x[index(i, diag_ket[b], b)] = a * bra_weight[b];
        }
        auto readout = [&](const std::vector<cplx>& v) {
            cplx d = 0.0;
            for (std::size_t j = 0; j < n_sites; ++j) {
                const double w = site_basis ? dipoles[j].dot(dipoles[ic]) : dipoles[j][ic];
                if (w != 0.0) d += w * trace(v, j);
            }
            return d;
        };
        out[0] += readout(x);
        for (std::size_t s = 1; s < n_out; ++s) {
            offdiag(x, k1);
            for (std::size_t r = 0; r < D; ++r) tmp[r] = E1[r] * (x[r] + 0.5 * h * k1[r]);
            offdiag(tmp, k2);
            for (std::size_t r = 0; r < D; ++r) tmp[r] = E1[r] * x[r] + 0.5 * h * k2[r];
            offdiag(tmp, k3);
            for (std::size_t r = 0; r < D; ++r) tmp[r] = E2[r] * x[r] + h * E1[r] * k3[r];
            offdiag(tmp, k4);
            for (std::size_t r = 0; r < D; ++r)
                x[r] = E2[r] * (x[r] + h / 6.0 * k1[r]) + h / 3.0 * E1[r] * (k2[r] + k3[r]) + h / 6.0 * k4[r];
            const cplx d = readout(x);
            if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
                throw NumericError("pseudomode propagation diverged; reduce the time step");
            out[s] += d;
        }
    }
    return out;
}

DipoleCorrelation PseudomodeEngine::propagate(const std::vector<double>& site_energies) const {
    return propagate(site_energies, impl_->dt);
}

DipoleCorrelation PseudomodeEngine::propagate(const std::vector<double>& site_energies, double dt) const {
    DipoleCorrelation d;
    d.dt = dt;
    d.frame_cm1 = impl_->frame;
    d.values = impl_->run(site_energies, dt);
    if (impl_->check) {
        // step halving: compare on the shared points
        const auto fine = impl_->run(site_energies, 0.5 * dt);
        double scale = 0.0, diff = 0.0;
        for (std::size_t j = 0; j < d.values.size(); ++j) {
            scale = std::max(scale, std::abs(fine[2 * j]));
            diff = std::max(diff, std::abs(fine[2 * j] - d.values[j]));
        }
        if (diff > impl_->tol * scale) {
            std::ostringstream os;
            os << "time step not converged: halving dt changes d(t) by " << diff / scale << " relative (tolerance "
               << impl_->tol << "); reduce dt";
            throw NumericError(os.str());
        }
    }
    return d;
}

DipoleCorrelation pseudomode_propagate(const ElectronicSystem& system, const PseudomodeConfig& config) {
    PseudomodeEngine engine(system, config);
    auto d = engine.propagate(system.site_energies);
    d.label = config.label;
    return d;
}

} // namespace bathsmith
