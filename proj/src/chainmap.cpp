// chainmap.cpp - Lanczos tridiagonalization of discretized measures

#include "bathsmith/chainmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bathsmith/error.hpp"
#include "bathsmith/quadrature.hpp"
#include "bathsmith/series_io.hpp"
#include "bathsmith/units.hpp"

namespace bathsmith {

ChainCoefficients ChainCoefficients::truncated(std::size_t n) const {
    if (n < 1 || n > length()) throw ConfigError("chain truncation length out of range");
    ChainCoefficients c;
    c.alphas.assign(alphas.begin(), alphas.begin() + static_cast<std::ptrdiff_t>(n));
    c.betas.assign(betas.begin(), betas.begin() + static_cast<std::ptrdiff_t>(n));
    return c;
}

DiscreteMeasure discretize_measure(const std::function<double(double)>& density, double lo, double hi,
                                   const std::function<double(double)>& local_width, int panels,
                                   int nodes_per_panel) {
    if (!(hi > lo)) throw ConfigError("measure support must satisfy lo < hi");
    if (panels < 1 || nodes_per_panel < 1) throw ConfigError("need at least one panel and node");
    const double base = (hi - lo) / panels;
    std::vector<double> edges;
    if (local_width) {
        edges = quad::graded_edges(lo, hi, base, local_width);
    } else {
        for (int p = 0; p <= panels; ++p) edges.push_back(lo + base * p);
    }
    const auto rule = quad::composite(edges, nodes_per_panel);
    DiscreteMeasure m;
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double w = rule.weights[k] * density(rule.nodes[k]);
        if (w < 0.0 || !std::isfinite(w)) throw NumericError("measure density must be finite and >= 0");
        if (w == 0.0) continue;
        m.nodes.push_back(rule.nodes[k]);
        m.weights.push_back(w);
    }
    return m;
}

ChainCoefficients lanczos_recurrence(const DiscreteMeasure& measure, std::size_t n) {
    const std::size_t N = measure.nodes.size();
    if (n < 1) throw ConfigError("need at least one recurrence coefficient");
    if (n > N) {
        std::ostringstream os;
        os << "measure has " << N << " support points, cannot produce " << n << " coefficients";
        throw NumericError(os.str());
    }
    const Eigen::Map<const Eigen::VectorXd> x(measure.nodes.data(), static_cast<Eigen::Index>(N));
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(measure.weights.data(), static_cast<Eigen::Index>(N));
    ChainCoefficients c;
    const double total = w.sum();
    Eigen::MatrixXd Q(N, n);
    Q.col(0) = w.cwiseSqrt() / std::sqrt(total);
    c.betas.push_back(total);
    for (std::size_t k = 0; k < n; ++k) {
        const auto q = Q.col(k);
        Eigen::VectorXd r = x.cwiseProduct(q);
        const double a = q.dot(r);
        c.alphas.push_back(a);
        if (k + 1 == n) break;
        r -= a * q;
        if (k > 0) r -= std::sqrt(c.betas[k]) * Q.col(k - 1);
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd proj = Q.leftCols(k + 1).transpose() * r;
            r -= Q.leftCols(k + 1) * proj;
        }
        const double b = r.squaredNorm();
        if (!(b > 0.0) || !std::isfinite(b)) {
            std::ostringstream os;
            os << "Lanczos lost orthogonality at index " << (k + 1) << " (beta = " << b << ")";
            throw NumericError(os.str());
        }
        c.betas.push_back(b);
        Q.col(k + 1) = r / std::sqrt(b);
    }
    return c;
}

ChainCoefficients recurrence_coefficients(const std::function<double(double)>& density, double lo,
                                          double hi, std::size_t n,
                                          const std::function<double(double)>& local_width) {
    return lanczos_recurrence(discretize_measure(density, lo, hi, local_width), n);
}

ThermalMeasure thermal_measure(const SpectralDensityModel& model, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("thermal measure needs T > 0");
    validate(model);
    if (!model.deltas.empty()) throw ValidationError("thermal measure: delta components are not supported");
    ThermalMeasure m;
    m.density = [model, temperature](double w) { return thermalized_density(model, temperature, w); };
    m.local_width = [model](double w) { return local_feature_width(model, w); };
    return m;
}

DiscreteMeasure discretize(const ThermalMeasure& m) {
    return discretize_measure(m.density, m.lo, m.hi, m.local_width);
}

double support_tail_weight(const SpectralDensityModel& model, double temperature, double lo, double hi) {
    auto f = [&](double w) { return thermalized_density(model, temperature, w); };
    const auto br = feature_points(model);
    const double inf = std::numeric_limits<double>::infinity();
    const double inside = quad::integrate_with_breaks(f, lo, hi, br, 1e-12).value;
    const double floor = 1e-16 * inside;
    const double above = quad::integrate(f, hi, inf, 1e-10, floor).value;
    const double below = quad::integrate(f, -inf, lo, 1e-10, floor).value;
    return (above + below) / (inside + above + below);
}

DiscreteEnvironment chain_to_star(const ChainCoefficients& chain) {
    const std::size_t n = chain.length();
    if (n == 0 || chain.betas.size() != n) throw ValidationError("chain must have matching alphas and betas");
    for (double b : chain.betas)
        if (!(b > 0.0)) throw ValidationError("chain betas must be > 0");
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(chain.alphas.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
    for (std::size_t k = 1; k < n; ++k) sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(chain.betas[k]);
    DiscreteEnvironment env;
    env.chain_length = n;
    env.kappa = chain.kappa();
    if (n == 1) {
        env.modes.push_back({chain.alphas[0], env.kappa});
        return env;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericError("tridiagonal eigensolver failed");
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
        env.modes.push_back({es.eigenvalues()[j], env.kappa * std::abs(es.eigenvectors()(0, j))});
    return env;
}

CorrelationFunction discrete_bcf(const DiscreteEnvironment& env, double dt, std::size_t n) {
    CorrelationFunction c;
    c.dt = dt;
    c.values.assign(n, cplx(0.0));
    c.label = "discrete environment";
    for (const auto& m : env.modes) {
        const double g2 = m.g * m.g;
        for (std::size_t j = 0; j < n; ++j) {
            const double ph = units::angular(m.omega * c.t(j));
            c.values[j] += g2 * cplx(std::cos(ph), -std::sin(ph));
        }
    }
    return c;
}

ChainSearch chain_length_for_horizon(const DiscreteMeasure& measure, const CorrelationFunction& reference,
                                     double tau, double tol, std::size_t cap) {
    if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("tolerance must lie in (0, 1)");
    if (!(tau > 0.0)) throw ConfigError("horizon must be > 0");
    const std::size_t n = std::min(reference.size(),
                                   static_cast<std::size_t>(std::floor(tau / reference.dt + 1e-9)) + 1);
    CorrelationFunction ref = reference;
    ref.values.resize(n);
    const double sigma = tau / 3.0;
    cap = std::min(cap, measure.nodes.size());
    ChainSearch out;
    ChainCoefficients coeffs;
    auto distance = [&](std::size_t len) {
        if (coeffs.length() < len) coeffs = lanczos_recurrence(measure, std::min(cap, std::max(len, 2 * coeffs.length())));
        const auto env = chain_to_star(coeffs.truncated(len));
        const double d = bcf_distance(ref, discrete_bcf(env, ref.dt, n), sigma);
        out.trace.emplace_back(len, d);
        return d;
    };
    std::size_t hi = 1;
    double dhi = distance(hi);
    while (!(dhi < tol)) {
        if (hi >= cap) {
            std::ostringstream os;
            os << "no chain up to " << cap << " sites reaches distance " << tol << " (last " << dhi << ")";
            throw NumericError(os.str());
        }
        hi = std::min(cap, 2 * hi);
        dhi = distance(hi);
    }
    std::size_t lo = hi / 2; // fails (or 0)
    double dbest = dhi;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        const double d = distance(mid);
        if (d < tol) {
            hi = mid;
            dbest = d;
        } else {
            lo = mid;
        }
    }
    out.length = hi;
    out.distance = dbest;
    return out;
}

std::string chain_csv(const ChainCoefficients& chain, const std::vector<std::pair<std::string, std::string>>& meta) {
    std::vector<double> idx(chain.length());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<double>(k);
    // index column written as an integer
    std::string body = table_csv({"n", "alpha_cm1", "beta_cm2"}, {idx, chain.alphas, chain.betas}, meta);
    std::istringstream in(body);
    std::ostringstream out;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#' && header) {
            const auto comma = line.find(',');
            out << static_cast<long>(std::llround(std::stod(line.substr(0, comma)))) << line.substr(comma) << '\n';
            continue;
        }
        if (!line.empty() && line[0] != '#') header = true;
        out << line << '\n';
    }
    return out.str();
}

std::string star_csv(const DiscreteEnvironment& env, const std::vector<std::pair<std::string, std::string>>& meta) {
    auto m = meta;
    m.emplace_back("chain_length", std::to_string(env.chain_length));
    m.emplace_back("horizon_fs", format_number(env.horizon));
    m.emplace_back("kappa_cm1", format_number(env.kappa));
    std::vector<double> w, g;
    for (const auto& md : env.modes) {
        w.push_back(md.omega);
        g.push_back(md.g);
    }
    return table_csv({"omega_cm1", "g_cm1"}, {w, g}, m);
}

DiscreteEnvironment parse_star_csv(const std::string& text) {
    DiscreteEnvironment env;
    for (const auto& [k, v] : parse_metadata(text)) {
        if (k == "chain_length") env.chain_length = std::stoul(v);
        if (k == "horizon_fs") env.horizon = std::stod(v);
        if (k == "kappa_cm1") env.kappa = std::stod(v);
    }
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line.rfind("omega_cm1,g_cm1", 0) != 0)
                throw ParseError("star CSV must have header omega_cm1,g_cm1", "header", lineno);
            header = true;
            continue;
        }
        double w = 0, g = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &w, &g) != 2) throw ParseError("malformed star row", "row", lineno);
        env.modes.push_back({w, g});
    }
    if (env.chain_length == 0) env.chain_length = env.modes.size();
    return env;
}

SpectralDensityModel star_to_delta_model(const DiscreteEnvironment& env, std::size_t* n_negative) {
    SpectralDensityModel m;
    m.label = "star modes";
    std::size_t neg = 0;
    for (const auto& md : env.modes) {
        if (md.omega > 0.0) m.deltas.push_back({md.omega, md.g * md.g / (md.omega * md.omega)});
        else ++neg;
    }
    if (n_negative) *n_negative = neg;
    return m;
}

} // namespace bathsmith
