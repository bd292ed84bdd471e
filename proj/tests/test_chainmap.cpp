// Chain mapping: recurrence coefficients, star form, discrete BCF, truncation search.

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bathsmith/chainmap.hpp"
#include "bathsmith/error.hpp"
#include "bathsmith/model_io.hpp"
#include "bathsmith/quadrature.hpp"
#include "bathsmith/units.hpp"

using namespace bathsmith;

namespace {

const SpectralDensityModel& fmo() {
    static const auto m = load_any_model("fmo_full");
    return m;
}

const DiscreteMeasure& fmo_measure() {
    static const auto m = discretize(thermal_measure(fmo(), 77.0));
    return m;
}

const ChainCoefficients& fmo_chain() {
    static const auto c = lanczos_recurrence(fmo_measure(), 110);
    return c;
}

const CorrelationFunction& fmo_reference() {
    static const auto c = [] {
        BathParameters p;
        p.length = 600.0;
        return bcf_quadrature(fmo(), p);
    }();
    return c;
}

CorrelationFunction head(const CorrelationFunction& c, std::size_t n) {
    auto h = c;
    h.values.resize(n);
    return h;
}

double moment(const DiscreteMeasure& m, int k) {
    double s = 0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) s += m.weights[i] * std::pow(m.nodes[i], k);
    return s;
}

} // namespace

TEST_CASE("Legendre recurrence for the uniform weight") {
    const auto c = recurrence_coefficients([](double) { return 1.0; }, -1.0, 1.0, 51);
    REQUIRE(c.length() == 51);
    CHECK(c.betas[0] == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t n = 0; n <= 50; ++n) {
        CHECK(std::abs(c.alphas[n]) < 1e-8);
        if (n > 0) {
            const double exact = double(n * n) / (4.0 * n * n - 1.0);
            CHECK(std::abs(c.betas[n] - exact) < 1e-8);
        }
    }
}

TEST_CASE("recurrence agrees with Stieltjes on an exact rule for a non-classical weight") {
    // weight (1 + x)^2 e^x on [-1, 1]; a 60-point rule integrates the products exactly enough
    auto w = [](double x) { return (1 + x) * (1 + x) * std::exp(x); };
    const auto rule = quad::gauss_legendre(60);
    const int n = 8;
    std::vector<double> a(n), b(n);
    std::vector<double> p_prev(rule.size(), 0.0), p(rule.size(), 1.0);
    double norm_prev = 1.0;
    for (int k = 0; k < n; ++k) {
        double norm = 0, xn = 0;
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const double wi = rule.weights[i] * w(rule.nodes[i]);
            norm += wi * p[i] * p[i];
            xn += wi * rule.nodes[i] * p[i] * p[i];
        }
        a[k] = xn / norm;
        b[k] = k == 0 ? norm : norm / norm_prev;
        std::vector<double> next(rule.size());
        for (std::size_t i = 0; i < rule.size(); ++i)
            next[i] = (rule.nodes[i] - a[k]) * p[i] - (k == 0 ? 0.0 : b[k]) * p_prev[i];
        p_prev = p;
        p = next;
        norm_prev = norm;
    }
    const auto c = recurrence_coefficients(w, -1.0, 1.0, n);
    for (int k = 0; k < n; ++k) {
        CHECK(c.alphas[k] == doctest::Approx(a[k]).epsilon(1e-10));
        CHECK(c.betas[k] == doctest::Approx(b[k]).epsilon(1e-10));
    }
}

TEST_CASE("single point mass gives a one-site chain") {
    DiscreteMeasure m{{250.0}, {3.5}};
    const auto c = lanczos_recurrence(m, 1);
    REQUIRE(c.length() == 1);
    CHECK(c.alphas[0] == doctest::Approx(250.0));
    CHECK(c.betas[0] == doctest::Approx(3.5));
    const auto star = chain_to_star(c);
    REQUIRE(star.modes.size() == 1);
    CHECK(star.modes[0].omega == doctest::Approx(250.0));
    CHECK(star.modes[0].g == doctest::Approx(std::sqrt(3.5)));
}

TEST_CASE("too many coefficients for the support is a numeric error naming the index") {
    DiscreteMeasure m{{-1.0, 0.0, 1.0}, {1.0, 1.0, 1.0}};
    try {
        lanczos_recurrence(m, 5);
        FAIL("expected a numeric error");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find('3') != std::string::npos);
    }
}

TEST_CASE("symmetric measure has vanishing site frequencies") {
    const auto c = recurrence_coefficients([](double w) { return std::exp(-w * w / 2e5) * (1 + w * w / 1e5); },
                                           -2000.0, 2000.0, 30);
    for (double a : c.alphas) CHECK(std::abs(a) < 1e-10 * 2000.0);
}

TEST_CASE("Legendre star form is the Gauss-Legendre rule") {
    const auto c = recurrence_coefficients([](double) { return 1.0; }, -1.0, 1.0, 51);
    const auto star = chain_to_star(c);
    const auto gl = quad::gauss_legendre(51);
    REQUIRE(star.modes.size() == 51);
    auto nodes = gl.nodes;
    auto weights = gl.weights;
    std::vector<std::size_t> order(51);
    for (std::size_t i = 0; i < 51; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return nodes[x] < nodes[y]; });
    std::vector<std::size_t> sorder(51);
    for (std::size_t i = 0; i < 51; ++i) sorder[i] = i;
    std::sort(sorder.begin(), sorder.end(), [&](auto x, auto y) { return star.modes[x].omega < star.modes[y].omega; });
    for (std::size_t i = 0; i < 51; ++i) {
        const auto& m = star.modes[sorder[i]];
        CHECK(m.omega == doctest::Approx(nodes[order[i]]).epsilon(1e-10));
        CHECK(m.g * m.g / c.betas[0] == doctest::Approx(weights[order[i]] / 2.0).epsilon(1e-9));
    }
}

TEST_CASE("star form sum rules on the FMO measure") {
    const auto chain = fmo_chain().truncated(51);
    const auto star = chain_to_star(chain);
    double s0 = 0, s1 = 0;
    for (const auto& m : star.modes) s0 += m.g * m.g, s1 += m.g * m.g * m.omega;
    CHECK(s0 == doctest::Approx(chain.betas[0]).epsilon(1e-10));
    CHECK(s1 == doctest::Approx(moment(fmo_measure(), 1)).epsilon(1e-9));
    CHECK(star.kappa == doctest::Approx(chain.kappa()).epsilon(1e-14));
    // total weight is C(0)
    CHECK(chain.betas[0] == doctest::Approx(bcf_zero(fmo(), 77.0)).epsilon(1e-3));
}

TEST_CASE("small chains reproduce the measure moments") {
    const auto& meas = fmo_measure();
    const auto star = chain_to_star(fmo_chain().truncated(4));
    const double scale = 1000.0; // keep powers in range
    for (int k = 0; k <= 6; ++k) {
        double s = 0, ref = 0;
        for (const auto& m : star.modes) s += m.g * m.g * std::pow(m.omega / scale, k);
        for (std::size_t i = 0; i < meas.nodes.size(); ++i) ref += meas.weights[i] * std::pow(meas.nodes[i] / scale, k);
        CHECK(s == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("re-tridiagonalizing the star recovers the chain") {
    const auto chain = fmo_chain().truncated(20);
    const auto star = chain_to_star(chain);
    DiscreteMeasure m;
    for (const auto& s : star.modes) {
        m.nodes.push_back(s.omega);
        m.weights.push_back(s.g * s.g);
    }
    const auto back = lanczos_recurrence(m, 20);
    for (std::size_t n = 0; n < 20; ++n) {
        CHECK(back.alphas[n] == doctest::Approx(chain.alphas[n]).epsilon(1e-8).scale(1000.0));
        CHECK(back.betas[n] == doctest::Approx(chain.betas[n]).epsilon(1e-8));
    }
}

TEST_CASE("discrete bcf") {
    DiscreteEnvironment one;
    one.modes = {{300.0, 2.0}};
    const auto c = discrete_bcf(one, 0.5, 100);
    for (std::size_t j = 0; j < 100; j += 9)
        CHECK(std::abs(c.values[j] - 4.0 * std::exp(cplx(0, -units::angular(300.0) * 0.5 * j))) < 1e-12);

    const auto chain = fmo_chain().truncated(51);
    const auto full = discrete_bcf(chain_to_star(chain), 0.25, 10);
    CHECK(full.values[0].real() == doctest::Approx(chain.betas[0]).epsilon(1e-10));
    CHECK(std::abs(full.values[0].imag()) < 1e-10 * chain.betas[0]);
}

TEST_CASE("longer chains extend the agreement window") {
    const auto& ref = fmo_reference();
    const auto d51 = discrete_bcf(chain_to_star(fmo_chain().truncated(51)), ref.dt, ref.size());
    const auto d102 = discrete_bcf(chain_to_star(fmo_chain().truncated(102)), ref.dt, ref.size());
    const std::size_t n300 = 1201;
    const double near51 = bcf_distance(head(ref, n300), head(d51, n300), 100.0);
    CHECK(near51 < 0.05);
    CHECK(bcf_distance(ref, d102, 200.0) < bcf_distance(ref, d51, 200.0));
}

TEST_CASE("truncation search") {
    const auto& ref = fmo_reference();
    // one step: the total weight alone matches C(0)
    const auto one = chain_length_for_horizon(fmo_measure(), head(ref, 2), 0.25, 0.5);
    CHECK(one.length == 1);
    const auto loose = chain_length_for_horizon(fmo_measure(), head(ref, 1201), 300.0, 0.1);
    const auto tight = chain_length_for_horizon(fmo_measure(), head(ref, 1201), 300.0, 0.05);
    CHECK(tight.length >= loose.length);
    CHECK(tight.distance < 0.05);
    CHECK(loose.distance < 0.1);
    CHECK_FALSE(tight.trace.empty());
    CHECK_THROWS_AS(chain_length_for_horizon(fmo_measure(), head(ref, 1201), 300.0, 1e-9, 8), NumericError);
}

TEST_CASE("support tail of the FMO thermal measure") {
    // measured, above the 1e-10 the default support was meant to guarantee (see README)
    const double tail = support_tail_weight(fmo(), 77.0, -2000.0, 3000.0);
    CHECK(tail == doctest::Approx(4.601e-4).epsilon(1e-3));
    CHECK(support_tail_weight(fmo(), 77.0, -2000.0, 30000.0) < 1e-5);
}

TEST_CASE("star csv round trip and delta export") {
    const auto star = chain_to_star(fmo_chain().truncated(12));
    const auto back = parse_star_csv(star_csv(star, {{"temperature_K", "77"}}));
    REQUIRE(back.modes.size() == star.modes.size());
    for (std::size_t i = 0; i < star.modes.size(); ++i) {
        CHECK(back.modes[i].omega == doctest::Approx(star.modes[i].omega).epsilon(1e-11));
        CHECK(back.modes[i].g == doctest::Approx(star.modes[i].g).epsilon(1e-11));
    }
    std::size_t negative = 0;
    const auto m = star_to_delta_model(star, &negative);
    std::size_t positive = 0;
    for (const auto& s : star.modes) positive += s.omega > 0;
    CHECK(m.deltas.size() == positive);
    CHECK(negative == star.modes.size() - positive);
    const auto text = chain_csv(fmo_chain().truncated(3));
    CHECK(text.find("n,alpha_cm1,beta_cm2") != std::string::npos);
}
