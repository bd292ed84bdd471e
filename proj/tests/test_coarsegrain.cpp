// Constrained Lorentzian fits and the conventional single-Lorentzian baseline.

#include <doctest.h>

#include <cmath>

#include "bathsmith/coarsegrain.hpp"
#include "bathsmith/error.hpp"
#include "bathsmith/model_io.hpp"
#include "bathsmith/units.hpp"

using namespace bathsmith;

namespace {

SpectralDensityModel synthetic(double scale = 1.0) {
    SpectralDensityModel m;
    m.lorentzians = {{400.0, 0.05 * scale, 40.0}, {900.0, 0.03 * scale, 60.0}};
    m.label = "synthetic";
    return m;
}

FitOptions quick(int k, std::uint64_t seed) {
    FitOptions o;
    o.k_peaks = k;
    o.seed = seed;
    o.n_starts = 4;
    return o;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("peak count below one is a configuration error") {
    CHECK_THROWS_AS(fit_effective(synthetic(), quick(0, 1)), ConfigError);
}

TEST_CASE("synthetic round trip recovers the parameters") {
    const auto src = synthetic();
    const auto e = fit_effective(src, quick(2, 3));
    REQUIRE(e.lorentzians.size() == 2);
    REQUIRE(e.fit_report);
    CHECK(e.fit_report->objective < 1e-6);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(rel(e.lorentzians[k].Omega, src.lorentzians[k].Omega) < 0.01);
        CHECK(rel(e.lorentzians[k].S, src.lorentzians[k].S) < 0.01);
        CHECK(rel(e.lorentzians[k].Gamma, src.lorentzians[k].Gamma) < 0.01);
    }
    const auto [dr, dh] = constraint_residuals(e);
    CHECK(dr < 1e-6);
    CHECK(dh < 1e-6);
    CHECK(e.fit_report->objective <= e.fit_report->initial_objective);
}

TEST_CASE("constraints hold for every seed and the best objective never exceeds the start") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        auto o = quick(1, seed);
        o.n_starts = 2;
        const auto e = fit_effective(synthetic(), o);
        const auto [dr, dh] = constraint_residuals(e);
        CHECK(dr < 1e-6);
        CHECK(dh < 1e-6);
        CHECK(e.fit_report->reorg_residual < 1e-6);
        CHECK(e.fit_report->hr_residual < 1e-6);
        CHECK(e.fit_report->objective <= e.fit_report->initial_objective);
        for (const auto& l : e.lorentzians) {
            CHECK(l.Omega > 0);
            CHECK(l.S > 0);
            CHECK(l.Gamma > 0);
        }
    }
}

TEST_CASE("a single delta fitted with one Lorentzian is forced onto the delta") {
    SpectralDensityModel m;
    m.deltas = {{600.0, 0.08}};
    const auto e = fit_effective(m, quick(1, 5));
    REQUIRE(e.lorentzians.size() == 1);
    CHECK(std::abs(e.lorentzians[0].Omega - 600.0) <= 1.0);
    CHECK(e.lorentzians[0].S == doctest::Approx(0.08).epsilon(1e-6));
}

TEST_CASE("fixed seed gives a bit-identical fit") {
    const auto a = fit_effective(synthetic(), quick(2, 21));
    const auto b = fit_effective(synthetic(), quick(2, 21));
    CHECK(a.fit_report->objective == b.fit_report->objective);
    CHECK(a.fit_report->iterations == b.fit_report->iterations);
    CHECK(a.fit_report->best_start == b.fit_report->best_start);
    for (std::size_t k = 0; k < a.lorentzians.size(); ++k) {
        CHECK(a.lorentzians[k].Omega == b.lorentzians[k].Omega);
        CHECK(a.lorentzians[k].S == b.lorentzians[k].S);
        CHECK(a.lorentzians[k].Gamma == b.lorentzians[k].Gamma);
    }
    auto threaded = quick(2, 21);
    threaded.threads = 3;
    const auto c = fit_effective(synthetic(), threaded);
    CHECK(c.fit_report->objective == a.fit_report->objective);
    CHECK(c.lorentzians[0].Omega == a.lorentzians[0].Omega);
}

TEST_CASE("fitting is scale-equivariant in the Huang-Rhys factors") {
    const auto a = fit_effective(synthetic(1.0), quick(2, 8));
    const auto b = fit_effective(synthetic(2.5), quick(2, 8));
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(rel(b.lorentzians[k].S, 2.5 * a.lorentzians[k].S) < 0.01);
        CHECK(rel(b.lorentzians[k].Omega, a.lorentzians[k].Omega) < 0.01);
        CHECK(rel(b.lorentzians[k].Gamma, a.lorentzians[k].Gamma) < 0.01);
    }
}

TEST_CASE("the AR continuum passes through unchanged") {
    auto m = synthetic();
    m.ar = load_any_model("fmo_full").ar;
    const auto e = fit_effective(m, quick(2, 4));
    REQUIRE(e.ar);
    CHECK(e.ar->w1 == m.ar->w1);
    CHECK(e.target_reorg == doctest::Approx(reorganization_energy(m)).epsilon(1e-12));
    const auto [dr, dh] = constraint_residuals(e);
    CHECK(dr < 1e-6);
    CHECK(dh < 1e-6);
}

TEST_CASE("effective environment json round trip") {
    const auto e = fit_effective(synthetic(), quick(2, 2));
    const auto back = parse_effective(effective_to_json(e));
    REQUIRE(back.lorentzians.size() == e.lorentzians.size());
    CHECK(back.lorentzians[1].Omega == doctest::Approx(e.lorentzians[1].Omega).epsilon(1e-11));
    REQUIRE(back.fit_report);
    CHECK(back.fit_report->seed == 2);
    CHECK(back.target_hr == doctest::Approx(e.target_hr).epsilon(1e-11));
    // the emitted file is also a plain model document
    CHECK(parse_model(effective_to_json(e)).lorentzians.size() == 2);
}

TEST_CASE("conventional coarse graining of the FMO model") {
    const auto full = load_any_model("fmo_full");
    const auto cg = conventional_coarse_grain(full, 1000.0, units::inverse_time_to_cm(20.0));
    REQUIRE(cg.lorentzians.size() == 1);
    CHECK(cg.lorentzians[0].S == doctest::Approx(0.2093).epsilon(1e-3));
    CHECK(cg.lorentzians[0].S == doctest::Approx(0.209328).epsilon(1e-9));
    CHECK(cg.lorentzians[0].Gamma == doctest::Approx(265.441873).epsilon(1e-9));
    CHECK(reorganization_energy(cg.model()) == doctest::Approx(reorganization_energy(full)).epsilon(1e-9));
    CHECK(cg.ar.has_value());
    CHECK_FALSE(cg.fit_report.has_value());
    // deliberately not Huang-Rhys conserving
    CHECK(std::abs(huang_rhys_total(cg.model()) - huang_rhys_total(full)) > 0.1);
}

TEST_CASE("conventional coarse graining of a single Lorentzian is the identity") {
    SpectralDensityModel m;
    m.lorentzians = {{700.0, 0.07, 35.0}};
    const auto cg = conventional_coarse_grain(m, 700.0, 35.0);
    CHECK(cg.lorentzians[0].S == doctest::Approx(0.07).epsilon(1e-12));
}
