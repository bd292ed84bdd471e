// Spectral-density models, electronic systems and their file formats.

#include <doctest.h>

#include <cmath>
#include <limits>

#include "bathsmith/bcf.hpp"
#include "bathsmith/error.hpp"
#include "bathsmith/model.hpp"
#include "bathsmith/model_io.hpp"
#include "bathsmith/quadrature.hpp"
#include "bathsmith/units.hpp"

using namespace bathsmith;

namespace {

const SpectralDensityModel& fmo() {
    static const auto m = load_any_model("fmo_full");
    return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("unit round trip and constants") {
    for (double mev : {0.069, 0.24, 1.0, 123.456})
        CHECK(rel(units::cm_to_mev(units::mev_to_cm(mev)), mev) < 1e-12);
    CHECK(units::angular(1.0) == 1.883651567e-4);
    CHECK(units::thermal_energy(77.0) == doctest::Approx(53.5176796).epsilon(1e-9));
    CHECK(units::inverse_time_to_cm(1000.0) == doctest::Approx(5.308837).epsilon(1e-6));
}

TEST_CASE("bundled FMO model: AR continuum plus 62 Lorentzians of width 1/ps") {
    const auto& m = fmo();
    REQUIRE(m.ar.has_value());
    CHECK(m.ar->S_total == 0.29);
    CHECK(m.ar->s1 == 0.8);
    CHECK(m.ar->s2 == 0.5);
    CHECK(m.ar->w1 == doctest::Approx(0.069 * units::kCmPerMeV).epsilon(1e-12));
    CHECK(m.ar->w2 == doctest::Approx(0.24 * units::kCmPerMeV).epsilon(1e-12));
    CHECK(m.lorentzians.size() == 62);
    for (const auto& l : m.lorentzians) CHECK(l.Gamma == doctest::Approx(5.308837).epsilon(1e-9));
    CHECK(m.deltas.empty());
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(parse_model(R"({"label": "x", "lorentzians": []})"), ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"lorentzians": [{"omega_cm1": 100, "hr": 0.1, "gamma_cm1": 0}]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"deltas": [{"omega_cm1": 100, "hr": -0.1}]})"), ValidationError);
    CHECK_THROWS_AS(parse_model(R"({"ar": {"S": 0.29, "s1": 0.8, "s2": 0.5, "w1_meV": 0, "w2_meV": 0.24}})"),
                    ValidationError);
}

TEST_CASE("schema errors name the field and the line") {
    const char* doc = "{\n  \"label\": \"x\",\n  \"lorentzians\": [\n    {\"omega_cm1\": 100,\n"
                      "     \"gamma_cm1\": 5}\n  ]\n}\n";
    try {
        parse_model(doc);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.field() == "lorentzians[0].hr");
        CHECK(e.line() >= 4);
        CHECK(e.line() <= 5);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    try {
        parse_model("{\n\"lorentzians\": [\n  {\"omega_cm1\": \"wide\", \"hr\": 1, \"gamma_cm1\": 5}]}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.field() == "lorentzians[0].omega_cm1");
        CHECK(e.line() == 3);
    }
    try {
        parse_model("{\n  \"lorentzians\": [\n  }");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("model json round trip") {
    const auto& m = fmo();
    const auto back = parse_model(model_to_json(m));
    REQUIRE(back.lorentzians.size() == m.lorentzians.size());
    CHECK(back.ar->w1 == doctest::Approx(m.ar->w1).epsilon(1e-12));
    for (std::size_t k = 0; k < m.lorentzians.size(); ++k) {
        CHECK(back.lorentzians[k].Omega == m.lorentzians[k].Omega);
        CHECK(back.lorentzians[k].S == m.lorentzians[k].S);
        CHECK(back.lorentzians[k].Gamma == doctest::Approx(m.lorentzians[k].Gamma).epsilon(1e-12));
    }
}

TEST_CASE("mode table ingestion") {
    const auto m = parse_mode_table("# gamma_cm1=5\nomega_cm1,hr\n100,0.1\n200,0.2\n");
    REQUIRE(m.lorentzians.size() == 2);
    CHECK(m.lorentzians[1].Omega == 200.0);
    CHECK(m.lorentzians[1].Gamma == 5.0);
    const auto own = parse_mode_table("omega_cm1,hr,gamma_cm1\n100,0.1,7\n");
    CHECK(own.lorentzians[0].Gamma == 7.0);
    CHECK(parse_mode_table("omega_cm1,hr\n100,0.1\n", 3.0).lorentzians[0].Gamma == 3.0);
    CHECK_THROWS_AS(parse_mode_table("omega_cm1,hr\n100,0.1\n"), ParseError);
    try {
        parse_mode_table("omega_cm1,hr\n100,0.1\n200,abc\n", 5.0);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    const auto table = load_mode_table(data_dir() / "fmo_modes.csv");
    CHECK(table.lorentzians.size() == 62);
}

TEST_CASE("electronic systems") {
    const auto fmo7 = load_electronic_system(data_dir() / "fmo_electronic.json");
    CHECK(fmo7.n_sites() == 7);
    CHECK(fmo7.dipoles.size() == 7);
    CHECK((fmo7.couplings - fmo7.couplings.transpose()).norm() == 0.0);
    for (int i = 0; i < 7; ++i) CHECK(fmo7.couplings(i, i) == 0.0);
    const auto back = parse_electronic_system(electronic_system_to_json(fmo7));
    CHECK((back.couplings - fmo7.couplings).norm() == 0.0);

    CHECK_THROWS_AS(parse_electronic_system(R"({"site_energies_cm1": [1, 2],
        "couplings_cm1": [[0, 1], [2, 0]], "dipoles": [[1,0,0],[0,1,0]]})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_electronic_system(R"({"site_energies_cm1": [1, 2],
        "couplings_cm1": [[0, 1], [1, 0]], "dipoles": [[1,0,0]]})"),
                    ValidationError);
    CHECK_THROWS_AS(validate(DisorderSpec{-1.0, 1, 0}), ValidationError);
    CHECK_THROWS_AS(validate(DisorderSpec{1.0, 0, 0}), ValidationError);
}

TEST_CASE("evaluate_J basics") {
    CHECK(evaluate_J(fmo(), 0.0) == 0.0);
    CHECK_THROWS_AS(evaluate_J(fmo(), -1.0), DomainError);

    SpectralDensityModel one;
    one.lorentzians = {{1000.0, 0.2093, 265.0}};
    double best = 0, arg = 0;
    for (double w = 0; w <= 4000; w += 0.5) {
        const double v = evaluate_J(one, w);
        if (v > best) best = v, arg = w;
    }
    CHECK(std::abs(arg - 1000.0) < 265.0);

    // at 46 cm^-1 the first table mode outweighs every other Lorentzian combined
    const auto& m = fmo();
    REQUIRE(m.lorentzians[0].Omega == 46.0);
    const double first = lorentzian_density(m.lorentzians[0], 46.0);
    double others = 0;
    for (std::size_t k = 1; k < m.lorentzians.size(); ++k) others += lorentzian_density(m.lorentzians[k], 46.0);
    CHECK(first > 3.0 * others);
}

TEST_CASE("density is nonnegative on every bundled dataset") {
    for (const char* name : {"fmo_full", "fmo_effective", "fmo_conventional", "fmo_effective_pseudomode"}) {
        const auto m = load_any_model(name);
        for (int i = 0; i <= 10000; ++i) CHECK_MESSAGE(evaluate_J(m, i * 0.8) >= 0.0, name);
    }
}

TEST_CASE("reorganization energy and Huang-Rhys factor") {
    SpectralDensityModel d;
    d.deltas = {{100.0, 0.05}};
    CHECK(reorganization_energy(d) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(huang_rhys_total(d) == doctest::Approx(0.05).epsilon(1e-15));

    const auto& m = fmo();
    // frozen values of the bundled dataset
    CHECK(reorganization_energy(m) == doctest::Approx(232.024280658).epsilon(1e-9));
    CHECK(reorganization_energy(*m.ar) == doctest::Approx(22.6962806577).epsilon(1e-9));
    CHECK(huang_rhys_total(*m.ar) == doctest::Approx(0.29).epsilon(1e-9));
    CHECK(huang_rhys_total(m) == doctest::Approx(0.609).epsilon(1e-9));

    // each Lorentzian's reorganization energy is Omega * S, so the table sum
    // equals the quadrature of the structured part
    double table = 0;
    for (const auto& l : m.lorentzians) table += l.Omega * l.S;
    CHECK(table == doctest::Approx(209.328).epsilon(1e-12));
    CHECK(rel(reorganization_energy(m.without_ar()), table) < 1e-8);

    // the conventional single Lorentzian was chosen to conserve it
    const auto conv = load_any_model("fmo_conventional");
    CHECK(rel(reorganization_energy(conv.without_ar()), table) < 1e-3);
}

TEST_CASE("AR reorganization energy agrees with a 10x finer fixed grid") {
    const auto ar = *fmo().ar;
    // composite Simpson on [0, 8000] with h = 0.01 cm^-1
    const double h = 0.01;
    const int n = 800000;
    // J/w vanishes at w = 0
    double s = ar_density(ar, n * h) / (n * h);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * ar_density(ar, i * h) / (i * h);
    s *= h / 3.0;
    CHECK(rel(reorganization_energy(ar), s) < 1e-5);
}

TEST_CASE("components are additive") {
    const auto& m = fmo();
    double lam = reorganization_energy(*m.ar), hr = huang_rhys_total(*m.ar);
    for (const auto& l : m.lorentzians) {
        lam += reorganization_energy(l);
        SpectralDensityModel one;
        one.lorentzians = {l};
        hr += huang_rhys_total(one);
    }
    CHECK(rel(reorganization_energy(m), lam) < 1e-12);
    CHECK(rel(huang_rhys_total(m), hr) < 1e-12);
    for (double w : {1.0, 46.0, 250.0, 1500.0}) {
        double j = ar_density(*m.ar, w);
        for (const auto& l : m.lorentzians) j += lorentzian_density(l, w);
        CHECK(rel(evaluate_J(m, w), j) < 1e-13);
    }
}

TEST_CASE("Lorentzian Huang-Rhys integral diverges logarithmically") {
    // J/w^2 ~ c / w near zero with c = 4 Omega S Gamma / (pi (Omega^2 + Gamma^2)),
    // so the integral from omega_lo grows like c ln(1/omega_lo)
    const LorentzianComponent l{247.0, 0.056, 53.0};
    const double c = 4 * l.Omega * l.S * l.Gamma / (units::kPi * (l.Omega * l.Omega + l.Gamma * l.Gamma));
    const double a = lorentzian_hr_integral(l, 1e-2);
    const double b = lorentzian_hr_integral(l, 1e-4);
    const double e = lorentzian_hr_integral(l, 1e-6);
    CHECK((b - a) == doctest::Approx(c * std::log(100.0)).epsilon(1e-5));
    CHECK((e - b) == doctest::Approx(c * std::log(100.0)).epsilon(1e-7));
    // measured deviation from the nominal S at a 1e-2 cm^-1 cutoff
    CHECK(a == doctest::Approx(0.19246358).epsilon(1e-7));
}

TEST_CASE("thermalized density") {
    const auto& m = fmo();
    const double T = 77.0, kt = units::thermal_energy(T);
    CHECK_THROWS_AS(thermalized_density(m, 0.0, 10.0), DomainError);
    CHECK(rel(thermalized_density(m, T, 3000.0), evaluate_J(m, 3000.0)) < 1e-12);
    for (int i = 1; i <= 1000; ++i) {
        const double w = i * 2.0;
        const double lhs = thermalized_density(m, T, -w);
        const double rhs = std::exp(-w / kt) * thermalized_density(m, T, w);
        if (rhs > 1e-300) CHECK(rel(lhs, rhs) < 1e-10);
    }
    // continuity at zero: value approaches k_B T (J/w)(0)
    const double z = thermalized_density(m, T, 0.0);
    CHECK(std::isfinite(z));
    CHECK(thermalized_density(m, T, 1e-6) == doctest::Approx(z).epsilon(1e-6));
    CHECK(thermalized_density(m, T, -1e-6) == doctest::Approx(z).epsilon(1e-6));

    // integral over the real line equals C(0)
    auto f = [&](double w) { return thermalized_density(m, T, w); };
    const auto br = feature_points(m);
    std::vector<double> nbr;
    for (double b : br) nbr.push_back(-b);
    const double pos = quad::integrate_with_breaks(f, 0.0, 8000.0, br, 1e-10).value +
                       quad::integrate(f, 8000.0, std::numeric_limits<double>::infinity(), 1e-10).value;
    const double neg = quad::integrate_with_breaks(f, -8000.0, 0.0, nbr, 1e-10).value;
    CHECK(rel(pos + neg, bcf_zero(m, T)) < 1e-7);
    CHECK(bcf_zero(m, T) == doctest::Approx(195939.20561).epsilon(1e-9));
}
