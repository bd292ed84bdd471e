// scenario.cpp - scenario parsing and execution

#include "bathsmith/scenario.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "bathsmith/error.hpp"
#include "bathsmith/model_io.hpp"

namespace bathsmith {

using nlohmann::json;

namespace {

int key_line(const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

[[noreturn]] void fail(const std::string& text, const std::string& key, const std::string& msg) {
    const int line = key_line(text, key);
    throw ParseError("scenario field '" + key + "' " + msg + (line ? " (line " + std::to_string(line) + ")" : ""),
                     key, line);
}

double num(const std::string& text, const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(text, key, "must be a number");
    return obj[key].get<double>();
}

std::string coupling_tag(double V) {
    std::ostringstream os;
    os << V;
    return os.str();
}

std::filesystem::path resolve(const std::string& name, const std::filesystem::path& base) {
    if (!base.empty()) {
        const auto p = base / name;
        if (std::filesystem::exists(p)) return p;
    }
    return resolve_data_file(name);
}

} // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed scenario JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("scenario must be a JSON object", {}, 1);
    Scenario s;
    s.label = doc.value("label", std::string{});
    for (const char* key : {"system", "environment"})
        if (!doc.contains(key) || !doc[key].is_string()) fail(text, key, "must name a file");
    const auto sys_path = resolve(doc["system"].get<std::string>(), base_dir);
    const auto env_path = resolve(doc["environment"].get<std::string>(), base_dir);
    s.system = load_electronic_system(sys_path);
    s.environment = env_path.extension() == ".csv" ? load_mode_table(env_path) : load_model(env_path);
    s.inputs = {sys_path, env_path};
    if (doc.contains("ar_pseudomode")) {
        const auto& a = doc["ar_pseudomode"];
        if (!a.is_object()) fail(text, "ar_pseudomode", "must be an object");
        s.ar_mode = PseudomodeSpec{num(text, a, "omega_cm1", 0.0), num(text, a, "hr", 0.0),
                                   num(text, a, "gamma_cm1", 0.0)};
    }
    s.keep_modes = static_cast<std::size_t>(num(text, doc, "keep_modes", 0.0));
    s.propagation.bath_temperature = num(text, doc, "temperature_K", 77.0);
    if (doc.contains("disorder")) {
        const auto& d = doc["disorder"];
        s.disorder.sigma = num(text, d, "sigma_cm1", 0.0);
        s.disorder.n_samples = static_cast<std::size_t>(num(text, d, "n_samples", 1.0));
        s.disorder.seed = d.contains("seed") ? d["seed"].get<std::uint64_t>() : 0;
    }
    if (doc.contains("coupling_scan_cm1")) {
        if (!doc["coupling_scan_cm1"].is_array()) fail(text, "coupling_scan_cm1", "must be an array");
        for (const auto& v : doc["coupling_scan_cm1"]) s.coupling_scan.push_back(v.get<double>());
    }
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        s.grid.lo = num(text, g, "lo_cm1", s.grid.lo);
        s.grid.hi = num(text, g, "hi_cm1", s.grid.hi);
        s.grid.spacing = num(text, g, "spacing_cm1", s.grid.spacing);
    }
    s.window_sigma = num(text, doc, "window_fs", 0.0);
    if (doc.contains("propagation")) {
        const auto& p = doc["propagation"];
        auto& c = s.propagation;
        c.fock_dim = static_cast<int>(num(text, p, "fock_dim", c.fock_dim));
        c.max_excitations = static_cast<int>(num(text, p, "max_excitations", c.max_excitations));
        c.min_weight = num(text, p, "min_weight", c.min_weight);
        c.matsubara_modes = static_cast<int>(num(text, p, "matsubara_modes", c.matsubara_modes));
        c.dt = num(text, p, "dt_fs", c.dt);
        c.horizon = num(text, p, "horizon_fs", c.horizon);
        if (p.contains("exact_lorentzian")) c.exact_lorentzian = p["exact_lorentzian"].get<bool>();
        if (p.contains("check_convergence")) c.check_convergence = p["check_convergence"].get<bool>();
    }
    s.propagation.label = s.environment.label;
    s.propagation.site_modes = {scenario_modes(s)};
    validate(s.disorder);
    return s;
}

Scenario load_scenario(const std::string& name_or_path) {
    const auto path = resolve_data_file(name_or_path);
    try {
        auto s = parse_scenario(read_text_file(path), path.parent_path());
        s.inputs.insert(s.inputs.begin(), path);
        return s;
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.field(), e.line());
    }
}

std::vector<PseudomodeSpec> scenario_modes(const Scenario& s) {
    SpectralDensityModel m = s.environment;
    if (s.keep_modes > 0 && s.keep_modes < m.lorentzians.size()) {
        std::stable_sort(m.lorentzians.begin(), m.lorentzians.end(), [](const auto& a, const auto& b) {
            return a.Omega * a.S > b.Omega * b.S;
        });
        m.lorentzians.resize(s.keep_modes);
        std::sort(m.lorentzians.begin(), m.lorentzians.end(),
                  [](const auto& a, const auto& b) { return a.Omega < b.Omega; });
    }
    return pseudomodes_from(m, s.ar_mode);
}

std::vector<AbsorptionSpectrum> run_scenario(const Scenario& s, std::size_t threads,
                                             std::vector<DipoleCorrelation>* correlations) {
    std::vector<ElectronicSystem> systems;
    if (s.coupling_scan.empty()) systems.push_back(s.system);
    for (double V : s.coupling_scan) systems.push_back(with_coupling(s.system, V));
    std::vector<AbsorptionSpectrum> out;
    for (std::size_t k = 0; k < systems.size(); ++k) {
        const auto& sys = systems[k];
        PseudomodeEngine engine(sys, s.propagation);
        DipoleCorrelation d;
        if (s.disorder.sigma > 0.0) {
            d = disorder_ensemble(engine, sys, s.disorder, threads);
        } else {
            d = engine.propagate(sys.site_energies);
        }
        d.label = s.propagation.label;
        auto spec = absorption_from_correlation(apply_window(d, s.window_sigma), s.grid);
        spec.system = sys.label;
        if (!s.coupling_scan.empty()) spec.system += " V=" + coupling_tag(s.coupling_scan[k]);
        spec.disorder = s.disorder;
        if (correlations) correlations->push_back(std::move(d));
        out.push_back(std::move(spec));
    }
    return out;
}

} // namespace bathsmith
