// model_io.cpp - model/system parsing with field and line diagnostics

#include "bathsmith/model_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bathsmith/error.hpp"
#include "bathsmith/units.hpp"

namespace bathsmith {

using nlohmann::json;

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    int line = 1;
    for (std::size_t i = 0; i < offset; ++i)
        if (text[i] == '\n') ++line;
    return line;
}

// nlohmann does not keep source positions for values, so schema errors are
// attributed to the n-th occurrence of the key in the raw text.
int locate_key(std::string_view text, const std::string& key, std::size_t occurrence = 0) {
    const std::string needle = "\"" + key + "\"";
    std::size_t pos = 0;
    for (std::size_t k = 0;; ++k) {
        pos = text.find(needle, pos);
        if (pos == std::string_view::npos) return 0;
        if (k == occurrence) return line_of_offset(text, pos);
        pos += needle.size();
    }
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), {},
                         line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
    }
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    double number(const json& obj, const std::string& key, const std::string& path,
                  std::size_t occurrence = 0) const {
        if (!obj.is_object() || !obj.contains(key)) {
            // a missing key has no position; point at a sibling of the same object
            const std::string anchor = obj.is_object() && !obj.empty() ? obj.begin().key() : key;
            fail("missing field '" + path + "'", path, anchor, occurrence);
        }
        const auto& v = obj.at(key);
        if (!v.is_number()) fail("field '" + path + "' must be a number", path, key, occurrence);
        return v.get<double>();
    }

    const json& array(const json& obj, const std::string& key, bool required = false) const {
        static const json empty = json::array();
        if (!obj.contains(key)) {
            if (required) fail("missing field '" + key + "'", key, key, 0);
            return empty;
        }
        const auto& v = obj.at(key);
        if (!v.is_array()) fail("field '" + key + "' must be an array", key, key, 0);
        return v;
    }

    [[noreturn]] void fail(const std::string& msg, const std::string& path, const std::string& key,
                           std::size_t occurrence) const {
        const int line = locate_key(text_, key, occurrence);
        std::ostringstream os;
        os << msg;
        if (line > 0) os << " (line " << line << ")";
        throw ParseError(os.str(), path, line);
    }

private:
    std::string_view text_;
};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

} // namespace

SpectralDensityModel parse_model(std::string_view text) {
    const json doc = parse_json(text);
    if (!doc.is_object()) throw ParseError("model document must be a JSON object", {}, 1);
    Reader rd(text);
    SpectralDensityModel m;
    if (doc.contains("label")) {
        if (!doc["label"].is_string()) rd.fail("field 'label' must be a string", "label", "label", 0);
        m.label = doc["label"].get<std::string>();
    }
    if (doc.contains("ar") && !doc["ar"].is_null()) {
        const auto& a = doc["ar"];
        if (!a.is_object()) rd.fail("field 'ar' must be an object", "ar", "ar", 0);
        ARComponent ar;
        ar.S_total = rd.number(a, "S", "ar.S");
        ar.s1 = rd.number(a, "s1", "ar.s1");
        ar.s2 = rd.number(a, "s2", "ar.s2");
        ar.w1 = units::mev_to_cm(rd.number(a, "w1_meV", "ar.w1_meV"));
        ar.w2 = units::mev_to_cm(rd.number(a, "w2_meV", "ar.w2_meV"));
        m.ar = ar;
    }
    const auto& ls = rd.array(doc, "lorentzians");
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const std::string p = "lorentzians[" + std::to_string(i) + "].";
        LorentzianComponent l;
        l.Omega = rd.number(ls[i], "omega_cm1", p + "omega_cm1", i);
        l.S = rd.number(ls[i], "hr", p + "hr", i);
        l.Gamma = rd.number(ls[i], "gamma_cm1", p + "gamma_cm1", i);
        m.lorentzians.push_back(l);
    }
    const auto& ds = rd.array(doc, "deltas");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string p = "deltas[" + std::to_string(i) + "].";
        // omega_cm1 keys of the lorentzians come first in document order
        DeltaComponent d;
        d.omega = rd.number(ds[i], "omega_cm1", p + "omega_cm1", ls.size() + i);
        d.s = rd.number(ds[i], "hr", p + "hr", ls.size() + i);
        m.deltas.push_back(d);
    }
    validate(m);
    return m;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input file '" + path.string() + "'", path.string(), 0);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

namespace {

template <class F>
auto with_file_context(const std::filesystem::path& path, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.field(), e.line());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

} // namespace

SpectralDensityModel load_model(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    return with_file_context(path, [&] { return parse_model(text); });
}

std::string model_to_json(const SpectralDensityModel& model, int indent) {
    json doc;
    doc["label"] = model.label;
    if (model.ar) {
        doc["ar"] = {{"S", model.ar->S_total},
                     {"s1", model.ar->s1},
                     {"s2", model.ar->s2},
                     {"w1_meV", units::cm_to_mev(model.ar->w1)},
                     {"w2_meV", units::cm_to_mev(model.ar->w2)}};
    }
    doc["lorentzians"] = json::array();
    for (const auto& l : model.lorentzians)
        doc["lorentzians"].push_back({{"omega_cm1", l.Omega}, {"hr", l.S}, {"gamma_cm1", l.Gamma}});
    doc["deltas"] = json::array();
    for (const auto& d : model.deltas) doc["deltas"].push_back({{"omega_cm1", d.omega}, {"hr", d.s}});
    return doc.dump(indent);
}

SpectralDensityModel parse_mode_table(std::string_view text, std::optional<double> gamma_cm1) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    std::optional<double> header_gamma;
    bool has_gamma_col = false;
    struct Row { double w, s; std::optional<double> g; int line; };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos && trim(line.substr(1, eq - 1)) == "gamma_cm1") {
                try {
                    header_gamma = std::stod(line.substr(eq + 1));
                } catch (const std::exception&) {
                    throw ParseError("bad gamma_cm1 header value", "gamma_cm1", lineno);
                }
            }
            continue;
        }
        std::vector<std::string> cols;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cols.push_back(trim(c));
        if (!header_seen) {
            if (cols.size() < 2 || cols[0] != "omega_cm1" || cols[1] != "hr")
                throw ParseError("mode table header must start with 'omega_cm1,hr'", "header", lineno);
            has_gamma_col = cols.size() > 2 && cols[2] == "gamma_cm1";
            header_seen = true;
            continue;
        }
        if (cols.size() < 2 || (has_gamma_col && cols.size() > 3) || (!has_gamma_col && cols.size() > 2))
            throw ParseError("wrong number of columns", "row", lineno);
        Row r{};
        r.line = lineno;
        try {
            std::size_t used = 0;
            r.w = std::stod(cols[0], &used);
            if (used != cols[0].size()) throw std::invalid_argument("trailing");
            r.s = std::stod(cols[1], &used);
            if (used != cols[1].size()) throw std::invalid_argument("trailing");
            if (has_gamma_col && cols.size() == 3 && !cols[2].empty()) r.g = std::stod(cols[2]);
        } catch (const std::exception&) {
            throw ParseError("non-numeric value in mode table", "row", lineno);
        }
        rows.push_back(r);
    }
    if (!header_seen) throw ParseError("mode table has no header", "header", lineno);
    const std::optional<double> def = gamma_cm1 ? gamma_cm1 : header_gamma;
    SpectralDensityModel m;
    for (const auto& r : rows) {
        const auto g = r.g ? r.g : def;
        if (!g) throw ParseError("no gamma_cm1 for mode (column, header or default)", "gamma_cm1", r.line);
        m.lorentzians.push_back({r.w, r.s, *g});
    }
    validate(m);
    return m;
}

SpectralDensityModel load_mode_table(const std::filesystem::path& path,
                                     std::optional<double> gamma_cm1) {
    const std::string text = read_text_file(path);
    return with_file_context(path, [&] {
        auto m = parse_mode_table(text, gamma_cm1);
        m.label = path.stem().string();
        return m;
    });
}

ElectronicSystem parse_electronic_system(std::string_view text) {
    const json doc = parse_json(text);
    Reader rd(text);
    if (!doc.is_object()) throw ParseError("electronic system must be a JSON object", {}, 1);
    ElectronicSystem sys;
    if (doc.contains("label") && doc["label"].is_string()) sys.label = doc["label"].get<std::string>();
    const auto& e = rd.array(doc, "site_energies_cm1", true);
    for (const auto& v : e) {
        if (!v.is_number()) rd.fail("site energies must be numbers", "site_energies_cm1", "site_energies_cm1", 0);
        sys.site_energies.push_back(v.get<double>());
    }
    const auto n = sys.site_energies.size();
    const auto& c = rd.array(doc, "couplings_cm1", true);
    if (c.size() != n) rd.fail("couplings_cm1 must have one row per site", "couplings_cm1", "couplings_cm1", 0);
    sys.couplings = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!c[i].is_array() || c[i].size() != n)
            rd.fail("couplings_cm1 must be a square matrix", "couplings_cm1", "couplings_cm1", 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (!c[i][j].is_number()) rd.fail("couplings must be numbers", "couplings_cm1", "couplings_cm1", 0);
            sys.couplings(i, j) = c[i][j].get<double>();
        }
    }
    const auto& d = rd.array(doc, "dipoles", true);
    for (const auto& v : d) {
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
            rd.fail("each dipole must be [x, y, z]", "dipoles", "dipoles", 0);
        sys.dipoles.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }
    validate(sys);
    return sys;
}

ElectronicSystem load_electronic_system(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    return with_file_context(path, [&] { return parse_electronic_system(text); });
}

std::string electronic_system_to_json(const ElectronicSystem& system, int indent) {
    json doc;
    doc["label"] = system.label;
    doc["site_energies_cm1"] = system.site_energies;
    json rows = json::array();
    for (Eigen::Index i = 0; i < system.couplings.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < system.couplings.cols(); ++j) row.push_back(system.couplings(i, j));
        rows.push_back(row);
    }
    doc["couplings_cm1"] = rows;
    doc["dipoles"] = json::array();
    for (const auto& mu : system.dipoles) doc["dipoles"].push_back({mu.x(), mu.y(), mu.z()});
    return doc.dump(indent);
}

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("BATHSMITH_DATA"); env && *env) return env;
    return BATHSMITH_DEFAULT_DATA_DIR;
}

std::filesystem::path resolve_data_file(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    if (fs::exists(name_or_path)) return name_or_path;
    const fs::path base = data_dir();
    for (const fs::path& cand : {base / name_or_path, base / (name_or_path + ".json")})
        if (fs::exists(cand)) return cand;
    throw ParseError("input file '" + name_or_path + "' not found (also looked in " +
                         base.string() + ")",
                     name_or_path, 0);
}

SpectralDensityModel load_any_model(const std::string& name_or_path) {
    const auto path = resolve_data_file(name_or_path);
    if (path.extension() == ".csv") return load_mode_table(path);
    return load_model(path);
}

} // namespace bathsmith
