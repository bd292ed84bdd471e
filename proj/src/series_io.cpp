// series_io.cpp - deterministic CSV writers and a small SVG renderer

#include "bathsmith/series_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bathsmith/error.hpp"

namespace bathsmith {

namespace {

void write_meta(std::ostringstream& os, const Metadata& meta) {
    os << "# tool_version: bathsmith " << BATHSMITH_VERSION << "\n";
    for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
}

} // namespace

std::string format_number(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", precision - 1, v == 0.0 ? 0.0 : v);
    return buf;
}

std::string format_number(double v) { return format_number(v, 12); }

std::string correlation_csv(const CorrelationFunction& c, const Metadata& meta) {
    std::ostringstream os;
    write_meta(os, meta);
    os << "# temperature_K: " << format_number(c.temperature) << "\n";
    if (!c.label.empty()) os << "# model: " << c.label << "\n";
    os << "t_fs,re,im\n";
    for (std::size_t j = 0; j < c.size(); ++j)
        os << format_number(c.t(j)) << ',' << format_number(c.values[j].real()) << ','
           << format_number(c.values[j].imag()) << '\n';
    return os.str();
}

std::string spectrum_csv(const std::vector<double>& omega, const std::vector<double>& values,
                         const Metadata& meta) {
    return table_csv({"omega_cm1", "value"}, {omega, values}, meta);
}

std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns, const Metadata& meta) {
    if (header.size() != columns.size()) throw ConfigError("table_csv: header/column mismatch");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != n) throw ConfigError("table_csv: columns differ in length");
    std::ostringstream os;
    write_meta(os, meta);
    for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < columns.size(); ++k)
            os << (k ? "," : "") << format_number(columns[k][i]);
        os << '\n';
    }
    return os.str();
}

Metadata parse_metadata(const std::string& text) {
    Metadata meta;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') break;
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        auto key = line.substr(1, colon - 1);
        auto val = line.substr(colon + 1);
        key.erase(0, key.find_first_not_of(' '));
        val.erase(0, val.find_first_not_of(' '));
        meta.emplace_back(key, val);
    }
    return meta;
}

CorrelationFunction parse_correlation_csv(const std::string& text) {
    CorrelationFunction c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header = false;
    std::vector<double> t;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# temperature_K:", 0) == 0) c.temperature = std::stod(line.substr(16));
            else if (line.rfind("# model:", 0) == 0) c.label = line.substr(9);
            continue;
        }
        if (!header) {
            if (line.rfind("t_fs,re,im", 0) != 0)
                throw ParseError("correlation CSV must have header t_fs,re,im", "header", lineno);
            header = true;
            continue;
        }
        double a = 0, b = 0, d = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &d) != 3)
            throw ParseError("malformed correlation row", "row", lineno);
        t.push_back(a);
        c.values.emplace_back(b, d);
    }
    if (t.size() < 2) throw ParseError("correlation CSV needs at least two rows", "row", lineno);
    c.dt = t[1] - t[0];
    for (std::size_t j = 1; j < t.size(); ++j)
        if (std::abs(t[j] - c.dt * static_cast<double>(j)) > 1e-9 * (1.0 + t[j]))
            throw ParseError("correlation grid must be uniform and start at 0", "t_fs", 0);
    return c;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
    out << text;
}

std::string svg_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                     const std::string& y_label, const std::string& title) {
    const double W = 720, H = 440, ml = 80, mr = 20, mt = 40, mb = 60;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0)) { x0 -= 1; x1 += 1; }
    if (!(y1 > y0)) { y0 -= 1; y1 += 1; }
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
           << format_number(xv, 4) << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
           << format_number(yv, 3) << "</text>\n";
    }
    os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15
       << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"18\" y=\"" << (mt + H - mb) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
       << "transform=\"rotate(-90 18 " << (mt + H - mb) / 2 << ")\">" << y_label << "</text>\n";
    if (!title.empty())
        os << "<text x=\"" << W / 2 << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << title
           << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& sr = series[s];
        const std::size_t stride = std::max<std::size_t>(1, sr.x.size() / 2000);
        os << "<polyline fill=\"none\" stroke=\"" << colors[s % 6] << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < sr.x.size(); i += stride) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(sr.x[i]), py(sr.y[i]));
            os << buf;
        }
        os << "\"/>\n";
        os << "<text x=\"" << W - mr - 10 << "\" y=\"" << mt + 16 * (s + 1)
           << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << colors[s % 6] << "\">" << sr.name
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace bathsmith
