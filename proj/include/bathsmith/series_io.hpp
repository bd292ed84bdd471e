// series_io.hpp - CSV and SVG output for sampled curves

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bathsmith/bcf.hpp"

namespace bathsmith {

using Metadata = std::vector<std::pair<std::string, std::string>>;

// 12 significant digits, scientific notation.
std::string format_number(double v);
std::string format_number(double v, int precision);

// "# key: value" header (tool version first), then the column header and rows.
std::string correlation_csv(const CorrelationFunction& c, const Metadata& meta = {});
std::string spectrum_csv(const std::vector<double>& omega, const std::vector<double>& values,
                         const Metadata& meta = {});
// Generic table with a header row; every column has the same length.
std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns, const Metadata& meta = {});

CorrelationFunction parse_correlation_csv(const std::string& text);

// Parsed metadata header of any file written above.
Metadata parse_metadata(const std::string& text);

void write_text_file(const std::filesystem::path& path, const std::string& text);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal SVG line plot with labelled axes.
std::string svg_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                     const std::string& y_label, const std::string& title = {});

} // namespace bathsmith
