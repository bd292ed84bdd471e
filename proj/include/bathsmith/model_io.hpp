// model_io.hpp - JSON/CSV ingestion and serialization of models and systems

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bathsmith/model.hpp"

namespace bathsmith {

// Parses the model schema:
//   { "label", "ar": {S, s1, s2, w1_meV, w2_meV},
//     "lorentzians": [{omega_cm1, hr, gamma_cm1}], "deltas": [{omega_cm1, hr}] }
// Schema problems raise ParseError (field + line), bad values ValidationError.
SpectralDensityModel parse_model(std::string_view text);
SpectralDensityModel load_model(const std::filesystem::path& path);

// Writes the same schema back (w1/w2 converted to meV).
std::string model_to_json(const SpectralDensityModel& model, int indent = 2);

// Mode table "omega_cm1,hr" (optional third column gamma_cm1). The damping
// of rows without their own width comes from gamma_cm1 if given, else from a
// "# gamma_cm1=<value>" header line; a missing width is a ParseError.
SpectralDensityModel parse_mode_table(std::string_view text,
                                      std::optional<double> gamma_cm1 = std::nullopt);
SpectralDensityModel load_mode_table(const std::filesystem::path& path,
                                     std::optional<double> gamma_cm1 = std::nullopt);

// { "label", "site_energies_cm1": [...], "couplings_cm1": [[...]], "dipoles": [[x,y,z],...] }
ElectronicSystem parse_electronic_system(std::string_view text);
ElectronicSystem load_electronic_system(const std::filesystem::path& path);
std::string electronic_system_to_json(const ElectronicSystem& system, int indent = 2);

// Bundled dataset directory; BATHSMITH_DATA overrides the compiled-in default.
std::filesystem::path data_dir();

// Resolves a model argument: an existing path is used as-is, otherwise
// "<name>" or "<name>.json" is looked up in data_dir().
std::filesystem::path resolve_data_file(const std::string& name_or_path);

// Model from a .json or .csv file (by extension).
SpectralDensityModel load_any_model(const std::string& name_or_path);

std::string read_text_file(const std::filesystem::path& path);

} // namespace bathsmith
