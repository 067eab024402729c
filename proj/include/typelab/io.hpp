#ifndef TYPELAB_IO_HPP
#define TYPELAB_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "typelab/measure.hpp"
#include "typelab/nazarov.hpp"
#include "typelab/sturm_liouville.hpp"

namespace typelab {

// Measure files:
//   {"symmetric": bool, "real_atoms": [[pos, mass], ...],
//    "real_density": {"grid": [...], "values": [...]},
//    "imag_atoms": [[height, mass], ...], "truncation_radius": R}
// Generator shorthands accepted on load:
//   {"lattice": {"spacing": l, "mass": m, "count": K}}
//   {"lebesgue": {"level": c, "radius": R}}
nlohmann::json measure_to_json(const SpectralMeasure& mu);
SpectralMeasure measure_from_json(const nlohmann::json& j);

// Diffeo files: {"family": "identity"|"arctan_shift"|"arcsinh_shift", "beta": x}
nlohmann::json diffeo_to_json(const GammaDiffeo& X);
GammaDiffeo diffeo_from_json(const nlohmann::json& j);

// Potential files: {"kind": "zero"|"constant"|"sampled", "value": q0,
//                   "grid": [...], "values": [...]}
nlohmann::json potential_to_json(const Potential& q);
Potential potential_from_json(const nlohmann::json& j);

// Weight files: sampled grids with an "infinity_outside" flag.
nlohmann::json weight_samples_to_json(const std::vector<double>& grid,
                                      const std::vector<double>& values,
                                      bool infinity_outside);

nlohmann::json load_json_file(const std::filesystem::path& path);

// temp-file-plus-rename; the write is atomic at the filesystem level
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);
void write_csv_atomic(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

std::string file_digest(const std::filesystem::path& path);

// The versioned defaults every report echoes.
nlohmann::json defaults_json();

} // namespace typelab

#endif
