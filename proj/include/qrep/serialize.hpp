#pragma once

#include "qrep/code.hpp"

#include "json.hpp"

#include <string>

namespace qrep {

inline constexpr const char* artifact_version = "0.1.0";

// Fock-space objects as JSON: {"kind": ..., "basis": {"modes": M,
// "cutoff": C}, "entries": [[re, im], ...]} with operator entries flattened
// row-major. Loaders validate kind, dimensions and entry shape.
nlohmann::json basis_to_json(const FockBasis& basis);
FockBasis basis_from_json(const nlohmann::json& j);

nlohmann::json operator_to_json(const Operator& op);
Operator operator_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const StateVector& s);
StateVector state_from_json(const nlohmann::json& j);

nlohmann::json density_to_json(const DensityMatrix& d);
DensityMatrix density_from_json(const nlohmann::json& j);

// Custom code schema (strict; unknown keys rejected):
// {
//   "name": "optional label",
//   "modes": 2, "cutoff": 4,
//   "logical0": [{"occupation": [4, 0], "re": 0.707..., "im": 0.0}, ...],
//   "logical1": [...]
// }
// Occupations must fit the cutoff and appear once per codeword; the two
// codewords must be orthonormal within 1e-10.
CodeSpec code_from_json(const nlohmann::json& j);
CodeSpec load_custom_code(const std::string& path);

// Deterministic "%.12g" rendering used by every CSV writer.
std::string format_double(double v);

}  // namespace qrep
