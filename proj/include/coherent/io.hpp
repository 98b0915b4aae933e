#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "coherent/coherent_family.hpp"
#include "coherent/lie_core.hpp"
#include "coherent/orbit_dynamics.hpp"
#include "coherent/path_integral.hpp"

namespace coherent::io {

using json = nlohmann::ordered_json;

/// Parses text, turning syntax errors into PARSE_ERROR with line and column.
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::filesystem::path& path);

json to_json(Complex z);
json to_json(const Vector& v);
json to_json(const RealVector& v);
json to_json(const Matrix& m);

/// [re, im] pairs; `what` names the field in error messages.
Complex complex_from_json(const json& j, const std::string& what);
Vector vector_from_json(const json& j, const std::string& what);
Matrix matrix_from_json(const json& j, const std::string& what);

// Generator files: {"label", "dimension", "generators": [matrix, ...]}.
LieAlgebraRep parse_generator_json(const json& j, const Tolerances& tol = {});
LieAlgebraRep load_generator_file(const std::filesystem::path& path, const Tolerances& tol = {});
json generator_json(const LieAlgebraRep& rep);

/// `rep` field of fiducial files and run configs: {"spin": "1"} or a path to
/// a generator file, resolved against base_dir.
LieAlgebraRep rep_from_json(const json& j, const std::filesystem::path& base_dir, const Tolerances& tol = {});

// Fiducial files: {"rep": ..., "amplitudes": [[re, im], ...]}.
struct LoadedFiducial {
  LieAlgebraRep rep;
  FiducialVector psi;
  double renormalized_by = 0.0;
  std::vector<std::string> warnings;
};
LoadedFiducial parse_fiducial_json(const json& j, const std::filesystem::path& base_dir,
                                   const Tolerances& tol = {});
LoadedFiducial load_fiducial_file(const std::filesystem::path& path, const Tolerances& tol = {});

// Schedule files: [{"until": t, "h": [h1, ..., hn]}, ...], starting at t = 0.
HamiltonianSchedule parse_schedule_json(const json& j, int algebra_dim);
HamiltonianSchedule load_schedule_file(const std::filesystem::path& path, int algebra_dim);
json schedule_json(const HamiltonianSchedule& schedule);

json to_json(const IsotropySubalgebra& s);
json to_json(const IsotropyReport& r);
json to_json(const IdentityCheckResult& r);
json to_json(const BerryProfile& p);
json to_json(const DiracVerdict& v);
json to_json(const ConvergenceRecord& r);
json to_json(const Tolerances& t);

/// Per-step summary arrays (no state vectors).
json to_json(const TrajectoryRecord& r);

/// One JSON object per line with keys time, mu, theta, phi, action,
/// fidelity, phase_residual.
std::string trajectory_jsonl(const TrajectoryRecord& r);
std::string trajectory_csv(const TrajectoryRecord& r);

std::string_view to_string(KernelMode mode);
std::string_view to_string(Chart chart);

}  // namespace coherent::io
