#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coherent/errors.hpp"
#include "coherent/io.hpp"
#include "coherent/tolerances.hpp"

namespace coherent {

enum class Command { Analyze, Evolve, Identity, Berry, Pathint };

std::string_view to_string(Command c);
std::optional<Command> command_from_string(std::string_view s);

struct RunConfig {
  Command command = Command::Analyze;

  // Exactly one of rep_json / fiducial_file provides the representation.
  std::optional<io::json> rep_json;
  std::string fiducial_preset;  // "matsumoto" | "highest-weight"
  std::optional<io::json> fiducial_amplitudes;
  std::optional<std::filesystem::path> fiducial_file;

  std::optional<io::json> schedule_inline;
  std::optional<std::filesystem::path> schedule_file;
  std::optional<double> t_final;
  double dt = 1e-3;
  double tilt_theta = 0.0;
  double tilt_phi = 0.0;
  Chart chart = Chart::North;

  std::optional<QuadratureOrders> quadrature;
  std::vector<int> slice_counts{1, 2, 4, 8};
  KernelMode kernel_mode = KernelMode::Exact;
  std::optional<std::vector<double>> g_initial;
  std::optional<std::vector<double>> g_final;

  int theta_points = 33;

  Tolerances tolerances;
  std::filesystem::path base_dir;  // relative paths resolve against this
  io::json echo;                   // the validated config, as read
};

/// Reads and validates a JSON run config. Unknown keys and type errors raise
/// PARSE_ERROR; every violated constraint is listed in one VALIDATION_ERROR.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_json(const io::json& j, const std::filesystem::path& base_dir);

struct Report {
  io::json document;                // deterministic for a fixed config
  std::string summary;              // human-readable
  std::string csv;                  // --format csv rendering
  std::vector<std::pair<std::string, std::string>> files;  // extra outputs (name, contents)
  double wall_time = 0.0;           // seconds; kept out of `document`
  int exit_code = 0;
};

/// Dispatches the configured command. Library errors are caught and turned
/// into an error report with exit code 2 (domain) or 1 (usage).
Report run(const RunConfig& config);

/// 2 for numerical-domain errors, 1 otherwise.
int exit_code_for(const Error& e);

}  // namespace coherent
