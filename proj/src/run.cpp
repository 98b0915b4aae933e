#include "coherent/run.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "coherent/errors.hpp"

namespace coherent {

namespace {

using io::json;

constexpr std::pair<std::string_view, double Tolerances::*> kToleranceFields[] = {
    {"hermiticity", &Tolerances::hermiticity},
    {"closure_failure", &Tolerances::closure_failure},
    {"jacobi", &Tolerances::jacobi},
    {"unitarity", &Tolerances::unitarity},
    {"projection_residual", &Tolerances::projection_residual},
    {"weight_sum", &Tolerances::weight_sum},
    {"normalization", &Tolerances::normalization},
    {"moment_imaginary", &Tolerances::moment_imaginary},
    {"rank_relative", &Tolerances::rank_relative},
    {"rank_guard", &Tolerances::rank_guard},
    {"containment", &Tolerances::containment},
    {"canonical_perp_sq", &Tolerances::canonical_perp_sq},
    {"chart_exclusion", &Tolerances::chart_exclusion},
    {"degenerate_moment", &Tolerances::degenerate_moment},
    {"berry_imaginary", &Tolerances::berry_imaginary},
    {"max_section_jump", &Tolerances::max_section_jump},
    {"fd_step", &Tolerances::fd_step},
    {"berry_fit", &Tolerances::berry_fit},
    {"dirac_gap", &Tolerances::dirac_gap},
    {"kernel_overlap_floor", &Tolerances::kernel_overlap_floor},
};

constexpr std::string_view kTopLevelKeys[] = {
    "command", "rep",           "fiducial",   "schedule", "t_final", "dt",          "initial_tilt",
    "chart",   "quadrature",    "slice_counts", "kernel_mode", "g_initial", "g_final", "theta_points",
    "tolerances",
};

[[noreturn]] void parse_fail(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "parse_config", "key \"" + key + "\": " + msg);
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) parse_fail(key, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) parse_fail(key, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) parse_fail(key, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_number_array(const json& j, const std::string& key) {
  if (!j.is_array()) parse_fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(get_number(v, key));
  return out;
}

void check_object_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& key) {
  if (!j.is_object()) parse_fail(key, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) parse_fail(key + "." + item.key(), "unknown key");
  }
}

std::string fmt(double x, int precision = 12) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

std::string fmt_vector(const RealVector& v) {
  std::string s = "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v(k));
  return s + ")";
}

struct Loaded {
  LieAlgebraRep rep;
  FiducialVector psi;
  std::vector<std::string> warnings;
};

Loaded load_inputs(const RunConfig& c) {
  const Tolerances& tol = c.tolerances;
  if (c.fiducial_file) {
    auto path = *c.fiducial_file;
    if (path.is_relative()) path = c.base_dir / path;
    auto f = io::load_fiducial_file(path, tol);
    return Loaded{std::move(f.rep), std::move(f.psi), std::move(f.warnings)};
  }
  LieAlgebraRep rep = io::rep_from_json(*c.rep_json, c.base_dir, tol);
  if (c.fiducial_amplitudes) {
    FiducialVector psi = FiducialVector::make(rep, io::vector_from_json(*c.fiducial_amplitudes, "fiducial.amplitudes"), tol);
    return Loaded{std::move(rep), std::move(psi), {}};
  }
  if (c.fiducial_preset == "matsumoto") {
    FiducialVector psi = matsumoto_fiducial(rep);
    return Loaded{std::move(rep), std::move(psi), {}};
  }
  FiducialVector psi = highest_weight_fiducial(rep);
  return Loaded{std::move(rep), std::move(psi), {}};
}

HamiltonianSchedule load_schedule(const RunConfig& c, const LieAlgebraRep& rep) {
  if (c.schedule_inline) return io::parse_schedule_json(*c.schedule_inline, rep.algebra_dim());
  auto path = *c.schedule_file;
  if (path.is_relative()) path = c.base_dir / path;
  return io::load_schedule_file(path, rep.algebra_dim());
}

GroupElement element_from(const LieAlgebraRep& rep, const std::optional<std::vector<double>>& theta) {
  if (!theta) return GroupElement::identity(rep);
  if (static_cast<int>(theta->size()) != rep.algebra_dim()) {
    throw Error(ErrorCode::ValidationError, "run",
                "group-element parameters need " + std::to_string(rep.algebra_dim()) + " entries");
  }
  return exp_element(rep, Eigen::Map<const RealVector>(theta->data(), static_cast<Eigen::Index>(theta->size())));
}

json rep_summary(const LieAlgebraRep& rep) {
  json out{{"label", rep.label()}, {"algebra_dim", rep.algebra_dim()}, {"rep_dim", rep.rep_dim()}};
  out["spin"] = rep.spin() ? json(rep.spin()->to_string()) : json(nullptr);
  return out;
}

// --- commands ---------------------------------------------------------------

void run_analyze(const RunConfig& c, const Loaded& in, Report& r) {
  const IsotropyReport iso = classify_informative(in.rep, in.psi, c.tolerances);
  r.document["result"] = io::to_json(iso);
  std::ostringstream os;
  os << "mu = " << fmt_vector(iso.mu.mu) << "\n"
     << "dim Lie(H_|0>) = " << iso.subalg_state.dim() << ", dim Lie(H_0) = " << iso.subalg_moment.dim() << "\n"
     << "informative: " << (iso.informative ? "yes" : "no") << "\n";
  r.summary += os.str();
  r.csv = "key,value\nmu," + fmt_vector(iso.mu.mu) + "\nstate_isotropy_dim," + std::to_string(iso.subalg_state.dim()) +
          "\nmoment_isotropy_dim," + std::to_string(iso.subalg_moment.dim()) + "\ninformative," +
          (iso.informative ? "true" : "false") + "\n";
}

void run_evolve(const RunConfig& c, const Loaded& in, Report& r) {
  const Tolerances& tol = c.tolerances;
  const HamiltonianSchedule schedule = load_schedule(c, in.rep);
  const Canonicalization canon = canonicalize(in.rep, in.psi, tol);
  bool informative = false;
  json verdict;
  try {
    const IsotropyReport iso = classify_informative(in.rep, canon.canonical, tol);
    informative = iso.informative;
    verdict = iso.informative;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankAmbiguous) throw;
    verdict = "ambiguous";
  }
  VanHoveOptions opts;
  opts.t_final = c.t_final;
  opts.dt = c.dt;
  opts.tilt_theta = c.tilt_theta;
  opts.tilt_phi = c.tilt_phi;
  opts.chart = SectionChart{c.chart, tol.chart_exclusion};
  const TrajectoryRecord rec = van_hove_check(in.rep, canon.canonical, schedule, opts, tol);

  json result;
  result["informative"] = verdict;
  result["canonical_fiducial"] = io::to_json(canon.canonical.amplitudes());
  result["moment_norm"] = canon.moment_norm;
  result["trajectory"] = io::to_json(rec);
  r.document["result"] = std::move(result);
  r.files.emplace_back("trajectory.jsonl", io::trajectory_jsonl(rec));
  r.files.emplace_back("trajectory.csv", io::trajectory_csv(rec));
  r.csv = io::trajectory_csv(rec);

  std::ostringstream os;
  os << "steps: " << rec.times.size() << ", t_final = " << fmt(rec.times.back()) << "\n"
     << "informative: " << (verdict.is_string() ? "ambiguous" : (informative ? "yes" : "no")) << "\n"
     << "max fidelity deficit: " << fmt(rec.max_fidelity_deficit(), 6) << "\n"
     << "max |phase residual|: " << fmt(rec.max_abs_phase_residual(), 6) << "\n"
     << "final action S: " << fmt(rec.action.back()) << "\n";
  r.summary += os.str();
}

void run_identity(const RunConfig& c, const Loaded& in, Report& r) {
  const QuadratureOrders orders = c.quadrature.value_or(exactness_threshold(in.rep));
  const HaarQuadrature quad = haar_quadrature(in.rep, orders);
  const IdentityCheckResult res = identity_resolution(in.rep, in.psi, quad);
  r.document["result"] = io::to_json(res);
  std::ostringstream os;
  os << "orders (" << orders.n_beta << ", " << orders.n_alpha << ", " << orders.n_gamma << "), "
     << quad.nodes.size() << " nodes\n"
     << "constant c = " << fmt(res.constant) << " (1/d = " << fmt(1.0 / in.rep.rep_dim()) << ")\n"
     << "deviation |B - cI|_max = " << fmt(res.deviation, 6) << "\n";
  for (const auto& w : res.warnings) os << "warning: " << w << "\n";
  r.summary += os.str();
  r.csv = "constant,deviation,orders_exact\n" + fmt(res.constant, 17) + "," + fmt(res.deviation, 17) + "," +
          (res.orders_exact ? "true" : "false") + "\n";
}

void run_berry(const RunConfig& c, const Loaded& in, Report& r) {
  const Tolerances& tol = c.tolerances;
  const Canonicalization canon = canonicalize(in.rep, in.psi, tol);
  const BerryProfile profile = berry_connection(in.rep, canon.canonical, default_theta_grid(c.theta_points), tol);
  const DiracVerdict verdict = dirac_check(in.rep, in.psi, tol);
  r.document["result"] = json{{"profile", io::to_json(profile)}, {"dirac", io::to_json(verdict)}};
  std::ostringstream os;
  os << "Berry coefficient c = " << fmt(profile.coefficient) << " (fit residual " << fmt(profile.fit_residual, 3)
     << ")\n"
     << "nearest half-integer " << fmt(verdict.nearest_admissible) << ", gap " << fmt(verdict.gap, 6) << "\n"
     << "Dirac string invisible: " << (verdict.admissible ? "yes" : "no") << "\n";
  r.summary += os.str();
  std::ostringstream csv;
  csv << std::setprecision(17) << "theta,a_phi\n";
  for (std::size_t k = 0; k < profile.theta_grid.size(); ++k) {
    csv << profile.theta_grid[k] << ',' << profile.a_phi[k] << '\n';
  }
  r.csv = csv.str();
}

void run_pathint(const RunConfig& c, const Loaded& in, Report& r) {
  const HamiltonianSchedule schedule = load_schedule(c, in.rep);
  const QuadratureOrders orders = c.quadrature.value_or(exactness_threshold(in.rep));
  const HaarQuadrature quad = haar_quadrature(in.rep, orders);
  const GroupElement gi = element_from(in.rep, c.g_initial);
  const GroupElement gf = element_from(in.rep, c.g_final);
  const ConvergenceRecord rec =
      discrete_propagator(in.rep, in.psi, schedule, gi, gf, c.slice_counts, quad, c.kernel_mode, c.tolerances);
  r.document["result"] = io::to_json(rec);

  std::ostringstream os;
  os << "kernel: " << io::to_string(rec.kernel_mode) << ", T = " << fmt(rec.total_time) << ", " << rec.grid_size
     << " quadrature points\n"
     << "exact amplitude: " << fmt(std::abs(rec.exact_amplitude)) << " at arg " << fmt(std::arg(rec.exact_amplitude))
     << "\n"
     << std::setw(8) << "N" << std::setw(22) << "|A_N|" << std::setw(22) << "arg A_N" << std::setw(16) << "error"
     << "\n";
  std::ostringstream csv;
  csv << std::setprecision(17) << "N,abs,arg,error\n";
  for (std::size_t k = 0; k < rec.slice_counts.size(); ++k) {
    const Complex a = rec.amplitudes[k];
    os << std::setw(8) << rec.slice_counts[k] << std::setw(22) << fmt(std::abs(a), 15) << std::setw(22)
       << fmt(std::arg(a), 15) << std::setw(16) << fmt(rec.errors[k], 4) << "\n";
    csv << rec.slice_counts[k] << ',' << std::abs(a) << ',' << std::arg(a) << ',' << rec.errors[k] << '\n';
  }
  r.summary += os.str();
  r.csv = csv.str();
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Analyze: return "analyze";
    case Command::Evolve: return "evolve";
    case Command::Identity: return "identity";
    case Command::Berry: return "berry";
    case Command::Pathint: return "pathint";
  }
  return "analyze";
}

std::optional<Command> command_from_string(std::string_view s) {
  for (Command c : {Command::Analyze, Command::Evolve, Command::Identity, Command::Berry, Command::Pathint}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

int exit_code_for(const Error& e) { return is_domain_error(e.code()) ? 2 : 1; }

RunConfig parse_config(const std::filesystem::path& path) {
  return parse_config_json(io::read_json_file(path), path.parent_path());
}

RunConfig parse_config_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "parse_config", "config must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto k : kTopLevelKeys) known = known || item.key() == k;
    if (!known) parse_fail(item.key(), "unknown key");
  }

  RunConfig c;
  c.base_dir = base_dir;
  c.echo = j;
  std::vector<std::string> problems;

  if (j.contains("command")) {
    const auto name = get_string(j["command"], "command");
    const auto cmd = command_from_string(name);
    if (!cmd) parse_fail("command", "unknown command \"" + name + "\"");
    c.command = *cmd;
  }

  if (j.contains("rep")) {
    const json& rep = j["rep"];
    if (rep.is_object()) check_object_keys(rep, {"spin"}, "rep");
    else if (!rep.is_string()) parse_fail("rep", "expected {\"spin\": ...} or a generator-file path");
    c.rep_json = rep;
  }

  if (!j.contains("fiducial")) {
    problems.push_back("\"fiducial\" is required");
  } else {
    const json& f = j["fiducial"];
    check_object_keys(f, {"preset", "amplitudes", "file"}, "fiducial");
    if (f.size() != 1) problems.push_back("\"fiducial\" needs exactly one of preset, amplitudes, file");
    if (f.contains("preset")) {
      c.fiducial_preset = get_string(f["preset"], "fiducial.preset");
      if (c.fiducial_preset != "matsumoto" && c.fiducial_preset != "highest-weight") {
        problems.push_back("fiducial.preset must be \"matsumoto\" or \"highest-weight\"");
      }
    }
    if (f.contains("amplitudes")) {
      io::vector_from_json(f["amplitudes"], "fiducial.amplitudes");
      c.fiducial_amplitudes = f["amplitudes"];
    }
    if (f.contains("file")) c.fiducial_file = get_string(f["file"], "fiducial.file");
  }
  if (c.fiducial_file && c.rep_json) problems.push_back("\"rep\" must be omitted when the fiducial comes from a file");
  if (!c.fiducial_file && !c.rep_json) problems.push_back("\"rep\" is required");

  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    if (s.is_string()) c.schedule_file = s.get<std::string>();
    else if (s.is_array()) c.schedule_inline = s;
    else parse_fail("schedule", "expected a file path or an array of segments");
  }
  if (j.contains("t_final")) {
    c.t_final = get_number(j["t_final"], "t_final");
    if (!(*c.t_final > 0.0)) problems.push_back("t_final must be positive");
  }
  if (j.contains("dt")) {
    c.dt = get_number(j["dt"], "dt");
    if (!(c.dt > 0.0)) problems.push_back("dt must be positive");
  }
  if (j.contains("initial_tilt")) {
    const json& t = j["initial_tilt"];
    check_object_keys(t, {"theta", "phi"}, "initial_tilt");
    if (t.contains("theta")) c.tilt_theta = get_number(t["theta"], "initial_tilt.theta");
    if (t.contains("phi")) c.tilt_phi = get_number(t["phi"], "initial_tilt.phi");
  }
  if (j.contains("chart")) {
    const auto name = get_string(j["chart"], "chart");
    if (name == "north") c.chart = Chart::North;
    else if (name == "south") c.chart = Chart::South;
    else problems.push_back("chart must be \"north\" or \"south\"");
  }
  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    if (!q.is_array() || q.size() != 3) parse_fail("quadrature", "expected [n_beta, n_alpha, n_gamma]");
    c.quadrature = QuadratureOrders{get_int(q[0], "quadrature"), get_int(q[1], "quadrature"), get_int(q[2], "quadrature")};
    if (c.quadrature->n_beta < 1 || c.quadrature->n_alpha < 1 || c.quadrature->n_gamma < 1) {
      problems.push_back("quadrature orders must be >= 1");
    }
  }
  if (j.contains("slice_counts")) {
    const json& s = j["slice_counts"];
    if (!s.is_array() || s.empty()) parse_fail("slice_counts", "expected a non-empty array of integers");
    c.slice_counts.clear();
    for (const auto& n : s) c.slice_counts.push_back(get_int(n, "slice_counts"));
    for (int n : c.slice_counts) {
      if (n < 1) {
        problems.push_back("slice_counts entries must be >= 1");
        break;
      }
    }
  }
  if (j.contains("kernel_mode")) {
    const auto name = get_string(j["kernel_mode"], "kernel_mode");
    if (name == "exact") c.kernel_mode = KernelMode::Exact;
    else if (name == "first-order") c.kernel_mode = KernelMode::FirstOrder;
    else problems.push_back("kernel_mode must be \"exact\" or \"first-order\"");
  }
  if (j.contains("g_initial")) c.g_initial = get_number_array(j["g_initial"], "g_initial");
  if (j.contains("g_final")) c.g_final = get_number_array(j["g_final"], "g_final");
  if (j.contains("theta_points")) {
    c.theta_points = get_int(j["theta_points"], "theta_points");
    if (c.theta_points < 2) problems.push_back("theta_points must be >= 2");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) parse_fail("tolerances", "expected an object");
    for (const auto& item : t.items()) {
      bool known = false;
      for (const auto& [name, member] : kToleranceFields) {
        if (item.key() == name) {
          known = true;
          c.tolerances.*member = get_number(item.value(), "tolerances." + item.key());
          if (!(c.tolerances.*member > 0.0)) problems.push_back("tolerances." + item.key() + " must be positive");
        }
      }
      if (!known) parse_fail("tolerances." + item.key(), "unknown key");
    }
  }

  // Referenced files must exist.
  auto check_file = [&](const std::filesystem::path& p, const std::string& what) {
    const auto full = p.is_relative() ? base_dir / p : p;
    if (!std::filesystem::exists(full)) problems.push_back(what + " file not found: " + full.string());
  };
  if (c.fiducial_file) check_file(*c.fiducial_file, "fiducial");
  if (c.schedule_file) check_file(*c.schedule_file, "schedule");
  if (c.rep_json && c.rep_json->is_string()) check_file(c.rep_json->get<std::string>(), "generator");

  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw Error(ErrorCode::ValidationError, "parse_config", msg);
  }
  return c;
}

Report run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  r.document = json{{"tool", "cohstate"},
                    {"version", COHERENT_VERSION},
                    {"command", to_string(config.command)},
                    {"config", config.echo},
                    {"tolerances", io::to_json(config.tolerances)}};

  std::vector<std::string> problems;
  if ((config.command == Command::Evolve || config.command == Command::Pathint) && !config.schedule_file &&
      !config.schedule_inline) {
    problems.push_back(std::string(to_string(config.command)) + " needs a \"schedule\"");
  }
  try {
    if (!problems.empty()) throw Error(ErrorCode::ValidationError, "run", problems.front());
    const Loaded in = load_inputs(config);
    r.document["rep"] = rep_summary(in.rep);
    r.document["fiducial"] = io::to_json(in.psi.amplitudes());
    r.summary = "cohstate " + std::string(to_string(config.command)) + " on " + in.rep.label() + "\n";
    for (const auto& w : in.warnings) r.summary += "warning: " + w + "\n";
    r.document["warnings"] = in.warnings;
    switch (config.command) {
      case Command::Analyze: run_analyze(config, in, r); break;
      case Command::Evolve: run_evolve(config, in, r); break;
      case Command::Identity: run_identity(config, in, r); break;
      case Command::Berry: run_berry(config, in, r); break;
      case Command::Pathint: run_pathint(config, in, r); break;
    }
    r.document["status"] = "ok";
  } catch (const Error& e) {
    r.exit_code = exit_code_for(e);
    r.document["status"] = "error";
    r.document["error"] = json{{"code", to_string(e.code())}, {"operation", e.operation()}, {"message", e.detail()}};
    r.summary += "error: " + std::string(e.what()) + "\n";
    r.csv = "status,code,operation\nerror," + std::string(to_string(e.code())) + "," + e.operation() + "\n";
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace coherent
