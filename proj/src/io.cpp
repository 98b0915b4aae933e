#include "coherent/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "coherent/errors.hpp"

namespace coherent::io {

namespace {

[[noreturn]] void parse_fail(const std::string& op, const std::string& msg) {
  throw Error(ErrorCode::ParseError, op, msg);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) parse_fail(where, "expected a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) parse_fail(where, "unknown key \"" + item.key() + "\"");
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) parse_fail("json", "\"" + what + "\" must be a number");
  return j.get<double>();
}

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    const auto colon = what.rfind(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    parse_fail(source, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail(path.string(), "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(to_json(v(k)));
  return out;
}

json to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

Complex complex_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    parse_fail("json", what + ": expected a complex entry [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) parse_fail("json", what + ": expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k], what + "[" + std::to_string(k) + "]");
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) parse_fail("json", what + ": expected an array of rows");
  const std::size_t rows = j.size();
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[r], what + "[" + std::to_string(r) + "]");
    if (r == 0) m.resize(static_cast<Eigen::Index>(rows), row.size());
    if (row.size() != m.cols()) parse_fail("json", what + ": ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Generator files

LieAlgebraRep parse_generator_json(const json& j, const Tolerances& tol) {
  const std::string where = "generator file";
  check_keys(j, {"label", "dimension", "generators"}, where);
  if (!j.contains("generators")) parse_fail(where, "missing \"generators\"");
  const json& gens = j.at("generators");
  if (!gens.is_array() || gens.empty()) parse_fail(where, "\"generators\" must be a non-empty array");
  std::vector<Matrix> mats;
  for (std::size_t a = 0; a < gens.size(); ++a) {
    mats.push_back(matrix_from_json(gens[a], "generators[" + std::to_string(a) + "]"));
  }
  if (j.contains("dimension")) {
    if (!j["dimension"].is_number_integer()) parse_fail(where, "\"dimension\" must be an integer");
    const auto d = j["dimension"].get<long>();
    for (const auto& m : mats) {
      if (m.rows() != d || m.cols() != d) {
        throw Error(ErrorCode::ValidationError, where,
                    "generator shape does not match \"dimension\" = " + std::to_string(d));
      }
    }
  }
  std::string label = "user-algebra";
  if (j.contains("label")) {
    if (!j["label"].is_string()) parse_fail(where, "\"label\" must be a string");
    label = j["label"].get<std::string>();
  }
  return validate_algebra(std::move(mats), std::move(label), tol);
}

LieAlgebraRep load_generator_file(const std::filesystem::path& path, const Tolerances& tol) {
  return parse_generator_json(read_json_file(path), tol);
}

json generator_json(const LieAlgebraRep& rep) {
  json gens = json::array();
  for (const auto& g : rep.generators()) gens.push_back(to_json(g));
  return json{{"label", rep.label()}, {"dimension", rep.rep_dim()}, {"generators", std::move(gens)}};
}

LieAlgebraRep rep_from_json(const json& j, const std::filesystem::path& base_dir, const Tolerances& tol) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return load_generator_file(p, tol);
  }
  check_keys(j, {"spin"}, "rep");
  if (!j.contains("spin")) parse_fail("rep", "expected {\"spin\": ...} or a generator-file path");
  const json& s = j["spin"];
  if (s.is_string()) return build_spin_rep(Spin::parse(s.get<std::string>()));
  if (s.is_number()) return build_spin_rep(Spin::from_double(s.get<double>()));
  parse_fail("rep", "\"spin\" must be a string such as \"3/2\" or a number");
}

// ---------------------------------------------------------------------------
// Fiducial files

LoadedFiducial parse_fiducial_json(const json& j, const std::filesystem::path& base_dir, const Tolerances& tol) {
  const std::string where = "fiducial file";
  check_keys(j, {"rep", "amplitudes"}, where);
  if (!j.contains("rep")) parse_fail(where, "missing \"rep\"");
  if (!j.contains("amplitudes")) parse_fail(where, "missing \"amplitudes\"");
  LieAlgebraRep rep = rep_from_json(j["rep"], base_dir, tol);
  double deviation = 0.0;
  FiducialVector psi = FiducialVector::normalized(rep, vector_from_json(j["amplitudes"], "amplitudes"), &deviation);
  LoadedFiducial out{std::move(rep), std::move(psi), deviation, {}};
  if (deviation > tol.normalization) {
    out.warnings.push_back("amplitudes renormalized; norm deviated from 1 by " + format_double(deviation));
  }
  return out;
}

LoadedFiducial load_fiducial_file(const std::filesystem::path& path, const Tolerances& tol) {
  return parse_fiducial_json(read_json_file(path), path.parent_path(), tol);
}

// ---------------------------------------------------------------------------
// Schedules

HamiltonianSchedule parse_schedule_json(const json& j, int algebra_dim) {
  const std::string where = "schedule";
  if (!j.is_array() || j.empty()) parse_fail(where, "expected a non-empty array of {\"until\", \"h\"} segments");
  std::vector<double> breakpoints{0.0};
  std::vector<RealVector> coefficients;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string seg = where + "[" + std::to_string(k) + "]";
    check_keys(j[k], {"until", "h"}, seg);
    if (!j[k].contains("until") || !j[k].contains("h")) parse_fail(seg, "needs \"until\" and \"h\"");
    const double until = number(j[k]["until"], seg + ".until");
    const json& h = j[k]["h"];
    if (!h.is_array()) parse_fail(seg, "\"h\" must be an array");
    if (static_cast<int>(h.size()) != algebra_dim) {
      throw Error(ErrorCode::ValidationError, seg,
                  "\"h\" has " + std::to_string(h.size()) + " entries, algebra has " + std::to_string(algebra_dim));
    }
    RealVector coeff(algebra_dim);
    for (int a = 0; a < algebra_dim; ++a) coeff(a) = number(h[static_cast<std::size_t>(a)], seg + ".h");
    if (!(until > breakpoints.back())) {
      throw Error(ErrorCode::ValidationError, seg, "\"until\" values must be positive and strictly increasing");
    }
    breakpoints.push_back(until);
    coefficients.push_back(std::move(coeff));
  }
  return HamiltonianSchedule::make(std::move(breakpoints), std::move(coefficients));
}

HamiltonianSchedule load_schedule_file(const std::filesystem::path& path, int algebra_dim) {
  return parse_schedule_json(read_json_file(path), algebra_dim);
}

json schedule_json(const HamiltonianSchedule& schedule) {
  json out = json::array();
  for (int k = 0; k < schedule.segments(); ++k) {
    out.push_back({{"until", schedule.breakpoints()[static_cast<std::size_t>(k) + 1]},
                   {"h", to_json(schedule.coefficients()[static_cast<std::size_t>(k)])}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Results

std::string_view to_string(KernelMode mode) { return mode == KernelMode::Exact ? "exact" : "first-order"; }
std::string_view to_string(Chart chart) { return chart == Chart::North ? "north" : "south"; }

json to_json(const IsotropySubalgebra& s) {
  json basis = json::array();
  for (const auto& v : s.basis) basis.push_back(to_json(v));
  return json{{"dim", s.dim()},
              {"basis", std::move(basis)},
              {"singular_values", to_json(s.singular_values)},
              {"threshold", s.threshold}};
}

json to_json(const IsotropyReport& r) {
  return json{{"mu", to_json(r.mu.mu)},
              {"state_isotropy", to_json(r.subalg_state)},
              {"moment_isotropy", to_json(r.subalg_moment)},
              {"dims", json::array({r.subalg_state.dim(), r.subalg_moment.dim()})},
              {"containment_ok", r.containment_ok},
              {"informative", r.informative}};
}

json to_json(const IdentityCheckResult& r) {
  return json{{"orders", json::array({r.orders.n_beta, r.orders.n_alpha, r.orders.n_gamma})},
              {"orders_exact", r.orders_exact},
              {"constant", r.constant},
              {"deviation", r.deviation},
              {"operator", to_json(r.b)},
              {"warnings", r.warnings}};
}

json to_json(const BerryProfile& p) {
  return json{{"theta_grid", p.theta_grid},
              {"a_phi", p.a_phi},
              {"coefficient", p.coefficient},
              {"fit_residual", p.fit_residual}};
}

json to_json(const DiracVerdict& v) {
  return json{{"coefficient", v.coefficient},
              {"nearest_admissible", v.nearest_admissible},
              {"gap", v.gap},
              {"admissible", v.admissible}};
}

json to_json(const ConvergenceRecord& r) {
  json amps = json::array();
  for (const auto& a : r.amplitudes) amps.push_back(to_json(a));
  return json{{"kernel_mode", to_string(r.kernel_mode)},
              {"total_time", r.total_time},
              {"grid_size", r.grid_size},
              {"slice_counts", r.slice_counts},
              {"amplitudes", std::move(amps)},
              {"exact_amplitude", to_json(r.exact_amplitude)},
              {"errors", r.errors}};
}

json to_json(const Tolerances& t) {
  return json{{"hermiticity", t.hermiticity},
              {"closure_failure", t.closure_failure},
              {"jacobi", t.jacobi},
              {"unitarity", t.unitarity},
              {"projection_residual", t.projection_residual},
              {"weight_sum", t.weight_sum},
              {"normalization", t.normalization},
              {"moment_imaginary", t.moment_imaginary},
              {"rank_relative", t.rank_relative},
              {"rank_guard", t.rank_guard},
              {"containment", t.containment},
              {"canonical_perp_sq", t.canonical_perp_sq},
              {"chart_exclusion", t.chart_exclusion},
              {"degenerate_moment", t.degenerate_moment},
              {"berry_imaginary", t.berry_imaginary},
              {"max_section_jump", t.max_section_jump},
              {"fd_step", t.fd_step},
              {"berry_fit", t.berry_fit},
              {"dirac_gap", t.dirac_gap},
              {"kernel_overlap_floor", t.kernel_overlap_floor}};
}

json to_json(const TrajectoryRecord& r) {
  json mu = json::array();
  for (const auto& m : r.mu) mu.push_back(to_json(m));
  return json{{"chart", to_string(r.chart)},
              {"steps", r.times.size()},
              {"max_fidelity_deficit", r.max_fidelity_deficit()},
              {"max_abs_phase_residual", r.max_abs_phase_residual()},
              {"final_action", r.action.empty() ? 0.0 : r.action.back()},
              {"time", r.times},
              {"mu", std::move(mu)},
              {"theta", r.theta},
              {"phi", r.phi},
              {"action", r.action},
              {"fidelity", r.fidelity},
              {"phase_residual", r.phase_residual}};
}

std::string trajectory_jsonl(const TrajectoryRecord& r) {
  std::string out;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    json line{{"time", r.times[k]},
              {"mu", to_json(r.mu[k])},
              {"theta", r.theta[k]},
              {"phi", r.phi[k]},
              {"action", r.action[k]},
              {"fidelity", r.fidelity[k]},
              {"phase_residual", r.phase_residual[k]}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string trajectory_csv(const TrajectoryRecord& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto n = r.mu.empty() ? 0 : r.mu.front().size();
  os << "time";
  for (Eigen::Index a = 0; a < n; ++a) os << ",mu" << (a + 1);
  os << ",theta,phi,action,fidelity,phase_residual\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    os << r.times[k];
    for (Eigen::Index a = 0; a < n; ++a) os << ',' << r.mu[k](a);
    os << ',' << r.theta[k] << ',' << r.phi[k] << ',' << r.action[k] << ',' << r.fidelity[k] << ','
       << r.phase_residual[k] << '\n';
  }
  return os.str();
}

}  // namespace coherent::io
