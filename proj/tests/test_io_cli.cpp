#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "coherent/errors.hpp"
#include "coherent/io.hpp"
#include "coherent/run.hpp"
#include "oracles.hpp"

using namespace coherent;
using io::json;
namespace fs = std::filesystem;

namespace {

template <typename F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected an Error";
  return Error(ErrorCode::InvalidArgument, "none", "none");
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / "coherent_io" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string(COHSTATE_PATH) + " " + args + " > " + stdout_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Json, SyntaxErrorsCarryLineAndColumn) {
  const Error e = error_of([] { io::parse_json_text("{\n  \"a\": 1,\n  oops\n}", "cfg.json"); });
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(e.detail().find("line 3"), std::string::npos) << e.detail();
}

TEST(Json, GeneratorFileRoundTrip) {
  const LieAlgebraRep rep = build_spin_rep(Spin::from_twice(3));
  const LieAlgebraRep back = io::parse_generator_json(io::generator_json(rep));
  EXPECT_EQ(back.label(), rep.label());
  ASSERT_EQ(back.algebra_dim(), 3);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(back.generator(a), rep.generator(a));
  ASSERT_TRUE(back.spin().has_value());
  EXPECT_EQ(back.spin()->twice(), 3);
}

TEST(Json, GeneratorFileStrictness) {
  json j = io::generator_json(build_spin_rep(Spin::from_twice(1)));
  j["colour"] = "red";
  EXPECT_EQ(error_of([&] { io::parse_generator_json(j); }).code(), ErrorCode::ParseError);
  j.erase("colour");
  j["dimension"] = 3;
  EXPECT_EQ(error_of([&] { io::parse_generator_json(j); }).code(), ErrorCode::ValidationError);
}

TEST(Json, Su3GeneratorFileValidates) {
  json gens = json::array();
  for (const auto& m : oracle::su3_generators()) gens.push_back(io::to_json(Matrix(m)));
  const json j{{"label", "su3-fundamental"}, {"dimension", 3}, {"generators", gens}};
  const LieAlgebraRep rep = io::parse_generator_json(j);
  EXPECT_EQ(rep.algebra_dim(), 8);
  EXPECT_FALSE(rep.is_su2());
}

TEST(Json, FiducialFileWarnsOnRenormalization) {
  const fs::path dir = scratch("fiducial");
  write(dir / "psi.json", R"({"rep": {"spin": "1/2"}, "amplitudes": [[0.6, 0], [0, 0.9]]})");
  const io::LoadedFiducial f = io::load_fiducial_file(dir / "psi.json");
  EXPECT_EQ(f.rep.rep_dim(), 2);
  EXPECT_NEAR(f.psi.amplitudes().norm(), 1.0, 1e-15);
  ASSERT_EQ(f.warnings.size(), 1u);
  write(dir / "psi2.json", R"({"rep": {"spin": 1}, "amplitudes": [[1, 0], [0, 0], [0, 0]]})");
  EXPECT_TRUE(io::load_fiducial_file(dir / "psi2.json").warnings.empty());
}

TEST(Json, ScheduleParsing) {
  const HamiltonianSchedule s = io::parse_schedule_json(json::parse(R"([{"until": 1, "h": [0, 0, 1]}, {"until": 2.5, "h": [1, 0, 0]}])"), 3);
  EXPECT_EQ(s.segments(), 2);
  EXPECT_EQ(s.end(), 2.5);
  EXPECT_EQ(error_of([] { io::parse_schedule_json(json::parse(R"([{"until": 1, "h": [0, 1]}])"), 3); }).code(),
            ErrorCode::ValidationError);
  EXPECT_EQ(error_of([] { io::parse_schedule_json(json::parse(R"([{"until": 1, "h": [0, 0, 1]}, {"until": 0.5, "h": [0, 0, 1]}])"), 3); }).code(),
            ErrorCode::ValidationError);
  EXPECT_EQ(error_of([] { io::parse_schedule_json(json::parse(R"([{"until": 1, "hh": [0, 0, 1]}])"), 3); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(io::schedule_json(s), json::parse(R"([{"until": 1.0, "h": [0.0, 0.0, 1.0]}, {"until": 2.5, "h": [1.0, 0.0, 0.0]}])"));
}

TEST(Config, UnknownKeyIsNamed) {
  const Error e = error_of([] {
    parse_config_json(json::parse(R"({"rep": {"spin": "1"}, "fidutial": {"preset": "matsumoto"}})"), ".");
  });
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(e.detail().find("fidutial"), std::string::npos);
}

TEST(Config, EveryViolationIsListed) {
  const Error e = error_of([] {
    parse_config_json(json::parse(R"({"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}, "dt": -0.1, "theta_points": 1})"), ".");
  });
  EXPECT_EQ(e.code(), ErrorCode::ValidationError);
  EXPECT_NE(e.detail().find("dt"), std::string::npos);
  EXPECT_NE(e.detail().find("theta_points"), std::string::npos);
}

TEST(Config, TypeErrorsAndMissingFiles) {
  EXPECT_EQ(error_of([] { parse_config_json(json::parse(R"({"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}, "dt": "small"})"), "."); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([] { parse_config_json(json::parse(R"({"rep": {"spin": "1"}, "fiducial": {"file": "nope.json"}})"), "."); }).code(),
            ErrorCode::ValidationError);
  EXPECT_EQ(error_of([] { parse_config_json(json::parse(R"({"fiducial": {"preset": "matsumoto"}, "tolerances": {"rank": 1}})"), "."); }).code(),
            ErrorCode::ParseError);
}

TEST(Config, ToleranceOverrides) {
  const RunConfig c = parse_config_json(
      json::parse(R"({"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}, "tolerances": {"rank_relative": 1e-7}})"), ".");
  EXPECT_EQ(c.tolerances.rank_relative, 1e-7);
  EXPECT_EQ(c.tolerances.hermiticity, Tolerances{}.hermiticity);
}

TEST(Run, AnalyzeMatsumoto) {
  RunConfig c = parse_config_json(json::parse(R"({"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}})"), ".");
  const Report r = run(c);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.document["status"], "ok");
  EXPECT_EQ(r.document["result"]["informative"], false);
  EXPECT_EQ(r.document["result"]["dims"], json::parse("[0, 1]"));
  const auto& amp = r.document["fiducial"];
  EXPECT_DOUBLE_EQ(amp[0][0].get<double>(), std::sqrt(2.0 / 3.0));
  EXPECT_DOUBLE_EQ(amp[2][0].get<double>(), std::sqrt(1.0 / 3.0));
}

TEST(Run, BerryMatsumoto) {
  RunConfig c = parse_config_json(json::parse(R"({"command": "berry", "rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}})"), ".");
  EXPECT_EQ(c.command, Command::Berry);
  const Report r = run(c);
  EXPECT_NEAR(r.document["result"]["dirac"]["coefficient"].get<double>(), 1.0 / 3.0, 1e-8);
  EXPECT_EQ(r.document["result"]["dirac"]["admissible"], false);
}

TEST(Run, EvolveWithZeroHamiltonian) {
  RunConfig c = parse_config_json(json::parse(R"({"command": "evolve", "rep": {"spin": "3/2"}, "fiducial": {"preset": "highest-weight"},
      "schedule": [{"until": 1, "h": [0, 0, 0]}], "dt": 0.01, "initial_tilt": {"theta": 0.7, "phi": 0.2}})"), ".");
  const Report r = run(c);
  ASSERT_EQ(r.exit_code, 0) << r.summary;
  for (const auto& f : r.document["result"]["trajectory"]["fidelity"]) EXPECT_NEAR(f.get<double>(), 1.0, 1e-14);
  for (const auto& s : r.document["result"]["trajectory"]["action"]) EXPECT_EQ(s.get<double>(), 0.0);
  ASSERT_EQ(r.files.size(), 2u);
  EXPECT_EQ(r.files[0].first, "trajectory.jsonl");
}

TEST(Run, DomainErrorsExitWithTwo) {
  RunConfig c = parse_config_json(json::parse(R"({"command": "evolve", "rep": {"spin": "1"}, "fiducial": {"amplitudes": [[0,0],[1,0],[0,0]]},
      "schedule": [{"until": 1, "h": [0, 0, 1]}]})"), ".");
  const Report r = run(c);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.document["status"], "error");
  EXPECT_EQ(r.document["error"]["code"], "DEGENERATE_ORBIT");
  EXPECT_FALSE(r.document.contains("result"));
}

TEST(Run, MissingScheduleIsUsageError) {
  RunConfig c = parse_config_json(json::parse(R"({"command": "pathint", "rep": {"spin": "1/2"}, "fiducial": {"preset": "highest-weight"}})"), ".");
  const Report r = run(c);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.document["error"]["code"], "VALIDATION_ERROR");
}

TEST(Cli, ExitCodesAndOutputs) {
  const fs::path dir = scratch("cli");
  write(dir / "ok.json", R"({"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}})");
  write(dir / "typo.json", R"({"rep": {"spin": "1"}, "fidutial": {"preset": "matsumoto"}})");
  write(dir / "neg.json", R"({"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}, "dt": -1})");
  write(dir / "chart.json", R"({"rep": {"spin": "1"}, "fiducial": {"preset": "highest-weight"},
      "schedule": [{"until": 3.141592653589793, "h": [1, 0, 0]}], "dt": 0.01})");
  write(dir / "evolve.json", R"({"rep": {"spin": "1/2"}, "fiducial": {"preset": "highest-weight"},
      "schedule": [{"until": 1, "h": [0.2, 0, 1]}], "dt": 0.1, "initial_tilt": {"theta": 0.5}})");
  EXPECT_EQ(run_cli("analyze --config " + (dir / "ok.json").string() + " --out " + (dir / "out").string(), dir / "o1"), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
  EXPECT_NE(slurp(dir / "o1").find("informative: no"), std::string::npos);
  EXPECT_EQ(run_cli("analyze --config " + (dir / "typo.json").string(), dir / "o2"), 1);
  EXPECT_NE(slurp(dir / "o2").find("fidutial"), std::string::npos);
  EXPECT_EQ(run_cli("analyze --config " + (dir / "neg.json").string(), dir / "o3"), 1);
  EXPECT_NE(slurp(dir / "o3").find("VALIDATION_ERROR"), std::string::npos);
  EXPECT_EQ(run_cli("evolve --config " + (dir / "chart.json").string() + " --out " + (dir / "chart").string(), dir / "o4"), 2);
  EXPECT_NE(slurp(dir / "chart" / "report.json").find("CHART_EXIT"), std::string::npos);
  EXPECT_EQ(run_cli("bogus --config " + (dir / "ok.json").string(), dir / "o5"), 1);
  EXPECT_EQ(run_cli("evolve --config " + (dir / "evolve.json").string() + " --out " + (dir / "ev").string() + " --format csv", dir / "o6"), 0);
  const std::string csv = slurp(dir / "o6");
  EXPECT_EQ(csv.rfind("time,mu1,mu2,mu3,theta,phi,action,fidelity,phase_residual\n", 0), 0u) << csv;
  EXPECT_EQ(csv, slurp(dir / "ev" / "trajectory.csv"));
  std::ifstream lines(dir / "ev" / "trajectory.jsonl");
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    EXPECT_TRUE(j.contains("time") && j.contains("mu") && j.contains("phase_residual"));
    ++count;
  }
  EXPECT_EQ(count, 11);
  EXPECT_EQ(run_cli("analyze --config " + (dir / "ok.json").string() + " --format json", dir / "o7"), 0);
  EXPECT_EQ(slurp(dir / "o7"), slurp(dir / "out" / "report.json"));
}

TEST(Cli, ConfigCommandMustAgree) {
  const fs::path dir = scratch("agree");
  write(dir / "c.json", R"({"command": "berry", "rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}})");
  EXPECT_EQ(run_cli("analyze --config " + (dir / "c.json").string(), dir / "o"), 1);
  EXPECT_EQ(run_cli("berry --config " + (dir / "c.json").string(), dir / "o"), 0);
}

TEST(Cli, ReportsAreByteIdentical) {
  const fs::path dir = scratch("determinism");
  write(dir / "p.json", R"({"rep": {"spin": "1"}, "fiducial": {"preset": "matsumoto"}, "schedule": [{"until": 1, "h": [0, 0, 1]}],
      "kernel_mode": "first-order", "slice_counts": [2, 4, 8]})");
  ASSERT_EQ(run_cli("pathint --config " + (dir / "p.json").string() + " --out " + (dir / "a").string(), dir / "o"), 0);
  ASSERT_EQ(run_cli("pathint --config " + (dir / "p.json").string() + " --out " + (dir / "b").string(), dir / "o"), 0);
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
}
