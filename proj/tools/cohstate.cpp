// cohstate: batch front-end for the coherent-state analyses.
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "coherent/run.hpp"

namespace fs = std::filesystem;
using coherent::Command;

namespace {

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

int fail(const coherent::Error& e) {
  std::cerr << "cohstate: " << e.what() << "\n";
  return coherent::exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized coherent states: informativity, van Hove checks, Berry phases, path integrals"};
  app.set_version_flag("--version", std::string(COHERENT_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format = "text";
  const std::map<std::string, std::string> help{
      {"analyze", "moment map, isotropy subalgebras, informative verdict"},
      {"evolve", "quantum vs classical evolution with the van Hove phase"},
      {"identity", "resolution of the identity on a Haar quadrature"},
      {"berry", "Berry connection and Dirac quantization verdict"},
      {"pathint", "discrete coherent-state path integral convergence"},
  };
  for (const auto& [name, text] : help) {
    auto* sub = app.add_subcommand(name, text);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "directory for report.json and extra outputs");
    sub->add_option("--format", format, "stdout format")->check(CLI::IsMember({"json", "csv", "text"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const Command command = *coherent::command_from_string(app.get_subcommands().front()->get_name());

  coherent::RunConfig config;
  try {
    config = coherent::parse_config(config_path);
    if (config.echo.contains("command") && config.command != command) {
      throw coherent::Error(coherent::ErrorCode::ValidationError, "parse_config",
                            "config names command \"" + std::string(coherent::to_string(config.command)) +
                                "\" but \"" + std::string(coherent::to_string(command)) + "\" was requested");
    }
    config.command = command;
  } catch (const coherent::Error& e) {
    return fail(e);
  }

  const coherent::Report report = coherent::run(config);
  const std::string document = report.document.dump(2) + "\n";

  if (!out_dir.empty()) {
    try {
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "report.json", document);
      for (const auto& [name, contents] : report.files) write_file(fs::path(out_dir) / name, contents);
    } catch (const std::exception& e) {
      std::cerr << "cohstate: " << e.what() << "\n";
      return 1;
    }
  }

  if (format == "json") {
    std::cout << document;
  } else if (format == "csv") {
    std::cout << report.csv;
  } else {
    std::ostringstream wall;
    wall << std::setprecision(3) << report.wall_time;
    std::cout << report.summary << "wall time: " << wall.str() << " s\n";
  }
  if (report.exit_code != 0) {
    const auto& err = report.document["error"];
    std::cerr << "cohstate: " << err["code"].get<std::string>() << " in " << err["operation"].get<std::string>()
              << ": " << err["message"].get<std::string>() << "\n";
  }
  return report.exit_code;
}
