// homsim <command> [--config PATH] [--key value ...]

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hom/cli/commands.hpp"
#include "hom/cli/config.hpp"

namespace {

using hom::cli::Command;

struct Invocation {
  std::optional<std::string> config_path;
  std::map<std::string, std::string> flags;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded two-ion entanglement: trajectory simulation and reference checks"};
  app.require_subcommand(1);

  const std::pair<Command, const char*> commands[] = {
      {Command::kEntangleSweep, "sweep eta, lambda or gamma; CSV of success probability and fidelity"},
      {Command::kRedistribute, "scan the phase phi; CSV of the same-detector probability"},
      {Command::kOracleCheck, "consistency, Lindblad and waiting-time checks; JSON report"},
      {Command::kSpectrum, "single-emitter spectrum on a frequency grid; CSV"},
  };

  std::map<std::string, Invocation> invocations;
  for (const auto& [command, help] : commands) {
    const std::string name(hom::cli::to_string(command));
    CLI::App* sub = app.add_subcommand(name, help);
    auto& inv = invocations[name];
    sub->add_option_function<std::string>(
        "--config", [&inv](const std::string& v) { inv.config_path = v; }, "flat JSON config file");
    for (const auto& key : hom::cli::config_keys()) {
      const std::string k(key.name);
      sub->add_option_function<std::string>(
          "--" + k, [&inv, k](const std::string& v) { inv.flags[k] = v; }, std::string(key.help));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hom::cli::kExitConfig;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  const Invocation& inv = invocations.at(name);
  try {
    const Command command = hom::cli::parse_command(name);
    nlohmann::json file = nlohmann::json::object();
    if (inv.config_path) file = hom::cli::load_config_file(*inv.config_path);
    nlohmann::json flags = nlohmann::json::object();
    for (const auto& [k, v] : inv.flags) flags[k] = hom::cli::flag_value(k, v);
    const auto cfg = hom::cli::parse_config(command, file, flags);
    const auto output = hom::cli::execute(cfg);
    hom::cli::write_output(cfg, output.text);
    if (!output.ok) {
      std::cerr << "homsim: oracle check failed\n";
      return hom::cli::kExitOracle;
    }
    return hom::cli::kExitOk;
  } catch (const hom::cli::ConfigError& e) {
    std::cerr << "homsim: config error: " << e.what() << '\n';
    return hom::cli::kExitConfig;
  } catch (const hom::ParameterError& e) {
    std::cerr << "homsim: config error: " << e.what() << '\n';
    return hom::cli::kExitConfig;
  } catch (const hom::cli::IoError& e) {
    std::cerr << "homsim: I/O error: " << e.what() << '\n';
    return hom::cli::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "homsim: " << e.what() << '\n';
    return hom::cli::kExitFailure;
  }
}
